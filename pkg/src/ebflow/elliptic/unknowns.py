"""Unknown numbering for the embedded-boundary elliptic system."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry.cutcell import CellType


@dataclass(frozen=True)
class UnknownMap:
    """Index of every unknown.

    ``cell[c]`` holds the center unknown of component ``c`` in each cell (-1
    when absent); ``intfc[p, c]`` the interface unknown of partial cell ``p``.
    Within a partial cell the order is center_a, center_b, intfc_a, intfc_b.
    """

    cell: np.ndarray
    intfc: np.ndarray
    n: int

    @property
    def shape(self):
        return self.cell.shape[1:]

    def counts(self):
        ncenter = int((self.cell >= 0).sum())
        return ncenter, int(self.intfc.size)

    def center_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.cell[self.cell >= 0]] = True
        return mask


def build_unknown_map(cell_types, center_comp=None) -> UnknownMap:
    """Lexicographic numbering: 1 unknown per whole cell, 4 per partial cell."""
    types = np.asarray(cell_types)
    if center_comp is None:
        center_comp = np.zeros(types.shape, dtype=np.int8)
    partial = types == CellType.PARTIAL
    whole = (types == CellType.INTERNAL) | (types == CellType.BOUNDARY)
    count = np.where(partial, 4, np.where(whole, 1, 0)).ravel()
    start = np.concatenate([[0], np.cumsum(count)[:-1]]).reshape(types.shape)
    cell = np.full((2,) + types.shape, -1, dtype=np.int64)
    for c in (0, 1):
        own = whole & (np.asarray(center_comp) == c)
        cell[c][own] = start[own]
        cell[c][partial] = start[partial] + c
    pcells = np.argwhere(partial)
    ps = start[tuple(pcells.T)]
    intfc = np.stack([ps + 2, ps + 3], axis=1) if len(pcells) else np.zeros((0, 2), dtype=np.int64)
    return UnknownMap(cell=cell, intfc=intfc.astype(np.int64), n=int(count.sum()))


def unknowns_for_geometry(geo) -> UnknownMap:
    return build_unknown_map(geo.cell_type, geo.center_comp)
