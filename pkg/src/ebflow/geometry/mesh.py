"""Structured mesh descriptor for Cartesian and cylindrical grids."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class CoordSystem(str, enum.Enum):
    CARTESIAN2D = "cartesian2d"
    CARTESIAN3D = "cartesian3d"
    CYLINDRICAL3D = "cylindrical3d"


@dataclass(frozen=True)
class Mesh:
    """Uniform cell-centred grid.

    For ``cylindrical3d`` the axes are ``(r, theta, z)``; all index-space
    quantities (``spacing``, ``centers``) are in those coordinates and the
    metric only enters through face/volume measures.
    """

    coord_system: CoordSystem
    lower: tuple
    upper: tuple
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "coord_system", CoordSystem(self.coord_system))
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        cells = tuple(int(n) for n in self.cells)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "cells", cells)
        dim = 2 if self.coord_system is CoordSystem.CARTESIAN2D else 3
        if not (len(lower) == len(upper) == len(cells) == dim):
            raise ValueError(f"{self.coord_system.value} mesh needs {dim} axes")
        if any(n <= 0 for n in cells):
            raise ValueError("cells_per_axis must be positive")
        if any(u <= l for l, u in zip(lower, upper)):
            raise ValueError("upper must exceed lower on every axis")
        if self.cylindrical and lower[0] <= 0.0:
            raise ValueError("cylindrical meshes require lower_r > 0")

    @classmethod
    def square(cls, n, lower=0.0, upper=1.0):
        return cls(CoordSystem.CARTESIAN2D, (lower, lower), (upper, upper), (n, n))

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def cylindrical(self) -> bool:
        return self.coord_system is CoordSystem.CYLINDRICAL3D

    @cached_property
    def spacing(self) -> np.ndarray:
        return (np.array(self.upper) - np.array(self.lower)) / np.array(self.cells)

    @property
    def h(self) -> float:
        return float(self.spacing.min())

    @property
    def ncells(self) -> int:
        return int(np.prod(self.cells))

    @property
    def node_shape(self) -> tuple:
        return tuple(n + 1 for n in self.cells)

    def edge_shape(self, axis: int) -> tuple:
        """Shape of the array of grid edges parallel to ``axis``."""
        return tuple(n if k == axis else n + 1 for k, n in enumerate(self.cells))

    def face_shape(self, axis: int) -> tuple:
        """Shape of the array of cell faces normal to ``axis``."""
        return tuple(n + 1 if k == axis else n for k, n in enumerate(self.cells))

    def axis_centers(self, axis: int) -> np.ndarray:
        return self.lower[axis] + (np.arange(self.cells[axis]) + 0.5) * self.spacing[axis]

    def axis_nodes(self, axis: int) -> np.ndarray:
        return self.lower[axis] + np.arange(self.cells[axis] + 1) * self.spacing[axis]

    @cached_property
    def centers(self) -> np.ndarray:
        """Cell centres, shape ``cells + (dim,)``."""
        grids = np.meshgrid(*[self.axis_centers(k) for k in range(self.dim)], indexing="ij")
        return np.stack(grids, axis=-1)

    @cached_property
    def nodes(self) -> np.ndarray:
        grids = np.meshgrid(*[self.axis_nodes(k) for k in range(self.dim)], indexing="ij")
        return np.stack(grids, axis=-1)

    def cell_lower(self, idx) -> np.ndarray:
        return np.array(self.lower) + np.asarray(idx) * self.spacing

    def cell_volume(self, idx=None):
        """Metric volume of a cell (all cells if ``idx`` is None)."""
        dv = float(np.prod(self.spacing))
        if not self.cylindrical:
            return dv if idx is not None else np.full(self.cells, dv)
        if idx is None:
            r = self.centers[..., 0]
        else:
            r = self.lower[0] + (idx[0] + 0.5) * self.spacing[0]
        return r * dv

    def face_measure(self, axis: int) -> np.ndarray:
        """Metric measure of every face normal to ``axis``."""
        shape = self.face_shape(axis)
        area = float(np.prod([self.spacing[k] for k in range(self.dim) if k != axis]))
        if not self.cylindrical or axis == 1:
            return np.full(shape, area)
        if axis == 0:
            r = self.axis_nodes(0)
        else:
            r = self.axis_centers(0)
        return np.broadcast_to((r * area)[:, None, None], shape).copy()

    def face_center(self, axis: int, idx) -> np.ndarray:
        x = np.array(self.lower) + (np.asarray(idx, dtype=float) + 0.5) * self.spacing
        x[axis] -= 0.5 * self.spacing[axis]
        return x

    def locate(self, points) -> np.ndarray:
        """Integer index of the cell containing each point (clipped to the grid)."""
        pts = np.atleast_2d(points)
        idx = np.floor((pts - np.array(self.lower)) / self.spacing).astype(int)
        return np.clip(idx, 0, np.array(self.cells) - 1)
