"""Flow state snapshots, initial states and frame output."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from ..front import Front2D, compute_crossings
from ..geometry.cutcell import CellType, CutGeometry, build_geometry
from ..geometry.mesh import Mesh
from .params import FlowBC


@dataclass(frozen=True)
class FlowState:
    """One time level.

    ``u_cell`` is (Nx, Ny, 2); ``u_face`` holds the x-face (Nx+1, Ny) and
    y-face (Nx, Ny+1) normal velocities.  ``pressure`` is the elliptic
    solution of the last projection and ``grad_p`` its least-squares
    gradient at cell centres (zero before the first projection).
    """

    t: float
    mesh: Mesh
    u_cell: np.ndarray
    u_face: tuple
    front: Front2D | None
    geometry: CutGeometry | None
    bc: FlowBC = field(default_factory=FlowBC)
    pressure: object = None
    grad_p: np.ndarray | None = None
    step_index: int = 0

    def __post_init__(self):
        if self.u_cell.shape != tuple(self.mesh.cells) + (2,):
            raise ValueError("u_cell must have shape cells + (2,)")
        if not np.all(np.isfinite(self.u_cell)):
            raise ValueError("u_cell must be finite")

    def replace(self, **kw) -> "FlowState":
        return replace(self, **kw)

    @property
    def center_comp(self) -> np.ndarray:
        if self.geometry is None:
            return np.ones(self.mesh.cells, dtype=np.int8)
        return self.geometry.center_comp


def geometry_from_front(mesh: Mesh, front: Front2D | None) -> CutGeometry | None:
    if front is None:
        return None
    labels, crossings = compute_crossings(front, mesh)
    return build_geometry(mesh, labels, crossings)


def initial_state(mesh: Mesh, front: Front2D | None = None, u_cell=None, bc: FlowBC | None = None,
                  t: float = 0.0) -> FlowState:
    """State at rest (or with the given cell velocity) and its geometry."""
    from .operators import faces_from_cells
    bc = FlowBC() if bc is None else bc
    u = np.zeros(tuple(mesh.cells) + (2,)) if u_cell is None else np.array(u_cell, dtype=float)
    return FlowState(t=t, mesh=mesh, u_cell=u, u_face=faces_from_cells(mesh, u, bc), front=front,
                     geometry=geometry_from_front(mesh, front), bc=bc)


def write_frame_csv(path, state: FlowState) -> None:
    """Field frame: ``i,j,x,y,u,v,p_a,p_b,celltype`` (empty pressure where absent)."""
    mesh = state.mesh
    nx, ny = mesh.cells
    pa = pb = np.full((nx, ny), np.nan)
    if state.pressure is not None:
        pa = state.pressure.center_field(0)
        pb = state.pressure.center_field(1)
    if state.geometry is not None:
        ctype = state.geometry.cell_type
        names = {int(v): v.name.lower() for v in CellType}
    else:
        ctype = np.full((nx, ny), -1)
        names = {-1: "full"}
    centers = mesh.centers
    fmt = lambda v: "" if not np.isfinite(v) else repr(float(v))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "x", "y", "u", "v", "p_a", "p_b", "celltype"])
        for i in range(nx):
            for j in range(ny):
                w.writerow([i, j, repr(float(centers[i, j, 0])), repr(float(centers[i, j, 1])),
                            repr(float(state.u_cell[i, j, 0])), repr(float(state.u_cell[i, j, 1])),
                            fmt(pa[i, j]), fmt(pb[i, j]), names.get(int(ctype[i, j]), str(int(ctype[i, j])))])
