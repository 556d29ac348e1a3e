"""Problem description for ∇·(β∇p) = f with interface jumps [p] = J1, [β ∂p/∂n] = J2."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class BoundaryCondition:
    """Exterior condition on one domain face.

    ``neumann`` values are the outward normal derivative ∂p/∂n, ``dirichlet``
    values are p itself.  ``value`` may be a constant or ``f(points)``.
    Dirichlet ``order`` 1 eliminates a linearly extrapolated ghost; order 2
    fits a quadratic through the boundary value and two interior cells.
    """

    kind: str = "neumann"
    value: float | Callable = 0.0
    order: int = 1

    def __post_init__(self):
        if self.kind not in ("neumann", "dirichlet", "periodic"):
            raise ValueError(f"unknown boundary condition {self.kind!r}")

    def evaluate(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if callable(self.value):
            return np.asarray(self.value(pts), dtype=float).reshape(len(pts))
        return np.full(len(pts), float(self.value))


def neumann(value=0.0):
    return BoundaryCondition("neumann", value)


def dirichlet(value, order=1):
    return BoundaryCondition("dirichlet", value, order)


PERIODIC = BoundaryCondition("periodic")


@dataclass
class EllipticInterfaceProblem:
    """Coefficients, sources, jumps and exterior conditions.

    ``rhs(points, comp)`` gives the pointwise source f; alternatively
    ``rhs_integrated`` supplies already volume-integrated sources with shape
    ``(2,) + cells``.  ``jump_J1``/``jump_J2`` are scalars, per-partial-cell
    arrays, or callables ``f(centroids, normals)``.
    """

    beta: tuple = (1.0, 1.0)
    rhs: Callable | None = None
    rhs_integrated: np.ndarray | None = None
    jump_J1: object = 0.0
    jump_J2: object = 0.0
    exterior_bc: dict = field(default_factory=dict)

    def __post_init__(self):
        self.beta = tuple(float(b) for b in self.beta)
        if len(self.beta) != 2 or min(self.beta) <= 0:
            raise ValueError("beta must hold two positive coefficients")

    def bc(self, axis: int, side: int) -> BoundaryCondition:
        return self.exterior_bc.get((axis, side), BoundaryCondition())

    def periodic(self, axis: int) -> bool:
        lo, hi = self.bc(axis, 0).kind, self.bc(axis, 1).kind
        if (lo == "periodic") != (hi == "periodic"):
            raise ValueError(f"periodic faces on axis {axis} must come in pairs")
        return lo == "periodic"

    def pure_neumann(self, dim: int) -> bool:
        return all(self.bc(k, s).kind != "dirichlet" for k in range(dim) for s in (0, 1))

    def jump(self, which: int, centroids, normals) -> np.ndarray:
        val = self.jump_J1 if which == 1 else self.jump_J2
        if callable(val):
            return np.asarray(val(centroids, normals), dtype=float)
        return np.broadcast_to(np.asarray(val, dtype=float), (len(centroids),)).copy()


def all_faces(dim: int, bc: BoundaryCondition) -> dict:
    return {(k, s): bc for k in range(dim) for s in (0, 1)}
