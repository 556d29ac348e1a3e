"""Linear solve, solution accessors, error norms and convergence tables."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import NoConvergence
from .unknowns import UnknownMap


@dataclass
class LinearSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    umap: UnknownMap | None = None
    null_vector: np.ndarray | None = None
    center_volume: np.ndarray | None = None

    def __post_init__(self):
        self.matrix = sp.csr_matrix(self.matrix)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or self.rhs.shape != (n,):
            raise ValueError("system must be square with matching right-hand side")
        if n and np.any(np.diff(self.matrix.indptr) == 0):
            raise ValueError("every row of the system must be non-empty")


@dataclass
class EllipticSolution:
    values: np.ndarray
    umap: UnknownMap | None
    residual: float
    iterations: int = 0
    projection: float = 0.0

    def p(self, cell, comp: int) -> float:
        u = self.umap.cell[comp][tuple(cell)]
        return float(self.values[u]) if u >= 0 else math.nan

    def p_intfc(self, p_index: int, comp: int) -> float:
        return float(self.values[self.umap.intfc[p_index, comp]])

    def center_field(self, comp: int) -> np.ndarray:
        u = self.umap.cell[comp]
        return np.where(u >= 0, self.values[np.maximum(u, 0)], np.nan)

    def intfc_values(self, comp: int) -> np.ndarray:
        return self.values[self.umap.intfc[:, comp]]


def project_rhs(rhs, null_vector):
    """Remove the component of ``rhs`` along the left null vector; return (rhs, α)."""
    y = null_vector
    alpha = float(y @ rhs / (y @ y))
    return rhs - alpha * y, alpha


def solve(system: LinearSystem, tol: float = 1e-10, max_iter: int = 1000, method: str = "gmres",
          restart: int = 60) -> EllipticSolution:
    """Solve to relative residual ``tol``.

    Singular pure-Neumann systems (``null_vector`` set) get their right-hand
    side projected onto the range, one unknown pinned, and the solution
    shifted to zero (volume-weighted) mean over the center unknowns.
    """
    A = system.matrix
    b = system.rhs.copy()
    n = A.shape[0]
    if n == 0:
        return EllipticSolution(np.zeros(0), system.umap, 0.0)
    alpha = 0.0
    A_solve = A
    if system.null_vector is not None:
        b, alpha = project_rhs(b, system.null_vector)
        pin = int(np.argmax(system.null_vector == 1.0))
        keep = np.ones(n)
        keep[pin] = 0.0
        A_solve = sp.csr_matrix(sp.diags(keep) @ A + sp.csr_matrix(([1.0], ([pin], [pin])), shape=A.shape))
        b_solve = b.copy()
        b_solve[pin] = 0.0
    else:
        b_solve = b
    bnorm = np.linalg.norm(b)
    iters = 0
    if bnorm == 0.0:
        x = np.zeros(n)
    elif method == "direct":
        x = spla.spsolve(A_solve.tocsc(), b_solve)
    elif method == "gmres":
        x = _gmres(A_solve, b_solve, tol, max_iter, restart)
    else:
        raise ValueError(f"unknown method {method!r}")
    if system.null_vector is not None:
        mask = system.null_vector == 1.0
        vol = system.center_volume[mask] if system.center_volume is not None else np.ones(mask.sum())
        x = x - float(vol @ x[mask] / vol.sum())
    res = float(np.linalg.norm(A @ x - b) / bnorm) if bnorm > 0 else 0.0
    if not np.all(np.isfinite(x)) or (method == "gmres" and res > tol * 10):
        raise NoConvergence(max_iter, res)
    return EllipticSolution(x, system.umap, res, iters, alpha)


def _gmres(A, b, tol, max_iter, restart):
    try:
        ilu = spla.spilu(A.tocsc(), drop_tol=1e-6, fill_factor=15)
        M = spla.LinearOperator(A.shape, ilu.solve)
    except RuntimeError:
        M = None
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b)
    for _ in range(4):
        x, info = spla.gmres(A, b, x0=x, rtol=tol * 0.5, atol=0.0, restart=restart,
                             maxiter=max_iter, M=M)
        res = np.linalg.norm(A @ x - b) / bnorm
        if res <= tol:
            return x
    raise NoConvergence(max_iter, float(res))


def error_norms(solution: EllipticSolution, exact, geometry):
    """(L∞, L2, L1) over center unknowns, weighted by component volumes.

    ``exact(points, comp)`` is evaluated where the unknowns live (cell centers).
    """
    mesh = geometry.mesh
    num, l1, l2, linf = 0.0, 0.0, 0.0, 0.0
    for c in (0, 1):
        u = solution.umap.cell[c]
        has = u >= 0
        vol = geometry.comp_volume(c)[has]
        e = np.abs(solution.values[u[has]] - np.asarray(exact(mesh.centers[has], c)))
        num += vol.sum()
        l1 += float(vol @ e)
        l2 += float(vol @ (e * e))
        if e.size:
            linf = max(linf, float(e.max()))
    return linf, math.sqrt(l2 / num), l1 / num


def observed_orders(errors):
    """log2(e_coarse / e_fine) between successive rows; first row gets NaN."""
    errors = np.asarray(errors, dtype=float)
    out = np.full(errors.shape, np.nan)
    if len(errors) > 1:
        out[1:] = np.log2(errors[:-1] / errors[1:])
    return out


def write_convergence_csv(path, rows) -> None:
    """rows: dicts with keys mesh, n_unknowns, Linf, L2, L1."""
    keys = ("Linf", "L2", "L1")
    orders = {k: observed_orders([r[k] for r in rows]) for k in keys}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mesh", "n_unknowns", "Linf", "L2", "L1", "order_Linf", "order_L2", "order_L1"])
        for i, r in enumerate(rows):
            w.writerow([r["mesh"], r["n_unknowns"]] + [repr(float(r[k])) for k in keys]
                       + ["" if math.isnan(orders[k][i]) else repr(float(orders[k][i])) for k in keys])
