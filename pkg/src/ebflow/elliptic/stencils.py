"""Least-squares normal-derivative stencils anchored at an interface unknown."""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import SingularStencil

COND_LIMIT = 1e12


def _basis(dx, order):
    """Polynomial basis without the constant term, shape (..., m)."""
    d = dx.shape[-1]
    cols = [dx[..., k] for k in range(d)]
    if order != "linear":
        for a, b in itertools.combinations_with_replacement(range(d), 2):
            cols.append(dx[..., a] * dx[..., b])
    return np.stack(cols, axis=-1)


def nbasis(dim, order):
    return dim if order == "linear" else dim + dim * (dim + 1) // 2


def batched_stencils(target, normal, points, mask, scale, order="quadratic",
                     cylindrical=False):
    """Weights of ∂q/∂n at ``target`` from samples at ``points``.

    target (B, d), normal (B, d) physical unit normals, points (B, K, d) with
    ``mask`` (B, K) marking real candidates, ``scale`` (d,) per-axis spacing.
    The fit is q(x) = q(target) + Σ c_j φ_j(x - target), so the anchor weight
    is minus the sum of candidate weights.  Returns (anchor_w (B,), w (B, K),
    cond (B,)).  Cylindrical targets use ∇ = (∂r, ∂θ / r, ∂z).
    """
    target = np.asarray(target, dtype=float)
    normal = np.asarray(normal, dtype=float)
    dx = (np.asarray(points, dtype=float) - target[:, None, :]) / scale
    X = _basis(dx, order) * mask[..., None]
    B, K, m = X.shape
    d = target.shape[1]
    e = np.zeros((B, m))
    metric = np.ones((B, d))
    if cylindrical:
        metric[:, 1] = target[:, 0]
    e[:, :d] = normal / (scale * metric)
    # w = X (XᵀX)⁻¹ e through the thin SVD; avoids squaring the condition number
    U, sv, Vt = np.linalg.svd(X, full_matrices=False)
    with np.errstate(divide="ignore"):
        cond = np.where(sv[:, -1] > 0, sv[:, 0] / sv[:, -1], np.inf)
    ok = cond < COND_LIMIT
    w = np.zeros((B, K))
    if np.any(ok):
        y = np.einsum("bmn,bn->bm", Vt[ok], e[ok]) / sv[ok]
        w[ok] = np.einsum("bkm,bm->bk", U[ok], y)
    return -w.sum(axis=1), w, cond


def normal_derivative_stencil(target, normal, candidates, order="quadratic",
                              cylindrical=False, scale=None):
    """Weights over ``[anchor] + candidates`` giving ∂q/∂n at ``target``.

    The anchor is the unknown sitting at ``target`` itself (the interface
    unknown).  ``order`` is ``linear``, ``quadratic`` or ``least_squares``
    (quadratic basis, over-determined).  Raises SingularStencil when the
    sample matrix condition number exceeds 1e12.
    """
    target = np.asarray(target, dtype=float)
    cand = np.asarray(candidates, dtype=float)
    d = target.size
    basis_order = "linear" if order == "linear" else "quadratic"
    need = nbasis(d, basis_order)
    if len(cand) < need:
        raise SingularStencil(f"{order} stencil needs {need + 1} points, got {len(cand) + 1}")
    if scale is None:
        scale = np.ones(d)
    n = np.asarray(normal, dtype=float)
    a, w, cond = batched_stencils(target[None], n[None], cand[None],
                                  np.ones((1, len(cand)), dtype=bool), np.asarray(scale, dtype=float),
                                  basis_order, cylindrical)
    if not cond[0] < COND_LIMIT:
        raise SingularStencil(f"stencil matrix condition number {cond[0]:.3g}")
    return np.concatenate([[a[0]], w[0]])
