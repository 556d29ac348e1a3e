"""Cell-centred velocity operators on a uniform 2D grid.

Ghost layers encode the velocity boundary conditions: no-slip walls mirror
with a sign flip (zero velocity on the wall), periodic axes wrap.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import NoConvergence, SingularStencil
from ..geometry.cutcell import CellType
from .params import FlowBC


def pad(q, bc: FlowBC, width=1):
    """Pad the two grid axes of ``q`` with ghost cells."""
    out = q
    for axis in (0, 1):
        if bc.periodic(axis):
            out = np.concatenate([np.take(out, range(-width, 0), axis=axis), out,
                                  np.take(out, range(width), axis=axis)], axis=axis)
        else:
            n = out.shape[axis]
            lo = -np.flip(np.take(out, range(width), axis=axis), axis=axis)
            hi = -np.flip(np.take(out, range(n - width, n), axis=axis), axis=axis)
            out = np.concatenate([lo, out, hi], axis=axis)
    return out


@lru_cache(maxsize=16)
def _laplacian(cells, spacing, kinds):
    mats = []
    for axis in (0, 1):
        n = cells[axis]
        h = spacing[axis]
        main = np.full(n, -2.0)
        off = np.ones(n - 1)
        T = sp.diags([off, main, off], [-1, 0, 1], shape=(n, n), format="lil")
        if kinds[axis] == "periodic":
            if n > 1:
                T[0, n - 1] += 1.0
                T[n - 1, 0] += 1.0
            else:
                T[0, 0] = 0.0
        else:
            T[0, 0] = -3.0
            T[n - 1, n - 1] = -3.0 if n > 1 else -4.0
        mats.append(sp.csr_matrix(T) / h ** 2)
    Ix = sp.identity(cells[0])
    Iy = sp.identity(cells[1])
    return sp.csr_matrix(sp.kron(mats[0], Iy) + sp.kron(Ix, mats[1]))


def laplacian_matrix(mesh, bc: FlowBC) -> sp.csr_matrix:
    """Symmetric 5-point Laplacian acting on flattened (C-order) cell fields."""
    return _laplacian(tuple(mesh.cells), tuple(float(h) for h in mesh.spacing), tuple(bc.kinds))


def laplacian(mesh, q, bc: FlowBC) -> np.ndarray:
    L = laplacian_matrix(mesh, bc)
    if q.ndim == 2:
        return (L @ q.ravel()).reshape(q.shape)
    return np.stack([(L @ q[..., k].ravel()).reshape(q.shape[:2]) for k in range(q.shape[-1])], axis=-1)


def helmholtz_solve(mesh, rhs, coef, bc: FlowBC, tol=1e-10, x0=None):
    """Solve (I - coef ∇²) x = rhs for one scalar cell field.

    ``coef`` (per cell, ≥ 0) scales the Laplacian row by row; rows are
    divided by ``coef`` so that conjugate gradients sees an SPD matrix.
    Cells with zero coefficient reduce to x = rhs.
    """
    coef = np.broadcast_to(np.asarray(coef, dtype=float), mesh.cells).ravel()
    b = np.asarray(rhs, dtype=float).ravel()
    if not np.any(coef > 0):
        return b.reshape(mesh.cells).copy()
    L = laplacian_matrix(mesh, bc)
    active = coef > 0
    if not np.all(active):
        # eliminate the trivial rows x_i = b_i
        A_full = sp.identity(len(b), format="csr") - sp.diags(coef) @ L
        x = spla.spsolve(A_full.tocsc(), b)
        return x.reshape(mesh.cells)
    A = sp.diags(1.0 / coef) - L
    diag = A.diagonal()
    M = sp.diags(1.0 / diag)
    x, info = spla.cg(A, b / coef, rtol=tol, atol=0.0, maxiter=2000, M=M,
                      x0=None if x0 is None else np.asarray(x0).ravel())
    if info != 0:
        res = np.linalg.norm(A @ x - b / coef) / max(np.linalg.norm(b / coef), 1e-300)
        raise NoConvergence(2000, float(res))
    return x.reshape(mesh.cells)


# ---------------------------------------------------------------- slopes and convection

def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def limited_slopes(qp, axis, use_minmod):
    """Undivided limited differences of the padded field ``qp`` (1 ghost layer)."""
    n = qp.shape[axis]
    dm = np.take(qp, range(1, n - 1), axis=axis) - np.take(qp, range(0, n - 2), axis=axis)
    dp = np.take(qp, range(2, n), axis=axis) - np.take(qp, range(1, n - 1), axis=axis)
    other = 1 - axis
    sl = [slice(None), slice(None)]
    sl[other] = slice(1, qp.shape[other] - 1)
    dm, dp = dm[tuple(sl)], dp[tuple(sl)]
    mm = _minmod(dm, dp)
    mc = _minmod(0.5 * (dm + dp), 2.0 * mm)
    return np.where(use_minmod, mm, mc)


def minmod_mask(mesh, geo, bc: FlowBC):
    """Cells that use minmod slopes: partial cells, their neighbours and wall cells."""
    mask = np.zeros(mesh.cells, dtype=bool)
    if geo is not None:
        part = geo.cell_type == CellType.PARTIAL
        grown = part.copy()
        grown[1:] |= part[:-1]
        grown[:-1] |= part[1:]
        grown[:, 1:] |= part[:, :-1]
        grown[:, :-1] |= part[:, 1:]
        mask |= grown
    if not bc.periodic(0):
        mask[[0, -1], :] = True
    if not bc.periodic(1):
        mask[:, [0, -1]] = True
    return mask


def riemann_burgers(left, right):
    """Exact Riemann solution of Burgers' equation sampled at x/t = 0."""
    shock = 0.5 * (left + right)
    out = np.where(left >= 0.0, left, right)
    out = np.where((left >= 0.0) & (right >= 0.0), left, out)
    out = np.where((left <= 0.0) & (right <= 0.0), right, out)
    out = np.where((left < 0.0) & (right > 0.0), 0.0, out)
    out = np.where((left > 0.0) & (right < 0.0), np.where(shock > 0, left, np.where(shock < 0, right, 0.0)), out)
    return out


def face_states(mesh, u, bc: FlowBC, dt=0.0, u_t=None, minmod=None):
    """Godunov face velocities at t^{n+1/2}.

    Returns ``(fx, fy)`` with fx of shape (Nx+1, Ny, 2) holding both velocity
    components on x-faces, fy likewise on y-faces.  The normal component is
    the Burgers Riemann solution; the tangential one is upwinded by it.
    """
    if minmod is None:
        minmod = np.zeros(mesh.cells, dtype=bool)
    hx, hy = mesh.spacing
    up = pad(u, bc, 1)
    slopes = [np.stack([limited_slopes(up[..., c], a, minmod) for c in (0, 1)], axis=-1) for a in (0, 1)]
    extra = np.zeros_like(u) if u_t is None else 0.5 * dt * u_t
    out = []
    for a in (0, 1):
        lo_state = u - 0.5 * slopes[a] + extra
        hi_state = u + 0.5 * slopes[a] + extra
        n = mesh.cells[a]
        fshape = list(u.shape)
        fshape[a] += 1
        L = np.zeros(fshape)
        R = np.zeros(fshape)
        sl_int = [slice(None)] * 3
        sl_int[a] = slice(1, n)
        sl_lo = [slice(None)] * 3
        sl_lo[a] = slice(0, n - 1)
        sl_hi = [slice(None)] * 3
        sl_hi[a] = slice(1, n)
        L[tuple(sl_int)] = hi_state[tuple(sl_lo)]
        R[tuple(sl_int)] = lo_state[tuple(sl_hi)]
        if bc.periodic(a):
            first = [slice(None)] * 3
            first[a] = slice(0, 1)
            last = [slice(None)] * 3
            last[a] = slice(n, n + 1)
            cl = [slice(None)] * 3
            cl[a] = slice(n - 1, n)
            c0 = [slice(None)] * 3
            c0[a] = slice(0, 1)
            L[tuple(first)] = hi_state[tuple(cl)]
            R[tuple(first)] = lo_state[tuple(c0)]
            L[tuple(last)] = L[tuple(first)]
            R[tuple(last)] = R[tuple(first)]
        normal = riemann_burgers(L[..., a], R[..., a])
        tang = 1 - a
        t_state = np.where(normal > 0, L[..., tang], np.where(normal < 0, R[..., tang],
                                                               0.5 * (L[..., tang] + R[..., tang])))
        F = np.zeros(fshape)
        F[..., a] = normal
        F[..., tang] = t_state
        if not bc.periodic(a):
            w0 = [slice(None)] * 3
            w0[a] = slice(0, 1)
            w1 = [slice(None)] * 3
            w1[a] = slice(n, n + 1)
            F[tuple(w0)] = 0.0
            F[tuple(w1)] = 0.0
        out.append(F)
    return out[0], out[1]


def advective_derivative(mesh, u, bc: FlowBC, minmod=None):
    """(u·∇)u from limited centred slopes (used inside the time extrapolation)."""
    if minmod is None:
        minmod = np.zeros(mesh.cells, dtype=bool)
    up = pad(u, bc, 1)
    hx, hy = mesh.spacing
    dx = np.stack([limited_slopes(up[..., c], 0, minmod) for c in (0, 1)], axis=-1) / hx
    dy = np.stack([limited_slopes(up[..., c], 1, minmod) for c in (0, 1)], axis=-1) / hy
    return u[..., 0:1] * dx + u[..., 1:2] * dy


def convection_from_faces(mesh, fx, fy):
    """½(u_{i+½}+u_{i-½}) Δ_x q / h + ½(v_{j+½}+v_{j-½}) Δ_y q / h for q = u, v."""
    hx, hy = mesh.spacing
    ubar = 0.5 * (fx[1:, :, 0] + fx[:-1, :, 0])
    vbar = 0.5 * (fy[:, 1:, 1] + fy[:, :-1, 1])
    return (ubar[..., None] * (fx[1:] - fx[:-1]) / hx + vbar[..., None] * (fy[:, 1:] - fy[:, :-1]) / hy)


# ---------------------------------------------------------------- interpolation

def bilinear_cell_sampler(mesh, u, bc: FlowBC):
    """Bilinear interpolation of a cell-centred vector field (ghosts at walls)."""
    up = pad(u, bc, 1)
    lo = np.array(mesh.lower) - 0.5 * mesh.spacing
    h = mesh.spacing

    def sample(points):
        pts = np.atleast_2d(points)
        s = (pts - lo) / h
        i = np.clip(np.floor(s).astype(int), 0, np.array(up.shape[:2]) - 2)
        f = s - i
        return _bilerp(up, i, f)
    return sample


def delta_cell_sampler(mesh, u, bc: FlowBC):
    """Interpolation of a cell-centred vector field with the 4-point cosine kernel.

    The kernel weights ¼(1 + cos(πr/2)) over a 4×4 block of centres remove
    the 2h (odd-even) component of the field exactly at grid points.
    """
    up = pad(u, bc, 2)
    lo = np.array(mesh.lower) - 1.5 * mesh.spacing
    h = mesh.spacing

    def sample(points):
        pts = np.atleast_2d(points)
        s = (pts - lo) / h                    # position in padded centre index space
        i0 = np.floor(s).astype(int) - 1
        i0 = np.clip(i0, 0, np.array(up.shape[:2]) - 4)
        out = np.zeros((len(pts),) + up.shape[2:])
        offs = np.arange(4)
        rx = s[:, 0:1] - (i0[:, 0:1] + offs)
        ry = s[:, 1:2] - (i0[:, 1:2] + offs)
        wx = np.where(np.abs(rx) < 2, 0.25 * (1 + np.cos(0.5 * np.pi * rx)), 0.0)
        wy = np.where(np.abs(ry) < 2, 0.25 * (1 + np.cos(0.5 * np.pi * ry)), 0.0)
        for a in range(4):
            for b in range(4):
                w = wx[:, a] * wy[:, b]
                out += (w[:, None] if up.ndim == 3 else w) * up[i0[:, 0] + a, i0[:, 1] + b]
        return out
    return sample


def _bilerp(arr, i, f):
    a00 = arr[i[:, 0], i[:, 1]]
    a10 = arr[i[:, 0] + 1, i[:, 1]]
    a01 = arr[i[:, 0], i[:, 1] + 1]
    a11 = arr[i[:, 0] + 1, i[:, 1] + 1]
    fx = f[:, 0:1] if arr.ndim == 3 else f[:, 0]
    fy = f[:, 1:2] if arr.ndim == 3 else f[:, 1]
    return (1 - fx) * (1 - fy) * a00 + fx * (1 - fy) * a10 + (1 - fx) * fy * a01 + fx * fy * a11


def mac_sampler(mesh, ux, uy, bc: FlowBC):
    """Interpolate the staggered face field: u from x-faces, v from y-faces."""
    hx, hy = mesh.spacing
    x0, y0 = mesh.lower
    # x-faces: nodes in x, centres in y -> pad along y only
    uxp = _pad_tangential(ux, bc, axis=1)
    uyp = _pad_tangential(uy, bc, axis=0)

    def sample(points):
        pts = np.atleast_2d(points)
        sx = np.stack([(pts[:, 0] - x0) / hx, (pts[:, 1] - y0) / hy + 0.5], axis=1)
        ix = np.clip(np.floor(sx).astype(int), 0, np.array(uxp.shape) - 2)
        u = _bilerp(uxp, ix, sx - ix)
        sy = np.stack([(pts[:, 0] - x0) / hx + 0.5, (pts[:, 1] - y0) / hy], axis=1)
        iy = np.clip(np.floor(sy).astype(int), 0, np.array(uyp.shape) - 2)
        v = _bilerp(uyp, iy, sy - iy)
        return np.stack([u, v], axis=1)
    return sample


def _pad_tangential(q, bc, axis):
    if bc.periodic(axis):
        return np.concatenate([np.take(q, [-1], axis=axis), q, np.take(q, [0], axis=axis)], axis=axis)
    return np.concatenate([-np.take(q, [0], axis=axis), q, -np.take(q, [-1], axis=axis)], axis=axis)


def faces_from_cells(mesh, u, bc: FlowBC):
    """Normal face velocities by averaging adjacent cell centres (walls: zero)."""
    up = pad(u, bc, 1)
    ux = 0.5 * (up[:-1, 1:-1, 0] + up[1:, 1:-1, 0])
    uy = 0.5 * (up[1:-1, :-1, 1] + up[1:-1, 1:, 1])
    return ux, uy


def cells_from_faces(ux, uy):
    return np.stack([0.5 * (ux[1:] + ux[:-1]), 0.5 * (uy[:, 1:] + uy[:, :-1])], axis=-1)


def face_divergence(mesh, ux, uy):
    hx, hy = mesh.spacing
    return (ux[1:] - ux[:-1]) / hx + (uy[:, 1:] - uy[:, :-1]) / hy


# ---------------------------------------------------------------- pressure gradient

def pressure_gradient_field(mesh, disc, solution, comp_field, order="quadratic"):
    """Least-squares pressure gradient at every cell centre.

    For each cell the same-component samples (center unknowns and interface
    unknowns) in the 5×5 window around it are fitted by a quadratic; the
    component of each cell is ``comp_field``.  Returns (Nx, Ny, 2).
    """
    geo = disc.geometry
    nx, ny = mesh.cells
    h = mesh.spacing
    vals = np.full((2, 2, nx, ny), np.nan)
    pos = np.empty((2, nx, ny, 2))
    pos[0] = mesh.centers
    pos[1] = mesh.centers
    for c in (0, 1):
        vals[c, 0] = solution.center_field(c)
        if geo.npartial:
            vals[c, 1][tuple(geo.pcells.T)] = solution.intfc_values(c)
    if geo.npartial:
        pos[1][tuple(geo.pcells.T)] = geo.intfc_centroid
    grad = np.zeros((nx, ny, 2))
    wx, wy = _regular_weights(order)
    for c in (0, 1):
        want = np.asarray(comp_field) == c
        if not np.any(want):
            continue
        v = np.pad(vals[c], ((0, 0), (2, 2), (2, 2)), constant_values=np.nan)
        win = sliding_window_view(v, (5, 5), axis=(1, 2))                   # (2, nx, ny, 5, 5)
        # windows of 25 centre samples and no interface sample share one fixed stencil
        regular = want & np.all(np.isfinite(win[0]), axis=(2, 3)) & np.all(np.isnan(win[1]), axis=(2, 3))
        if np.any(regular):
            w = win[0][regular]
            grad[regular] = np.stack([np.einsum("bij,ij->b", w, wx) / h[0],
                                      np.einsum("bij,ij->b", w, wy) / h[1]], axis=-1)
        rest = want & ~regular
        if not np.any(rest):
            continue
        x = np.pad(pos, ((0, 0), (2, 2), (2, 2), (0, 0)), mode="edge")
        vw = win[:, rest]                                                    # (2, B, 5, 5)
        xw = sliding_window_view(x, (5, 5), axis=(1, 2))[:, rest]            # (2, B, 2, 5, 5)
        B = vw.shape[1]
        vw = np.moveaxis(vw, 0, 1).reshape(B, 50)
        xw = np.moveaxis(xw, 0, 1)                                            # (B, 2, 2, 5, 5)
        xw = np.moveaxis(xw, 2, -1).reshape(B, 50, 2)
        grad[rest] = _ls_gradient(mesh.centers[rest], xw, vw, h, order)
    return grad


@lru_cache(maxsize=4)
def _regular_weights(order):
    """Gradient weights (in units of 1/h) of the LS fit on a full 5×5 window."""
    o = np.arange(-2, 3, dtype=float)
    dx, dy = np.meshgrid(o, o, indexing="ij")
    cols = [np.ones(25), dx.ravel(), dy.ravel()]
    if order == "quadratic":
        cols += [dx.ravel() ** 2, dx.ravel() * dy.ravel(), dy.ravel() ** 2]
    pinv = np.linalg.pinv(np.stack(cols, axis=1))
    return pinv[1].reshape(5, 5), pinv[2].reshape(5, 5)


def _ls_gradient(target, pts, vals, h, order):
    mask = np.isfinite(vals)
    dx = (pts - target[:, None]) / h
    cols = [np.ones(dx.shape[:2]), dx[..., 0], dx[..., 1]]
    if order == "quadratic":
        cols += [dx[..., 0] ** 2, dx[..., 0] * dx[..., 1], dx[..., 1] ** 2]
    X = np.stack(cols, axis=-1) * mask[..., None]
    y = np.where(mask, vals, 0.0)
    Xt = X.swapaxes(1, 2)
    G = Xt @ X
    r = (Xt @ y[..., None])[..., 0]
    m = X.shape[-1]
    counts = mask.sum(axis=1)
    det_ok = counts >= m
    ev = np.linalg.eigvalsh(G)
    cond_ok = det_ok & (ev[:, 0] > 1e-12 * ev[:, -1])
    coef = np.zeros((len(target), m))
    if np.any(cond_ok):
        coef[cond_ok] = np.linalg.solve(G[cond_ok], r[cond_ok][..., None])[..., 0]
    out = coef[:, 1:3] / h
    bad = ~cond_ok
    if np.any(bad):
        if order == "quadratic":
            out[bad] = _ls_gradient(target[bad], pts[bad], vals[bad], h, "linear")
        else:
            raise SingularStencil("pressure gradient fit has too few same-component samples")
    return out
