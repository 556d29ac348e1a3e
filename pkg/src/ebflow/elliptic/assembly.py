"""Finite-volume assembly of the embedded-boundary elliptic system.

Every control volume (whole cell, or one component of a partial cell) gets
the balance Σ outward fluxes = ∫ f dV.  Face fluxes are aperture × β × the
normal gradient at the aperture centroid; the interface flux reuses the
normal-derivative stencil of the jump conditions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import MissingNeighbor, SingularStencil
from ..geometry.cutcell import CutGeometry
from .problem import EllipticInterfaceProblem
from .stencils import COND_LIMIT, batched_stencils
from .unknowns import UnknownMap, unknowns_for_geometry


@dataclass
class FaceOperator:
    """Physical normal gradient (+e_axis direction) on every face for one component.

    ``grad @ p + const`` evaluates it; ``weight`` is the component aperture
    (zero on faces carrying no flux, e.g. the duplicate periodic face).
    """

    axis: int
    comp: int
    grad: sp.csr_matrix
    const: np.ndarray
    weight: np.ndarray
    left: np.ndarray
    right: np.ndarray


@dataclass
class Discretization:
    geometry: CutGeometry
    umap: UnknownMap
    problem: EllipticInterfaceProblem
    faces: dict
    stencil: tuple
    intfc_measure: np.ndarray
    matrix: sp.csr_matrix
    rhs: np.ndarray
    null_vector: np.ndarray | None
    center_volume: np.ndarray

    def face_gradient(self, axis, comp, p) -> np.ndarray:
        op = self.faces[(axis, comp)]
        return (op.grad @ p + op.const).reshape(self.geometry.mesh.face_shape(axis))

    def normal_derivative(self, comp, p) -> np.ndarray:
        return self.stencil[comp] @ p

    @property
    def system(self):
        from .solve import LinearSystem
        return LinearSystem(self.matrix, self.rhs, self.umap, self.null_vector, self.center_volume)


def _coo(rows, cols, vals, shape):
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=shape)


def _face_operator(geo: CutGeometry, umap: UnknownMap, problem, axis: int, comp: int) -> FaceOperator:
    mesh = geo.mesh
    d = mesh.dim
    k = axis
    shape = mesh.face_shape(k)
    N = mesh.cells[k]
    hk = mesh.spacing[k]
    F = int(np.prod(shape))
    idx = np.indices(shape).reshape(d, -1).T
    periodic = problem.periodic(k)
    L = idx.copy()
    L[:, k] -= 1
    R = idx.copy()
    if periodic:
        L[:, k] %= N
        R[:, k] %= N
    L_in = (L[:, k] >= 0) & (L[:, k] < N)
    R_in = (R[:, k] >= 0) & (R[:, k] < N)
    cu = umap.cell[comp]
    uL = np.where(L_in, cu[tuple(np.clip(L, 0, np.array(mesh.cells) - 1).T)], -1)
    uR = np.where(R_in, cu[tuple(np.clip(R, 0, np.array(mesh.cells) - 1).T)], -1)
    weight = geo.aperture[k][comp].reshape(-1).copy()
    if periodic:
        weight[idx[:, k] == N] = 0.0
        uL[idx[:, k] == N] = -1
        uR[idx[:, k] == N] = -1

    # aperture centroid of every face for this component
    centroid = mesh.lower + (idx + 0.5) * mesh.spacing
    centroid[:, k] -= 0.5 * hk
    face_center = centroid.copy()
    cut = geo.cut_faces[k]
    cut_flat = np.ravel_multi_index(tuple(cut.T), shape) if len(cut) else np.zeros(0, dtype=int)
    if len(cut):
        cc = geo.cut_face_centroid[k][:, comp]
        good = np.all(np.isfinite(cc), axis=1)
        centroid[cut_flat[good]] = cc[good]

    two_point = (uL >= 0) & (uR >= 0)
    # interpolation of two-point differences to the centroid on cut faces
    W_rows, W_cols, W_vals = [np.arange(F)], [np.arange(F)], [np.ones(F)]
    if len(cut):
        f0 = cut_flat[two_point[cut_flat]]
        fidx = idx[f0]
        for t in range(d):
            if t == k:
                continue
            delta = (centroid[f0, t] - face_center[f0, t]) / mesh.spacing[t]
            s = np.where(delta >= 0, 1, -1)
            a = np.abs(delta)
            per_t = problem.periodic(t)
            chosen = np.full(len(f0), -1)
            sign = np.zeros(len(f0))
            for trial, sgn in ((s, 1.0), (-s, -1.0)):
                nb = fidx.copy()
                nb[:, t] += trial
                if per_t:
                    nb[:, t] %= mesh.cells[t]
                inb = (nb[:, t] >= 0) & (nb[:, t] < shape[t])
                flat = np.where(inb, np.ravel_multi_index(tuple(np.clip(nb, 0, np.array(shape) - 1).T), shape), 0)
                okn = inb & two_point[flat] & (chosen < 0)
                chosen = np.where(okn, flat, chosen)
                sign = np.where(okn, sgn, sign)
            use = (chosen >= 0) & (a > 0)
            W_rows += [f0[use], f0[use]]
            W_cols += [f0[use], chosen[use]]
            W_vals += [-sign[use] * a[use], sign[use] * a[use]]
    W = _coo(W_rows, W_cols, W_vals, (F, F))

    tp = np.nonzero(two_point)[0]
    D = _coo([tp, tp], [uR[tp], uL[tp]], [np.full(len(tp), 1.0 / hk), np.full(len(tp), -1.0 / hk)],
             (F, umap.n))
    G = (W @ D).tocsr()
    const = np.zeros(F)

    # exterior faces
    brow, bcol, bval = [], [], []
    if not periodic:
        for side in (0, 1):
            on = idx[:, k] == (0 if side == 0 else N)
            u_in = uR if side == 0 else uL
            on &= (u_in >= 0) & (weight > 0)
            f = np.nonzero(on)[0]
            if not len(f):
                continue
            bc = problem.bc(k, side)
            g = bc.evaluate(centroid[f])
            if bc.kind == "dirichlet":
                sgn = 1.0 if side == 0 else -1.0
                second = np.full(len(f), -1)
                if bc.order == 2 and N > 1:
                    c2 = idx[f].copy()
                    c2[:, k] = 1 if side == 0 else N - 2
                    second = cu[tuple(c2.T)]
                quad = second >= 0
                # linear ghost: 2(p_in - g)/h; quadratic: (9 p_in - p_2 - 8 g)/(3h)
                w_in = np.where(quad, 3.0, 2.0) / hk
                w_g = np.where(quad, 8.0 / 3.0, 2.0) / hk
                brow += [f, f[quad]]
                bcol += [u_in[f], second[quad]]
                bval += [sgn * w_in, np.full(int(quad.sum()), -sgn / (3.0 * hk))]
                const[f] = -sgn * w_g * g
            else:
                const[f] = (-1.0 if side == 0 else 1.0) * g
    missing = (weight > 0) & ~two_point
    if not periodic:
        missing &= ~((idx[:, k] == 0) | (idx[:, k] == N))
    if np.any(missing):
        bad = idx[np.nonzero(missing)[0][0]]
        raise MissingNeighbor(f"face {tuple(bad)} (axis {k}, comp {comp}) lacks a same-component neighbor")
    if brow:
        G = G + _coo(brow, bcol, bval, (F, umap.n))
    if mesh.cylindrical and geo.metric == "cylindrical" and k == 1:
        inv_r = 1.0 / centroid[:, 0]
        G = sp.diags(inv_r) @ G
        dirichlet_faces = np.zeros(F, dtype=bool)
        for side in (0, 1):
            if problem.bc(k, side).kind == "dirichlet":
                dirichlet_faces |= idx[:, k] == (0 if side == 0 else N)
        const = np.where(dirichlet_faces, const * inv_r, const)
    return FaceOperator(axis=k, comp=comp, grad=sp.csr_matrix(G), const=const, weight=weight,
                        left=uL, right=uR)


def interface_stencils(geo: CutGeometry, umap: UnknownMap, comp: int, n_candidates=None,
                       order="quadratic"):
    """Sparse (P × n) operator giving ∂p_c/∂n at every interface centroid."""
    mesh = geo.mesh
    d = mesh.dim
    P = geo.npartial
    if P == 0:
        return sp.csr_matrix((0, umap.n))
    if n_candidates is None:
        n_candidates = 12 if d == 2 else 24
    offs = np.array(list(itertools.product(range(-2, 3), repeat=d)))
    q = geo.pcells[:, None, :] + offs[None]
    inside = np.all((q >= 0) & (q < np.array(mesh.cells)), axis=2)
    qc = np.clip(q, 0, np.array(mesh.cells) - 1)
    qt = tuple(np.moveaxis(qc, -1, 0))
    # one-sided: only unknowns whose cell center lies in this component
    u = np.where(inside & (geo.center_comp[qt] == comp), umap.cell[comp][qt], -1)
    pos = mesh.lower + (qc + 0.5) * mesh.spacing
    target = geo.intfc_centroid
    dist = np.linalg.norm((pos - target[:, None]) / mesh.spacing, axis=2)
    dist = np.where(u >= 0, dist, np.inf)
    order_idx = np.argsort(dist, axis=1, kind="stable")[:, :n_candidates]
    take = lambda a: np.take_along_axis(a, order_idx[..., None] if a.ndim == 3 else order_idx, axis=1)
    u, pos, dist = take(u), take(pos), take(dist)
    mask = np.isfinite(dist)
    cyl = geo.metric == "cylindrical"
    anchor, w, cond = batched_stencils(target, geo.intfc_normal, pos, mask, mesh.spacing, order, cyl)
    bad = ~(cond < COND_LIMIT)
    if np.any(bad):
        a2, w2, c2 = batched_stencils(target[bad], geo.intfc_normal[bad], pos[bad], mask[bad],
                                      mesh.spacing, "linear", cyl)
        if np.any(~(c2 < COND_LIMIT)):
            cell = geo.pcells[np.nonzero(bad)[0][np.argmax(~(c2 < COND_LIMIT))]]
            raise SingularStencil(f"no usable normal-derivative stencil in cell {tuple(cell)}")
        anchor[bad], w[bad] = a2, w2
    rows = np.repeat(np.arange(P), n_candidates)
    cols = np.where(mask, u, 0).ravel()
    vals = np.where(mask, w, 0.0).ravel()
    S = sp.csr_matrix((np.concatenate([anchor, vals]),
                       (np.concatenate([np.arange(P), rows]), np.concatenate([umap.intfc[:, comp], cols]))),
                      shape=(P, umap.n))
    S.eliminate_zeros()
    return S


def assemble(geo: CutGeometry, problem: EllipticInterfaceProblem, umap: UnknownMap | None = None,
             n_candidates=None) -> Discretization:
    """Assemble the full linear system for one geometry."""
    mesh = geo.mesh
    d = mesh.dim
    umap = unknowns_for_geometry(geo) if umap is None else umap
    beta = problem.beta
    n = umap.n
    A = sp.csr_matrix((n, n))
    rhs = np.zeros(n)
    faces = {}
    for k in range(d):
        for c in (0, 1):
            op = _face_operator(geo, umap, problem, k, c)
            faces[(k, c)] = op
            F = len(op.weight)
            fl = np.nonzero((op.left >= 0) & (op.weight > 0))[0]
            fr = np.nonzero((op.right >= 0) & (op.weight > 0))[0]
            inc = _coo([op.left[fl], op.right[fr]], [fl, fr],
                       [np.ones(len(fl)), -np.ones(len(fr))], (n, F))
            scale = beta[c] * op.weight
            A = A + inc @ sp.diags(scale) @ op.grad
            rhs -= inc @ (scale * op.const)

    S = tuple(interface_stencils(geo, umap, c, n_candidates) for c in (0, 1))
    P = geo.npartial
    Nmag = np.linalg.norm(geo.intfc_vector, axis=1) if P else np.zeros(0)
    if P:
        ca = umap.cell[0][tuple(geo.pcells.T)]
        cb = umap.cell[1][tuple(geo.pcells.T)]
        Pa = sp.csr_matrix((np.ones(P), (ca, np.arange(P))), shape=(n, P))
        Pb = sp.csr_matrix((np.ones(P), (cb, np.arange(P))), shape=(n, P))
        A = A + Pa @ sp.diags(beta[0] * Nmag) @ S[0] - Pb @ sp.diags(beta[1] * Nmag) @ S[1]
        ia, ib = umap.intfc[:, 0], umap.intfc[:, 1]
        J1row = sp.csr_matrix((np.concatenate([np.ones(P), -np.ones(P)]),
                               (np.concatenate([ia, ia]), np.concatenate([ib, ia]))), shape=(n, n))
        Pib = sp.csr_matrix((np.ones(P), (ib, np.arange(P))), shape=(n, P))
        A = A + J1row + Pib @ (beta[1] * S[1] - beta[0] * S[0])
        rhs[ia] = problem.jump(1, geo.intfc_centroid, geo.intfc_normal)
        rhs[ib] = problem.jump(2, geo.intfc_centroid, geo.intfc_normal)

    # sources
    center_volume = np.zeros(n)
    for c in (0, 1):
        vol = geo.comp_volume(c)
        has = umap.cell[c] >= 0
        center_volume[umap.cell[c][has]] = vol[has]
        if problem.rhs_integrated is not None:
            rhs[umap.cell[c][has]] += np.asarray(problem.rhs_integrated)[c][has]
        elif problem.rhs is not None:
            pts = mesh.centers.copy()
            if P:
                pts[tuple(geo.pcells.T)] = geo.centroid[:, c]
            f = np.asarray(problem.rhs(pts[has], c), dtype=float)
            rhs[umap.cell[c][has]] += f * vol[has]

    null = None
    if problem.pure_neumann(d):
        null = np.zeros(n)
        null[umap.center_mask()] = 1.0
        if P:
            null[umap.intfc[:, 1]] = Nmag
    return Discretization(geometry=geo, umap=umap, problem=problem, faces=faces, stencil=S,
                          intfc_measure=Nmag, matrix=sp.csr_matrix(A), rhs=rhs, null_vector=null,
                          center_volume=center_volume)


def assemble_cell_equation(disc: Discretization, cell, comp: int):
    """(columns, coefficients, rhs) of the balance row of ``comp`` in ``cell``."""
    u = int(disc.umap.cell[comp][tuple(cell)])
    if u < 0:
        raise ValueError(f"cell {tuple(cell)} has no component {comp}")
    row = disc.matrix.getrow(u)
    return row.indices.copy(), row.data.copy(), float(disc.rhs[u])


def discretize_jump_conditions(disc: Discretization, cell):
    """The two jump rows of a partial cell as (columns, coefficients, rhs) triples."""
    p = int(disc.geometry.pidx[tuple(cell)])
    if p < 0:
        raise ValueError(f"cell {tuple(cell)} is not partial")
    out = []
    for c in (0, 1):
        u = int(disc.umap.intfc[p, c])
        row = disc.matrix.getrow(u)
        out.append((row.indices.copy(), row.data.copy(), float(disc.rhs[u])))
    return out
