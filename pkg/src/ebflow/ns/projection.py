"""Embedded-boundary projection with the surface-tension pressure jump."""
from __future__ import annotations

import numpy as np

from ..elliptic import EllipticInterfaceProblem, assemble, neumann, PERIODIC, solve
from ..errors import CurvatureUnresolved
from ..front import Front2D, curvature_all, filter_along_front
from .operators import cells_from_faces, faces_from_cells, mac_sampler, pressure_gradient_field
from .params import FluidParams, TimeStepConfig


def interface_curvature(front: Front2D, geo, min_points: int = 4, reach: float = 2.5,
                        smooth_passes: int = 1) -> np.ndarray:
    """Curvature at each interface centroid, interpolated along the closest front segment.

    Marker curvatures are first passed ``smooth_passes`` times through the
    along-front (¼, ½, ¼) filter; a marker-scale zigzag otherwise feeds an
    odd-even pressure jump back into the velocity.  Raises
    CurvatureUnresolved when fewer than ``min_points`` markers lie in the
    (2·reach)h box around a partial cell.
    """
    P = geo.npartial
    if P == 0:
        return np.zeros(0)
    mesh = geo.mesh
    x = front.points
    _, kappa = curvature_all(front)
    kappa = filter_along_front(kappa, smooth_passes)
    centres = mesh.centers[tuple(geo.pcells.T)]
    near = np.all(np.abs(x[None, :, :] - centres[:, None, :]) <= reach * mesh.spacing, axis=2)
    counts = near.sum(axis=1)
    if np.any(counts < min_points):
        bad = geo.pcells[np.argmax(counts < min_points)]
        raise CurvatureUnresolved(f"only {counts.min()} front markers near partial cell {tuple(bad)}")
    a = x
    b = np.roll(x, -1, axis=0)
    ab = b - a
    q = geo.intfc_centroid
    s = np.einsum("pmk,mk->pm", q[:, None, :] - a[None], ab) / np.maximum(np.einsum("mk,mk->m", ab, ab), 1e-300)
    s = np.clip(s, 0.0, 1.0)
    foot = a[None] + s[..., None] * ab[None]
    d2 = np.sum((foot - q[:, None, :]) ** 2, axis=2)
    m = np.argmin(d2, axis=1)
    sm = s[np.arange(P), m]
    return (1.0 - sm) * kappa[m] + sm * np.roll(kappa, -1)[m]


def aperture_face_values(geo, uf, axis: int, comp: int, periodic_t: bool = False) -> np.ndarray:
    """Face velocities moved to each cut face's ``comp`` aperture centroid.

    Linear interpolation along the face between the face centre and its
    neighbour face on the side of the centroid (the opposite neighbour when
    that side is outside the domain).  Uncut faces are returned unchanged.
    """
    out = np.array(uf, dtype=float)
    cut = geo.cut_faces[axis]
    if not len(cut):
        return out
    mesh = geo.mesh
    t = 1 - axis
    cc = geo.cut_face_centroid[axis][:, comp]
    good = np.all(np.isfinite(cc), axis=1)
    cut, cc = cut[good], cc[good]
    centre = mesh.lower + (cut + 0.5) * mesh.spacing
    delta = (cc[:, t] - centre[:, t]) / mesh.spacing[t]
    step = np.where(delta >= 0, 1, -1)
    nb = cut.copy()
    nb[:, t] += step
    n_t = uf.shape[t]
    if periodic_t:
        nb[:, t] %= n_t
    else:
        outside = (nb[:, t] < 0) | (nb[:, t] >= n_t)
        nb[outside, t] = cut[outside, t] - step[outside]
        step = np.where(outside, -step, step)
    a = delta * step
    u0 = uf[tuple(cut.T)]
    u1 = uf[tuple(nb.T)]
    out[tuple(cut.T)] = u0 + a * (u1 - u0)
    return out


def pressure_problem(state, params: FluidParams, rhs_integrated, kappa=None) -> EllipticInterfaceProblem:
    bc = {}
    for k in (0, 1):
        cond = PERIODIC if state.bc.periodic(k) else neumann(0.0)
        bc[(k, 0)] = cond
        bc[(k, 1)] = cond
    J1 = 0.0 if kappa is None else -params.sigma * kappa
    return EllipticInterfaceProblem(beta=params.beta, rhs_integrated=rhs_integrated, jump_J1=J1,
                                    jump_J2=0.0, exterior_bc=bc)


def projection_rhs(state, u_star, dt, faces=None):
    """Integrated divergence of u* per control volume divided by dt, shape (2,) + cells."""
    mesh = state.mesh
    geo = state.geometry
    ux, uy = faces_from_cells(mesh, u_star, state.bc) if faces is None else faces
    out = np.zeros((2,) + tuple(mesh.cells))
    for c in (0, 1):
        if geo is None:
            apx = np.full(ux.shape, mesh.spacing[1]) * (c == 1)
            apy = np.full(uy.shape, mesh.spacing[0]) * (c == 1)
            fx = apx * ux
            fy = apy * uy
        else:
            apx, apy = geo.aperture[0][c], geo.aperture[1][c]
            fx = apx * aperture_face_values(geo, ux, 0, c, state.bc.periodic(1))
            fy = apy * aperture_face_values(geo, uy, 1, c, state.bc.periodic(0))
        out[c] = fx[1:] - fx[:-1] + fy[:, 1:] - fy[:, :-1]
    if geo is not None and geo.npartial:
        sample = mac_sampler(mesh, ux, uy, state.bc)
        uI = sample(geo.intfc_centroid)
        flux = np.einsum("pk,pk->p", uI, geo.intfc_vector)
        idx = tuple(geo.pcells.T)
        out[0][idx] += flux
        out[1][idx] -= flux
    return out / dt


def project(state, u_star, dt: float, params: FluidParams, config: TimeStepConfig | None = None,
            faces_star=None):
    """Make ``u_star`` discretely divergence-free; returns the new state.

    Face values of u* are interpolated from the cell centres unless
    ``faces_star`` (x-face, y-face normal velocities) is given.  The returned
    state carries the pressure, its cell-centre gradient and the
    aperture-averaged face velocities; cell velocities are face averages.
    """
    return project_with_operator(state, u_star, dt, params, config, faces_star)[0]


def project_with_operator(state, u_star, dt: float, params: FluidParams,
                          config: TimeStepConfig | None = None, faces_star=None):
    """Like :func:`project` but also returns the pressure discretization."""
    config = TimeStepConfig() if config is None else config
    mesh = state.mesh
    geo = state.geometry
    if dt <= 0.0:
        return state.replace(u_cell=np.array(u_star, dtype=float)), None
    if faces_star is None:
        faces_star = faces_from_cells(mesh, u_star, state.bc)
    rhs = projection_rhs(state, u_star, dt, faces_star)
    if geo is None:
        geo = _single_phase_geometry(mesh)
    kappa = interface_curvature(state.front, geo) if (geo.npartial and params.sigma > 0) else None
    problem = pressure_problem(state, params, rhs, kappa)
    disc = assemble(geo, problem)
    sol = solve(disc.system, tol=config.projection_tol, method=config.projection_solver)
    p = sol.values
    new_faces = []
    for axis in (0, 1):
        num = np.zeros(mesh.face_shape(axis))
        den = np.zeros(mesh.face_shape(axis))
        for c in (0, 1):
            ap = geo.aperture[axis][c]
            if not np.any(ap > 0):
                continue
            g = disc.face_gradient(axis, c, p)
            ustar_c = aperture_face_values(geo, faces_star[axis], axis, c, state.bc.periodic(1 - axis))
            uc = ustar_c - dt * params.beta[c] * g
            num += ap * uc
            den += ap
        uf = np.where(den > 0, num / np.where(den > 0, den, 1.0), faces_star[axis])
        if not state.bc.periodic(axis):
            sl = [slice(None), slice(None)]
            sl[axis] = [0, -1]
            uf[tuple(sl)] = 0.0
        else:
            sl0 = [slice(None), slice(None)]
            sl0[axis] = -1
            sl1 = [slice(None), slice(None)]
            sl1[axis] = 0
            uf[tuple(sl0)] = uf[tuple(sl1)]
        new_faces.append(uf)
    u_cell = cells_from_faces(*new_faces)
    grad = pressure_gradient_field(mesh, disc, sol, geo.center_comp)
    return state.replace(u_cell=u_cell, u_face=tuple(new_faces), pressure=sol, grad_p=grad,
                         geometry=geo if state.geometry is not None else None), disc


def _single_phase_geometry(mesh):
    from ..geometry.cutcell import build_geometry
    labels = np.ones(mesh.node_shape, dtype=np.int8)
    crossings = [np.full(mesh.edge_shape(k), np.nan) for k in range(mesh.dim)]
    return build_geometry(mesh, labels, crossings)


def control_volume_divergence(state, disc, dt: float, params: FluidParams, u_star,
                              faces_star=None) -> np.ndarray:
    """Per control volume |Σ measure·u·n| / volume after projection, shape (2,) + cells.

    Partial cells use that component's own face and interface velocities.
    """
    mesh = state.mesh
    geo = disc.geometry
    p = state.pressure.values
    if faces_star is None:
        faces_star = faces_from_cells(mesh, u_star, state.bc)
    out = np.zeros((2,) + tuple(mesh.cells))
    for c in (0, 1):
        flux = np.zeros(mesh.cells)
        for axis in (0, 1):
            ap = geo.aperture[axis][c]
            ustar_c = aperture_face_values(geo, faces_star[axis], axis, c, state.bc.periodic(1 - axis))
            uc = ustar_c - dt * params.beta[c] * disc.face_gradient(axis, c, p)
            f = ap * uc
            flux += np.diff(f, axis=axis)
        if geo.npartial:
            sample = mac_sampler(mesh, faces_star[0], faces_star[1], state.bc)
            uI = np.einsum("pk,pk->p", sample(geo.intfc_centroid), geo.intfc_normal)
            uI = uI - dt * params.beta[c] * disc.normal_derivative(c, p)
            sign = 1.0 if c == 0 else -1.0
            flux[tuple(geo.pcells.T)] += sign * disc.intfc_measure * uI
        vol = geo.comp_volume(c)
        out[c] = np.where(vol > 0, np.abs(flux) / np.where(vol > 0, vol, 1.0), 0.0)
    return out
