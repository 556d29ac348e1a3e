"""Time stepping: convection, implicit viscosity, front motion and projection."""
from __future__ import annotations

import math

import numpy as np

from ..front import filter_along_front, needs_redistribution, propagate, redistribute
from .operators import (advective_derivative, bilinear_cell_sampler, convection_from_faces, delta_cell_sampler, face_states,
                        faces_from_cells, helmholtz_solve, laplacian, mac_sampler, minmod_mask)
from .params import ARKTableau, FluidParams, TimeStepConfig
from .projection import project
from .state import FlowState, geometry_from_front


def cell_properties(state: FlowState, params: FluidParams):
    """(ρ, ν) per cell from the component owning the cell centre."""
    comp = state.center_comp
    rho = params.rho[comp]
    nu = params.mu[comp] / rho
    return rho, nu


def pressure_forcing(state: FlowState, params: FluidParams) -> np.ndarray:
    """-∇p / ρ at cell centres from the last projection (zero before the first)."""
    if state.grad_p is None:
        return np.zeros_like(state.u_cell)
    rho, _ = cell_properties(state, params)
    return -state.grad_p / rho[..., None]


def body_force(state: FlowState, params: FluidParams) -> np.ndarray:
    return np.broadcast_to(np.asarray(params.gravity, dtype=float), state.u_cell.shape)


def convection_term(state: FlowState, dt: float = 0.0, params: FluidParams | None = None,
                    extrapolate: bool = True) -> np.ndarray:
    """(u·∇)u^{n+1/2} at cell centres from Godunov face states.

    With ``extrapolate`` the face states include ½Δt u_t where u_t comes from
    the momentum equation with the latest pressure gradient.
    """
    mesh = state.mesh
    u = state.u_cell
    mm = minmod_mask(mesh, state.geometry, state.bc)
    u_t = None
    if extrapolate and dt > 0.0:
        params = FluidParams() if params is None else params
        _, nu = cell_properties(state, params)
        u_t = (-advective_derivative(mesh, u, state.bc, mm) + pressure_forcing(state, params)
               + nu[..., None] * laplacian(mesh, u, state.bc) + body_force(state, params))
    fx, fy = face_states(mesh, u, state.bc, dt, u_t, mm)
    return convection_from_faces(mesh, fx, fy)


def diffuse_crank_nicolson(state: FlowState, dt: float, params: FluidParams, convection=None,
                           forcing=None, tol: float = 1e-10) -> np.ndarray:
    """u* from (u* - uⁿ)/Δt = -C + ½ν∇²(u* + uⁿ) + g + forcing."""
    mesh = state.mesh
    u = state.u_cell
    _, nu = cell_properties(state, params)
    rhs = u + dt * body_force(state, params)
    if convection is not None:
        rhs = rhs - dt * convection
    if forcing is not None:
        rhs = rhs + dt * forcing
    coef = 0.5 * dt * nu
    if dt == 0.0 or not np.any(coef > 0):
        return np.array(rhs)
    rhs = rhs + coef[..., None] * laplacian(mesh, u, state.bc)
    return np.stack([helmholtz_solve(mesh, rhs[..., k], coef, state.bc, tol, x0=u[..., k])
                     for k in (0, 1)], axis=-1)


def ark2_step(state: FlowState, dt: float, params: FluidParams, tableau: ARKTableau | None = None,
              tol: float = 1e-10, explicit=None) -> np.ndarray:
    """Additive RK: viscosity implicit, convection and pressure forcing explicit.

    ``explicit(u)`` overrides the explicit operator (default -(u·∇)u - ∇p/ρ + g
    without time extrapolation).
    """
    tableau = ARKTableau.l_stable_two_stage() if tableau is None else tableau
    mesh = state.mesh
    _, nu = cell_properties(state, params)
    if explicit is None:
        force = pressure_forcing(state, params) + body_force(state, params)

        def explicit(v):
            return -convection_term(state.replace(u_cell=v), extrapolate=False) + force

    def implicit(v):
        return nu[..., None] * laplacian(mesh, v, state.bc)

    a, b = tableau.a, tableau.b
    y0 = state.u_cell
    F, G = [], []
    y = y0
    for i in range(tableau.stages):
        if i > 0:
            rhs = y0 + dt * sum(a[i, j] * F[j] for j in range(i)) + dt * sum(b[i, j] * G[j] for j in range(i))
            coef = dt * a[i, i] * nu
            if np.any(coef > 0):
                y = np.stack([helmholtz_solve(mesh, rhs[..., k], coef, state.bc, tol, x0=y0[..., k])
                              for k in (0, 1)], axis=-1)
            else:
                y = rhs
        F.append(implicit(y))
        G.append(explicit(y))
    return y


def compute_dt(state: FlowState, config: TimeStepConfig, params: FluidParams) -> float:
    h = state.mesh.h
    umax = float(np.max(np.abs(state.u_cell))) if state.u_cell.size else 0.0
    dt_u = config.cfl * h / umax if umax > 0 else math.inf
    dt_s = config.cfl * math.sqrt(params.rho_mean * h ** 3 / (2.0 * math.pi * params.sigma)) \
        if params.sigma > 0 else math.inf
    return min(dt_u, dt_s, config.dt_max)


def step(state: FlowState, config: TimeStepConfig, params: FluidParams, dt: float | None = None,
         redistribute_front: bool = True, front_sampler: str = "delta",
         front_filter: bool = True) -> FlowState:
    """Advance one step with the configured projection scheme.

    With ``front_filter`` the sampled marker velocities pass through the
    along-front (¼, ½, ¼) filter before the markers move.
    """
    if dt is None:
        dt = compute_dt(state, config, params)
    if dt == 0.0:
        return state
    scheme = config.scheme
    second_order = scheme != "pm1_cn" and state.pressure is not None
    if scheme == "pm2_ark2" and second_order:
        u_tilde = ark2_step(state, dt, params, config.tableau, config.diffusion_tol)
    else:
        conv = convection_term(state, dt, params)
        forcing = pressure_forcing(state, params) if second_order else None
        u_tilde = diffuse_crank_nicolson(state, dt, params, conv, forcing, config.diffusion_tol)
    if second_order:
        u_star = u_tilde - dt * pressure_forcing(state, params)
    else:
        u_star = u_tilde

    front = state.front
    geo = state.geometry
    if front is not None:
        h = state.mesh.h
        if front_sampler == "mac":
            sampler = mac_sampler(state.mesh, state.u_face[0], state.u_face[1], state.bc)
        elif front_sampler == "delta":
            sampler = delta_cell_sampler(state.mesh, state.u_cell, state.bc)
        else:
            # face-averaged cell velocity: the raw face field carries cut-face
            # noise at the 2h scale which the markers would turn into a sawtooth
            sampler = bilinear_cell_sampler(state.mesh, state.u_cell, state.bc)
        if front_filter:
            grid_sampler = sampler

            def sampler(x):
                return filter_along_front(grid_sampler(x))
        front = propagate(front, sampler, dt, h)
        if redistribute_front and needs_redistribution(front, h):
            front = redistribute(front, h)
        geo = geometry_from_front(state.mesh, front)
    moved = state.replace(front=front, geometry=geo)
    # faces carry the velocity state; only the increment is interpolated
    inc = faces_from_cells(state.mesh, u_star - state.u_cell, state.bc)
    faces_star = (state.u_face[0] + inc[0], state.u_face[1] + inc[1])
    out = project(moved, u_star, dt, params, config, faces_star)
    return out.replace(t=state.t + dt, step_index=state.step_index + 1)
