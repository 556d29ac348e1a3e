"""Scenario drivers: convergence studies, droplet oscillation and static droplet.

Every driver takes a RunConfig and an output directory, writes its CSV
tables plus ``summary.csv`` and returns the rows it wrote.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..elliptic import (EllipticInterfaceProblem, all_faces, assemble, dirichlet, error_norms,
                        observed_orders, solve, write_convergence_csv)
from ..front import (Front2D, Sphere, init_perturbed_circle, surface_crossings,
                     write_front_csv)
from ..geometry import CoordSystem, Mesh, build_geometry
from ..ns import compute_dt, initial_state, project_with_operator, step, write_frame_csv
from .analysis import OscillationRecord, analytic_period_2d, extract_period
from .config import RunConfig

# manufactured cylindrical problem: sphere in (r, θ, z) index space
CYL_LOWER = (1.0, 0.0, 0.0)
CYL_UPPER = (1.628, 0.628, 0.628)
CYL_SPHERE = ((1.314, 0.314, 0.314), 0.2)
CYL_RHO = (0.811, 1.03)

# manufactured Cartesian problem on the unit square
CART_CIRCLE = ((0.51, 0.47), 0.25)


def _out(out_dir) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_summary(out_dir, scenario: str, rows) -> None:
    """``summary.csv`` with one ``scenario,mesh,quantity,value`` line per number."""
    with open(Path(out_dir) / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "mesh", "quantity", "value"])
        for r in rows:
            for k, v in r.items():
                if k != "mesh":
                    w.writerow([scenario, r["mesh"], k, repr(float(v))])


def _sampler(surface):
    return lambda x: (surface.phi(x) >= 0).astype(int)


# ---------------------------------------------------------------- geometry
def circle_moment_errors(n: int, radius: float = 0.8, center=(1.0, 1.0), domain=(0.0, 2.0)):
    """(|Σ volume_a − πR²|, |Σ interface length − 2πR|) for an analytic circle on n×n."""
    surface = Sphere(center, radius)
    mesh = Mesh.square(n, *domain)
    labels, crossings = surface_crossings(surface, mesh)
    geo = build_geometry(mesh, labels, crossings, sampler=_sampler(surface))
    area = float(geo.comp_volume(0).sum())
    length = float(np.sum(geo.intfc_area))
    return abs(area - math.pi * radius ** 2), abs(length - 2 * math.pi * radius)


def cylindrical_sphere_volume(n: int) -> float:
    """Metric-weighted inside volume of the manufactured-problem sphere on n³."""
    surface = Sphere(*CYL_SPHERE)
    mesh = Mesh(CoordSystem.CYLINDRICAL3D, CYL_LOWER, CYL_UPPER, (n, n, n))
    labels, crossings = surface_crossings(surface, mesh)
    geo = build_geometry(mesh, labels, crossings, sampler=_sampler(surface))
    return float(geo.comp_volume(0).sum())


def cylindrical_sphere_exact_volume() -> float:
    """∫ r dr dθ dz over the ball: r is linear so the integral is r_centre·(4/3)πR³."""
    (rc, _, _), R = CYL_SPHERE
    return rc * 4.0 / 3.0 * math.pi * R ** 3


def run_geometry_check(config: RunConfig, out_dir) -> list:
    """Summed cut-cell moments of a circle (2D) and a cylindrical-metric sphere (3D)."""
    out = _out(out_dir)
    rows = []
    exact3 = cylindrical_sphere_exact_volume()
    for n in config.meshes:
        ea, el = circle_moment_errors(n, config.radius, (0.5 * sum(config.domain),) * 2, config.domain)
        row = {"mesh": n, "area_error": ea, "perimeter_error": el}
        if n <= 40:
            row["cyl_volume_error"] = abs(cylindrical_sphere_volume(n) - exact3)
        rows.append(row)
    keys = ["area_error", "perimeter_error", "cyl_volume_error"]
    with open(out / "geometry_convergence.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mesh"] + keys + ["order_" + k for k in keys])
        orders = {k: observed_orders([r.get(k, math.nan) for r in rows]) for k in keys}
        for i, r in enumerate(rows):
            vals = [r.get(k, math.nan) for k in keys]
            w.writerow([r["mesh"]] + [_fmt(v) for v in vals] + [_fmt(orders[k][i]) for k in keys])
    write_summary(out, config.scenario, rows)
    return rows


def _fmt(v) -> str:
    return "" if not math.isfinite(v) else repr(float(v))


# ---------------------------------------------------------------- elliptic
def cyl_exact(x):
    return np.exp(-(x[..., 0] ** 2 + x[..., 1] ** 2 + x[..., 2] ** 2) / 5.0)


def cyl_gradient(x):
    """(∂r, (1/r)∂θ, ∂z) of the exact solution."""
    p = cyl_exact(x)
    r = x[..., 0]
    return np.stack([-0.4 * r * p, -0.4 * x[..., 1] * p / r, -0.4 * x[..., 2] * p], axis=-1)


def cyl_laplacian(x):
    r, t, z = x[..., 0], x[..., 1], x[..., 2]
    p = cyl_exact(x)
    # p_rr + p_r/r + p_θθ/r² + p_zz
    return p * ((-0.4 + 0.16 * r * r) - 0.4 + (-0.4 + 0.16 * t * t) / r ** 2 + (-0.4 + 0.16 * z * z))


def _flux_jump(beta, gradient):
    return lambda x, n: (beta[1] - beta[0]) * np.einsum("pd,pd->p", gradient(x), n)


def cyl_problem(order: int = 1) -> EllipticInterfaceProblem:
    beta = (1.0 / CYL_RHO[0], 1.0 / CYL_RHO[1])
    return EllipticInterfaceProblem(
        beta=beta, rhs=lambda x, c: beta[c] * cyl_laplacian(x), jump_J1=0.0,
        jump_J2=_flux_jump(beta, cyl_gradient), exterior_bc=all_faces(3, dirichlet(cyl_exact, order)))


def solve_cyl(n: int, method: str = "gmres", tol: float = 1e-10, order: int = 1):
    """Assemble and solve the cylindrical manufactured problem on n³; returns (geometry, disc, solution)."""
    surface = Sphere(*CYL_SPHERE)
    mesh = Mesh(CoordSystem.CYLINDRICAL3D, CYL_LOWER, CYL_UPPER, (n, n, n))
    labels, crossings = surface_crossings(surface, mesh)
    geo = build_geometry(mesh, labels, crossings, sampler=_sampler(surface))
    disc = assemble(geo, cyl_problem(order))
    return geo, disc, solve(disc.system, tol=tol, method=method)


def cart_exact(x):
    return np.sin(x[..., 0]) * np.cos(x[..., 1]) + x[..., 0] ** 2


def cart_gradient(x):
    return np.stack([np.cos(x[..., 0]) * np.cos(x[..., 1]) + 2 * x[..., 0],
                     -np.sin(x[..., 0]) * np.sin(x[..., 1])], axis=-1)


def cart_laplacian(x):
    return -2.0 * np.sin(x[..., 0]) * np.cos(x[..., 1]) + 2.0


def solve_cart(n: int, beta=(1.0, 20.0), method: str = "gmres", tol: float = 1e-10, order: int = 1):
    """Cartesian 2D manufactured interface problem on the unit square, n×n cells."""
    surface = Sphere(*CART_CIRCLE)
    mesh = Mesh.square(n, 0.0, 1.0)
    labels, crossings = surface_crossings(surface, mesh)
    geo = build_geometry(mesh, labels, crossings, sampler=_sampler(surface))
    problem = EllipticInterfaceProblem(
        beta=tuple(beta), rhs=lambda x, c: beta[c] * cart_laplacian(x), jump_J1=0.0,
        jump_J2=_flux_jump(beta, cart_gradient), exterior_bc=all_faces(2, dirichlet(cart_exact, order)))
    disc = assemble(geo, problem)
    return geo, disc, solve(disc.system, tol=tol, method=method)


def _convergence(config: RunConfig, out_dir, solver, exact) -> list:
    out = _out(out_dir)
    rows = []
    for n in config.meshes:
        geo, disc, sol = solver(n)
        linf, l2, l1 = error_norms(sol, lambda x, c: exact(x), geo)
        rows.append({"mesh": n, "n_unknowns": disc.umap.n, "Linf": linf, "L2": l2, "L1": l1})
    write_convergence_csv(out / "convergence.csv", rows)
    write_summary(out, config.scenario, rows)
    return rows


def run_elliptic_cyl_convergence(config: RunConfig, out_dir) -> list:
    """Manufactured sphere-in-sector problem in cylindrical coordinates."""
    def solver(n):
        return solve_cyl(n, config.elliptic_solver, config.elliptic_tol, config.dirichlet_order)
    return _convergence(config, out_dir, solver, cyl_exact)


def run_elliptic_cart_manufactured(config: RunConfig, out_dir) -> list:
    """Manufactured circle-in-square problem with β = 1/ρ from the fluid settings."""
    beta = (1.0 / config.rho_a, 1.0 / config.rho_b)

    def solver(n):
        return solve_cart(n, beta, config.elliptic_solver, config.elliptic_tol, config.dirichlet_order)
    return _convergence(config, out_dir, solver, cart_exact)


# ---------------------------------------------------------------- flow
def bubble_front(config: RunConfig, mesh: Mesh) -> Front2D:
    c = 0.5 * sum(config.domain)
    return init_perturbed_circle(config.radius, config.epsilon, config.mode, (c, c), h=mesh.h)


def simulate_bubble(config: RunConfig, n: int, out_dir=None) -> OscillationRecord:
    """Run the perturbed droplet on n×n to t_end, recording the tip radius every step."""
    mesh = Mesh.square(n, *config.domain)
    params, ts = config.fluid(), config.timestep()
    state = initial_state(mesh, bubble_front(config, mesh))
    record = OscillationRecord()
    record.append(state.t, state.front.tip_radius())
    fronts = []
    while state.t < config.t_end - 1e-12:
        dt = min(compute_dt(state, ts, params), config.t_end - state.t)
        state = step(state, ts, params, dt)
        record.append(state.t, state.front.tip_radius())
        if out_dir is not None and config.frame_every and state.step_index % config.frame_every == 0:
            write_frame_csv(Path(out_dir) / f"frame_{n}_{state.step_index:06d}.csv", state)
            fronts.append((state.t, state.front))
    if fronts:
        write_front_csv(Path(out_dir) / f"front_{n}.csv", fronts)
    return record


def run_bubble2d(config: RunConfig, out_dir) -> list:
    """Droplet oscillation periods per mesh against the linear theory."""
    out = _out(out_dir)
    theory = analytic_period_2d(config.mode, config.sigma, config.rho_a, config.rho_b, config.radius)
    rows = []
    for n in config.meshes:
        record = simulate_bubble(config, n, out)
        with open(out / f"tip_radius_{n}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "tip_radius"])
            w.writerows([repr(t), repr(r)] for t, r in zip(record.t, record.radius))
        period = extract_period(record, theory)
        rows.append({"mesh": n, "period": period, "theory": theory,
                     "abs_deviation": abs(period - theory)})
    with open(out / "periods.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mesh", "period", "theory", "abs_deviation"])
        for r in rows:
            w.writerow([r["mesh"], repr(r["period"]), repr(r["theory"]), repr(r["abs_deviation"])])
    write_summary(out, config.scenario, rows)
    return rows


def laplace_front(radius: float, center, h: float, wobble: float = 0.3) -> Front2D:
    """Circle markers at deliberately uneven angular spacing.

    Markers lie exactly on the circle; the uneven spacing gives the discrete
    curvature an O(h²) error so that the pressure/curvature balance is not
    trivially exact.
    """
    m = max(16, int(math.ceil(2 * math.pi * radius / (0.75 * h))))
    theta = 2 * math.pi * np.arange(m) / m
    theta = theta + wobble * (2 * math.pi / m) * np.sin(3 * theta)
    return Front2D(np.stack([center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)], axis=1))


def laplace_droplet(config: RunConfig, n: int):
    """One projection of the quiescent droplet; returns (jump, max |u|)."""
    mesh = Mesh.square(n, *config.domain)
    c = 0.5 * sum(config.domain)
    state = initial_state(mesh, laplace_front(config.radius, (c, c), mesh.h))
    params, ts = config.fluid(), config.timestep()
    dt = compute_dt(state, ts, params)
    new, _ = project_with_operator(state, np.zeros_like(state.u_cell), dt, params, ts)
    p = new.pressure
    jump = float(np.mean(p.intfc_values(0)) - np.mean(p.intfc_values(1)))
    umax = max(float(np.max(np.abs(f))) for f in new.u_face)
    return jump, umax


def run_laplace_droplet(config: RunConfig, out_dir) -> list:
    out = _out(out_dir)
    rows = []
    expected = config.sigma / config.radius
    for n in config.meshes:
        jump, umax = laplace_droplet(config, n)
        rows.append({"mesh": n, "jump": jump, "expected": expected, "max_velocity": umax})
    with open(out / "laplace.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mesh", "jump", "expected", "max_velocity"])
        for r in rows:
            w.writerow([r["mesh"], repr(r["jump"]), repr(r["expected"]), repr(r["max_velocity"])])
    write_summary(out, config.scenario, rows)
    return rows


RUNNERS = {
    "geometry_check": run_geometry_check,
    "elliptic_cyl_convergence": run_elliptic_cyl_convergence,
    "elliptic_cart_manufactured": run_elliptic_cart_manufactured,
    "bubble2d": run_bubble2d,
    "laplace_droplet": run_laplace_droplet,
}


def run(config: RunConfig, out_dir=None) -> list:
    return RUNNERS[config.scenario](config, config.output_dir if out_dir is None else out_dir)
