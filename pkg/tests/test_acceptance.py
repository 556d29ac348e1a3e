"""Acceptance criteria 1-7; each test records one PASS/FAIL line printed at session end."""
import time

import numpy as np
import pytest

from ebflow.elliptic import assemble, error_norms, observed_orders, solve
from ebflow.front import init_perturbed_circle
from ebflow.geometry import Mesh
from ebflow.harness import analytic_period_2d, extract_period
from ebflow.harness.config import RunConfig
from ebflow.harness.scenarios import (circle_moment_errors, cyl_exact, cylindrical_sphere_exact_volume,
                                      cylindrical_sphere_volume, laplace_droplet, simulate_bubble, solve_cart,
                                      solve_cyl)
from ebflow.ns import FluidParams, initial_state, project_with_operator
from ebflow.ns.projection import (control_volume_divergence, interface_curvature, pressure_problem,
                                  projection_rhs)

from conftest import (ACCEPTANCE, closure_residual, partition_residual, random_front_geometry,
                      random_sphere_geometry, stencil_trial)

pytestmark = pytest.mark.acceptance

# reference values
TABLE5_L2 = (2.381e-5, 6.59e-6, 1.74e-6)
TABLE3_PERIOD = {20: 3.4602, 40: 3.0476, 80: 2.8962}
PERIOD_TOL = {20: 0.15, 40: 0.12, 80: 0.10}
FORMULA_PERIOD = 2.66


def record(k, ok, text):
    ACCEPTANCE[k] = f"criterion {k} [{'PASS' if ok else 'FAIL'}] {text}"


# ---------------------------------------------------------------- 1
def test_criterion_1_cylindrical_convergence():
    t0 = time.perf_counter()
    l2 = []
    for n in (10, 20, 40):
        geo, disc, sol = solve_cyl(n, "gmres", 1e-12)
        l2.append(error_norms(sol, lambda x, c: cyl_exact(x), geo)[1])
    wall = time.perf_counter() - t0
    orders = observed_orders(l2)[1:]
    ratios = [e / ref for e, ref in zip(l2, TABLE5_L2)]
    monotone = all(b < a for a, b in zip(l2, l2[1:]))
    in_order = all(1.5 <= p <= 2.5 for p in orders)
    in_factor = all(0.25 <= r <= 4.0 for r in ratios)
    ok = monotone and in_order and in_factor
    record(1, ok, "cylindrical elliptic L2 " + ", ".join(f"{e:.3e}" for e in l2)
           + " | orders " + ", ".join(f"{p:.2f}" for p in orders)
           + " | ratio to reference " + ", ".join(f"{r:.2f}" for r in ratios) + f" | {wall:.0f} s")
    assert ok


# ---------------------------------------------------------------- 2 and 6 share the bubble runs
@pytest.fixture(scope="module")
def bubble_runs():
    cache = {}

    def get(n, scheme="pm2_cn"):
        if (n, scheme) not in cache:
            cfg = RunConfig(scenario="bubble2d", scheme=scheme)
            t0 = time.perf_counter()
            rec = simulate_bubble(cfg, n)
            theory = analytic_period_2d(cfg.mode, cfg.sigma, cfg.rho_a, cfg.rho_b, cfg.radius)
            cache[(n, scheme)] = (extract_period(rec, theory), time.perf_counter() - t0)
        return cache[(n, scheme)]
    return get


def test_criterion_2_bubble_periods(bubble_runs):
    periods, walls, parts = {}, {}, []
    ok = True
    for n in (20, 40, 80):
        periods[n], walls[n] = bubble_runs(n)
        rel = abs(periods[n] - TABLE3_PERIOD[n]) / TABLE3_PERIOD[n]
        ok &= rel <= PERIOD_TOL[n]
        parts.append(f"{n}²: T={periods[n]:.4f} ({100 * rel:.1f}% from {TABLE3_PERIOD[n]})")
    dev = [abs(periods[n] - FORMULA_PERIOD) for n in (20, 40, 80)]
    decreasing = dev[0] > dev[1] > dev[2]
    ok &= decreasing
    record(2, ok, "bubble periods " + "; ".join(parts) + " | |T-2.66| "
           + ", ".join(f"{d:.3f}" for d in dev) + f" | 80² wall {walls[80]:.0f} s")
    assert ok


# ---------------------------------------------------------------- 3
def test_criterion_3_laplace_droplet():
    cfg = RunConfig(scenario="laplace_droplet")
    expected = cfg.sigma / cfg.radius
    res = {n: laplace_droplet(cfg, n) for n in (40, 80, 160)}
    rel = abs(res[80][0] - expected) / expected
    u = [res[n][1] for n in (40, 80, 160)]
    ok = rel <= 0.05 and u[0] >= u[1] >= u[2]
    record(3, ok, f"Laplace jump at 80² {res[80][0]:.4f} vs σ/R={expected:.4f} ({100 * rel:.2f}%) | "
           "max |u| " + ", ".join(f"{v:.2e}" for v in u))
    assert ok


# ---------------------------------------------------------------- 4
def test_criterion_4_stencil_exactness():
    rng = np.random.default_rng(4)
    layouts = [(2, False), (3, False), (3, True)]
    worst = {}
    trials = 0
    for dim, cyl in layouts:
        for order in ("linear", "quadratic"):
            errs = [stencil_trial(rng, dim, cyl, order) for _ in range(1000)]
            trials += len(errs)
            worst[(dim, cyl, order)] = max(errs)
    ok = max(worst.values()) <= 1e-10
    record(4, ok, f"stencil exactness over {trials} random trials, worst error {max(worst.values()):.2e} "
           "(2D/3D Cartesian and cylindrical, linear and quadratic)")
    assert ok


# ---------------------------------------------------------------- 5
def test_criterion_5_geometry_oracles():
    circ = [circle_moment_errors(n) for n in (16, 32, 64, 128)]
    area_orders = observed_orders([c[0] for c in circ])[1:]
    perim_orders = observed_orders([c[1] for c in circ])[1:]
    exact = cylindrical_sphere_exact_volume()
    vol_err = [abs(cylindrical_sphere_volume(n) - exact) for n in (10, 20, 40)]
    vol_orders = observed_orders(vol_err)[1:]
    rng = np.random.default_rng(5)
    inv = 0.0
    for _ in range(40):
        g = random_front_geometry(rng)
        inv = max(inv, partition_residual(g), closure_residual(g))
    for cyl in (False, True):
        for _ in range(6):
            g = random_sphere_geometry(rng, cyl)
            inv = max(inv, partition_residual(g), 0.0 if cyl else closure_residual(g))
    ok = (min(area_orders) >= 2.0 and min(perim_orders) >= 2.0 and min(vol_orders) >= 1.0 and inv <= 1e-9)
    record(5, ok, "circle area orders " + ", ".join(f"{p:.2f}" for p in area_orders)
           + ", perimeter orders " + ", ".join(f"{p:.2f}" for p in perim_orders)
           + " | cylindrical sphere volume orders " + ", ".join(f"{p:.2f}" for p in vol_orders)
           + f" | invariants worst {inv:.1e} over 52 random fronts")
    assert ok


# ---------------------------------------------------------------- 6
C6 = {}


def _bubble_state(n, u_scale=1.0):
    mesh = Mesh.square(n, 0.0, 2.0)
    x = mesh.centers
    u = u_scale * np.stack([np.sin(np.pi * x[..., 0] / 2) * np.cos(x[..., 1]),
                            0.3 * np.cos(x[..., 0] * x[..., 1])], -1)
    return initial_state(mesh, init_perturbed_circle(0.8, 0.05, 2, (1.0, 1.0), h=mesh.h), u)


def test_criterion_6_divergence():
    tol, dt = 1e-10, 0.01
    worst = 0.0
    for n in (20, 40, 80):
        st = _bubble_state(n)
        p = FluidParams(1.0, 0.05, 5e-4, 2.5e-7, 0.5)
        new, disc = project_with_operator(st, st.u_cell, dt, p)
        worst = max(worst, float(np.max(control_volume_divergence(new, disc, dt, p, st.u_cell, st.u_face))))
    C6["divergence"] = (worst <= 10 * tol / dt, f"max divergence {worst:.1e} (limit {10 * tol / dt:.0e})")
    assert C6["divergence"][0]


def _idempotence(st, p, dt=0.01):
    a = project_with_operator(st, st.u_cell, dt, p)[0]
    b = project_with_operator(a, a.u_cell, dt, p, faces_star=a.u_face)[0]
    return max(float(np.max(np.abs(fa - fb))) for fa, fb in zip(a.u_face, b.u_face))


def test_criterion_6_idempotence_single_phase():
    st = _bubble_state(40).replace(front=None, geometry=None)
    change = _idempotence(st, FluidParams())
    C6["idem1"] = (change <= 1e-9, f"single-phase re-projection change {change:.1e}")
    assert C6["idem1"][0]


@pytest.mark.xfail(strict=True, reason="aperture-averaged cut-face velocities are not in the range of the "
                                       "two-phase projection; see README, Known limitations")
def test_criterion_6_idempotence_two_phase():
    changes = [_idempotence(_bubble_state(n), FluidParams(1.0, 0.05, 5e-4, 2.5e-7, 0.5)) for n in (20, 40, 80)]
    C6["idem2"] = (max(changes) <= 1e-9, "two-phase re-projection change "
                   + ", ".join(f"{c:.1e}" for c in changes) + " at 20²/40²/80²")
    assert C6["idem2"][0]


def test_criterion_6_pm1_vs_pm2(bubble_runs):
    t2 = bubble_runs(80, "pm2_cn")[0]
    t1 = bubble_runs(80, "pm1_cn")[0]
    rel = abs(t1 - t2) / t2
    C6["pm"] = (rel <= 0.01, f"PM1 {t1:.4f} vs PM2 {t2:.4f} at 80² ({100 * rel:.2f}%)")
    assert C6["pm"][0]


def test_criterion_6_summary():
    parts = [C6.get(k, (False, f"{k} not run")) for k in ("divergence", "idem1", "idem2", "pm")]
    ok = all(p[0] for p in parts)
    record(6, ok, "projection: " + "; ".join(p[1] for p in parts))
    # the two-phase idempotence failure is tracked by its strict xfail
    assert all(p[0] for p in parts if p is not parts[2])


# ---------------------------------------------------------------- 7
def test_criterion_7_iterative_vs_direct():
    worst = 0.0
    for n in (8, 12, 16, 20):
        _, _, it = solve_cart(n, method="gmres", tol=1e-12)
        _, _, dr = solve_cart(n, method="direct")
        worst = max(worst, float(np.max(np.abs(it.values - dr.values))))
    for n in (12, 20):
        st = _bubble_state(n)
        p = FluidParams(1.0, 0.05, 5e-4, 2.5e-7, 0.5)
        kappa = interface_curvature(st.front, st.geometry)
        disc = assemble(st.geometry, pressure_problem(st, p, projection_rhs(st, st.u_cell, 0.01), kappa))
        a = solve(disc.system, tol=1e-12, method="gmres")
        b = solve(disc.system, method="direct")
        worst = max(worst, float(np.max(np.abs(a.values - b.values))))
    ok = worst <= 1e-8
    record(7, ok, f"iterative vs direct on EBM systems up to 20², max difference {worst:.1e}")
    assert ok
