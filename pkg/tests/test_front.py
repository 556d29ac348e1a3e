import math

import numpy as np
import pytest

from ebflow.errors import BadPerturbation, CFLViolation
from ebflow.front import (Front2D, PerturbedCircle, compute_crossings, curvature_all, filter_along_front,
                          init_perturbed_circle, needs_redistribution, normal_and_curvature, propagate,
                          read_front_csv, redistribute, write_front_csv)
from ebflow.geometry import Mesh, build_geometry


def circle(R, M, center=(0.0, 0.0)):
    th = 2 * np.pi * np.arange(M) / M
    return Front2D(np.stack([center[0] + R * np.cos(th), center[1] + R * np.sin(th)], axis=1))


def test_unperturbed_is_regular_polygon():
    f = init_perturbed_circle(0.8, 0.0, 2, npoints=64)
    assert np.allclose(np.linalg.norm(f.points, axis=1), 0.8)


def test_perturbed_circle_extremes():
    f = init_perturbed_circle(0.8, 0.05, 2, npoints=360)
    r = np.linalg.norm(f.points, axis=1)
    assert r[0] == pytest.approx(0.85)
    assert r[180] == pytest.approx(0.85)
    assert r[90] == pytest.approx(0.75)
    assert r[270] == pytest.approx(0.75)


def test_perturbed_circle_area():
    f = init_perturbed_circle(0.8, 0.05, 2, npoints=1024)
    assert f.area() == pytest.approx(math.pi * (0.64 + 0.05 ** 2 / 2), rel=1e-4)


def test_bad_perturbation():
    with pytest.raises(BadPerturbation):
        init_perturbed_circle(0.8, 0.8, 2, npoints=64)


def test_circle_curvature_and_normal():
    f = circle(0.8, 512)
    normals, kappa = curvature_all(f)
    assert np.max(np.abs(kappa - 1.25)) / 1.25 <= 1e-3
    radial = f.points / np.linalg.norm(f.points, axis=1)[:, None]
    assert np.allclose(normals, radial, atol=1e-6)


def test_straight_stencil_zero_curvature():
    x = np.linspace(0, 1, 9)
    pts = np.concatenate([np.stack([x, 0 * x], 1), np.stack([x[::-1], 0 * x + 1.0], 1)[1:-1]])
    n, k = normal_and_curvature(Front2D(pts), 4)
    assert k == pytest.approx(0.0, abs=1e-12)


def test_perturbed_circle_curvature_at_tip():
    f = init_perturbed_circle(0.8, 0.05, 2, npoints=512)
    _, k = normal_and_curvature(f, 0)
    exact = PerturbedCircle(0.8, 0.05, 2).curvature(0.0)
    assert exact == pytest.approx((0.85 ** 2 + 0.85 * 0.2) / 0.85 ** 3)
    assert k == pytest.approx(exact, rel=1e-2)


def test_curvature_converges_first_order_or_better():
    errs = [np.max(np.abs(curvature_all(init_perturbed_circle(0.8, 0.05, 2, npoints=M))[1]
                          - PerturbedCircle(0.8, 0.05, 2).curvature(2 * np.pi * np.arange(M) / M)))
            for M in (64, 128, 256)]
    assert np.all(np.log2(np.array(errs[:-1]) / np.array(errs[1:])) >= 1.0)


def test_propagate_zero_and_uniform():
    f = circle(0.5, 40)
    assert np.array_equal(propagate(f, lambda x: np.zeros_like(x), 0.1).points, f.points)
    g = propagate(f, lambda x: np.tile([1.0, 0.0], (len(x), 1)), 0.1)
    assert np.allclose(g.points - f.points, [0.1, 0.0], atol=1e-15)


def test_propagate_rotation_third_order():
    f = circle(1.0, 64)
    rot = lambda x: np.stack([-x[:, 1], x[:, 0]], 1)
    errs = []
    for dt in (0.02, 0.01):
        g = propagate(f, rot, dt)
        errs.append(np.max(np.abs(np.linalg.norm(g.points, axis=1) - 1.0)))
    # radius error per step is at least third order in dt
    assert errs[0] / errs[1] >= 8.0 * 0.95
    assert errs[1] <= 0.01 ** 3


def test_propagate_cfl_violation():
    f = circle(0.5, 40)
    with pytest.raises(CFLViolation):
        propagate(f, lambda x: np.tile([10.0, 0.0], (len(x), 1)), 0.1, h=0.1)


def test_area_conservation_rigid_rotation():
    h = 0.05
    f = redistribute(init_perturbed_circle(0.5, 0.05, 3, (0.1, 0.0), h=h), h)
    a0 = f.area()
    rot = lambda x: np.stack([-x[:, 1], x[:, 0]], 1)
    dt = 0.5 * h / 0.7
    for _ in range(100):
        f = propagate(f, rot, dt, h)
        if needs_redistribution(f, h):
            f = redistribute(f, h)
    assert abs(f.area() - a0) / a0 <= 5e-3


def test_redistribute_uniform_front_unchanged():
    h = 0.1
    M = 60
    R = M * 0.75 * h / (2 * np.pi)
    f = circle(R, M)
    g = redistribute(f, h)
    assert len(g) == M
    assert np.allclose(g.spacing(), f.spacing(), atol=1e-12)


def test_redistribute_fills_gap_and_keeps_area():
    h = 0.05
    f = circle(0.8, 200)
    pts = np.delete(f.points, np.arange(10, 13), axis=0)
    g = redistribute(Front2D(pts), h)
    assert g.spacing().max() <= 1.5 * h
    c = circle(0.8, 80)
    assert abs(redistribute(c, h).area() - c.area()) / c.area() <= 1e-3


def test_crossings_labels_match_circle():
    m = Mesh.square(40, 0, 2)
    f = circle(0.8, 400, (1.0, 1.0))
    labels, cr = compute_crossings(f, m)
    inside = np.hypot(m.nodes[..., 0] - 1, m.nodes[..., 1] - 1) < 0.8
    polygon_inside = f.contains(m.nodes.reshape(-1, 2)).reshape(inside.shape)
    assert np.array_equal(labels == 0, polygon_inside)
    # polygon and circle agree away from the chord sagitta
    d = np.abs(np.hypot(m.nodes[..., 0] - 1, m.nodes[..., 1] - 1) - 0.8)
    assert np.array_equal((labels == 0)[d > 1e-3], inside[d > 1e-3])
    build_geometry(m, labels, cr)


def test_square_front_crossings_at_midpoints():
    m = Mesh.square(4, 0, 4)
    pts = np.array([[1.5, 1.5], [2.5, 1.5], [2.5, 2.5], [1.5, 2.5]])
    labels, (tx, ty) = compute_crossings(Front2D(pts), m)
    assert np.allclose(tx[~np.isnan(tx)], 0.5)
    assert np.allclose(ty[~np.isnan(ty)], 0.5)
    assert (~np.isnan(tx)).sum() == 2 and (~np.isnan(ty)).sum() == 2


def test_subgrid_front_gives_no_crossings():
    m = Mesh.square(4, 0, 4)
    f = circle(0.2, 16, (1.5, 1.5))
    labels, cr = compute_crossings(f, m)
    assert all(np.isnan(c).all() for c in cr)
    assert np.all(labels == 1)


def test_normal_consistency_with_geometry():
    m = Mesh.square(32, 0, 2)
    f = redistribute(init_perturbed_circle(0.8, 0.05, 2, (1.0, 1.0), npoints=300), m.h)
    labels, cr = compute_crossings(f, m)
    g = build_geometry(m, labels, cr)
    normals, _ = curvature_all(f)
    near = np.argmin(np.linalg.norm(g.intfc_centroid[:, None] - f.points[None], axis=2), axis=1)
    cosang = np.einsum("pd,pd->p", normals[near], g.intfc_normal)
    assert np.all(cosang >= math.cos(math.radians(10)))


def test_front_csv_roundtrip(tmp_path):
    f = circle(0.5, 12)
    write_front_csv(tmp_path / "f.csv", [(0.0, f), (0.5, f)])
    frames = read_front_csv(tmp_path / "f.csv")
    assert [t for t, _ in frames] == [0.0, 0.5]
    assert np.allclose(frames[1][1].points, f.points)


def test_tip_radius():
    f = init_perturbed_circle(0.8, 0.05, 2, (1.0, 1.0), npoints=400)
    assert f.tip_radius() == pytest.approx(0.85, abs=1e-6)


def test_self_intersection():
    assert not circle(1.0, 20).self_intersects()
    bow = Front2D(np.array([[0, 0], [1, 1], [1, 0], [0, 1]], dtype=float))
    assert bow.self_intersects()


def test_filter_along_front_modes():
    M = 64
    k = np.arange(M)
    assert np.allclose(filter_along_front(np.full(M, 3.0)), 3.0)
    assert np.max(np.abs(filter_along_front((-1.0) ** k))) <= 1e-15
    for m in (1, 2, 5):
        mode = np.cos(2 * np.pi * m * k / M)
        assert np.allclose(filter_along_front(mode), math.cos(math.pi * m / M) ** 2 * mode, atol=1e-14)
    xy = np.stack([np.cos(2 * np.pi * k / M), np.sin(2 * np.pi * k / M)], axis=1)
    assert filter_along_front(xy).shape == (M, 2)
