import math

import numpy as np
import pytest

from ebflow.errors import InconsistentTopology
from ebflow.front import PerturbedCircle, Sphere, surface_crossings
from ebflow.geometry import (CellType, CoordSystem, EdgeCrossing, Mesh, build_geometry, classify_cells,
                             crossings_from_list, cut_cell_moments_2d, cut_cell_moments_3d)
from ebflow.geometry.cutcell import cut_cell_3d

from conftest import circle_geometry, closure_residual


def _sampler(surface):
    return lambda x: (surface.phi(x) >= 0).astype(int)


def test_mesh_spacing_and_cylindrical_guard():
    m = Mesh(CoordSystem.CARTESIAN2D, (0, 0), (2, 1), (4, 5))
    assert np.allclose(m.spacing, [0.5, 0.2])
    with pytest.raises(ValueError):
        Mesh(CoordSystem.CYLINDRICAL3D, (0, 0, 0), (1, 1, 1), (2, 2, 2))


def test_classify_no_interface_all_internal():
    m = Mesh.square(4)
    labels = np.zeros(m.node_shape, dtype=int)
    types = classify_cells(m, [], labels)
    assert np.all(types == CellType.INTERNAL)


def test_classify_circle_matches_corner_sign_test():
    n = 20
    m = Mesh.square(n, 0, 2)
    s = Sphere((1.0, 1.0), 0.8)
    labels, crossings = surface_crossings(s, m)
    types = classify_cells(m, crossings, labels)
    f = (m.nodes[..., 0] - 1) ** 2 + (m.nodes[..., 1] - 1) ** 2 - 0.64
    sg = f >= 0
    corners = np.stack([sg[:-1, :-1], sg[1:, :-1], sg[:-1, 1:], sg[1:, 1:]])
    mixed = corners.any(axis=0) & ~corners.all(axis=0)
    assert np.array_equal(types == CellType.PARTIAL, mixed)


def test_two_crossings_on_one_edge_rejected():
    m = Mesh.square(2)
    with pytest.raises(InconsistentTopology):
        crossings_from_list(m, [EdgeCrossing((0, 0), 0, 0.3, (0, 1)), EdgeCrossing((0, 0), 0, 0.6, (1, 0))])


def test_labels_disagreeing_with_crossings_rejected():
    m = Mesh.square(2)
    labels = np.zeros(m.node_shape, dtype=int)
    with pytest.raises(InconsistentTopology):
        classify_cells(m, [EdgeCrossing((0, 0), 0, 0.5, (0, 1))], labels)


def test_crossing_sides_must_differ():
    with pytest.raises(InconsistentTopology):
        EdgeCrossing((0, 0), 0, 0.5, (1, 1))


def test_corner_triangle_moments():
    m = Mesh.square(1)
    labels = np.ones(m.node_shape, dtype=int)
    labels[0, 0] = 0
    cr = [EdgeCrossing((0, 0), 0, 0.5, (0, 1)), EdgeCrossing((0, 0), 1, 0.5, (0, 1))]
    g = cut_cell_moments_2d(m, labels, cr, (0, 0))
    assert g["volume"][0] == pytest.approx(0.125, abs=1e-12)
    assert g["volume"][1] == pytest.approx(0.875, abs=1e-12)
    assert g["intfc_area"] == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
    assert np.allclose(g["intfc_normal"], np.array([1, 1]) / math.sqrt(2), atol=1e-12)
    # b in the corner flips the normal
    g2 = cut_cell_moments_2d(m, 1 - labels, [EdgeCrossing((0, 0), 0, 0.5, (1, 0)),
                                             EdgeCrossing((0, 0), 1, 0.5, (1, 0))], (0, 0))
    assert np.allclose(g2["intfc_normal"], -np.array([1, 1]) / math.sqrt(2), atol=1e-12)


def test_chord_on_edge_limit():
    m = Mesh.square(1)
    labels = np.array([[0, 1], [0, 1]])
    cr = [EdgeCrossing((0, 0), 1, 0.0, (0, 1)), EdgeCrossing((1, 0), 1, 0.0, (0, 1))]
    g = cut_cell_moments_2d(m, labels, cr, (0, 0))
    assert g["volume"][0] == pytest.approx(0.0, abs=1e-5)
    assert g["volume"][1] == pytest.approx(1.0, abs=1e-5)


def test_face_flux_weight_cut_and_uncut():
    m = Mesh.square(1, 0, 2)
    labels = np.array([[0, 1], [0, 1]])
    cr = [EdgeCrossing((0, 0), 1, 0.25, (0, 1)), EdgeCrossing((1, 0), 1, 0.25, (0, 1))]
    g = build_geometry(m, labels, cr)
    ap, cen = g.face_flux_weight(0, (0, 0), 0)
    assert ap == pytest.approx(0.5)
    assert cen[1] == pytest.approx(0.25)
    # the bottom face lies entirely in a
    ap, cen = g.face_flux_weight(1, (0, 0), 0)
    assert ap == pytest.approx(2.0)
    assert np.allclose(cen, [1.0, 0.0])


def test_face_flux_weight_cylindrical_uncut():
    m = Mesh(CoordSystem.CYLINDRICAL3D, (1, 0, 0), (2, 0.5, 0.4), (2, 1, 1))
    labels = np.zeros(m.node_shape, dtype=int)
    g = build_geometry(m, labels, [np.full(m.edge_shape(k), np.nan) for k in range(3)])
    ap, cen = g.face_flux_weight(0, (1, 0, 0), 0)
    assert ap == pytest.approx(1.5 * 0.5 * 0.4)
    assert np.allclose(cen, [1.5, 0.25, 0.2])


def test_uncut_cells_through_boundary_integration():
    labels = np.zeros((2, 2, 2), dtype=int)
    nan = [np.full((1, 2, 2), np.nan), np.full((2, 1, 2), np.nan), np.full((2, 2, 1), np.nan)]
    box = Mesh(CoordSystem.CARTESIAN3D, (0, 0, 0), (1, 1, 1), (1, 1, 1))
    res = cut_cell_3d(box, labels, nan, (0, 0, 0))
    assert res["volume"][0] == pytest.approx(1.0, abs=1e-13)
    r1, r2, t1, t2, z1, z2 = 1.0, 1.7, 0.1, 0.6, -0.2, 0.3
    cyl = Mesh(CoordSystem.CYLINDRICAL3D, (r1, t1, z1), (r2, t2, z2), (1, 1, 1))
    res = cut_cell_3d(cyl, labels, nan, (0, 0, 0), metric="cylindrical")
    assert res["volume"][0] == pytest.approx(0.5 * (r2 ** 2 - r1 ** 2) * (t2 - t1) * (z2 - z1), rel=1e-12)


def test_single_partial_3d_cell_partition():
    m = Mesh(CoordSystem.CARTESIAN3D, (0, 0, 0), (1, 1, 1), (1, 1, 1))
    s = Sphere((0.1, 0.2, 0.15), 0.6)
    labels, cr = surface_crossings(s, m)
    res = cut_cell_moments_3d(m, labels, cr, (0, 0, 0), sampler=_sampler(s))
    assert sum(res["volume"]) == pytest.approx(1.0, rel=1e-12)
    assert np.linalg.norm(res["intfc_normal"]) == pytest.approx(1.0)


def test_circle_area_converges_second_order():
    errs = []
    for n in (20, 40, 80):
        g = circle_geometry(n)
        errs.append(abs(g.comp_volume(0).sum() - math.pi * 0.64))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.7), orders


def test_circle_perimeter_converges():
    errs = []
    for n in (20, 40, 80):
        g = circle_geometry(n)
        errs.append(abs(g.intfc_area.sum() - 2 * math.pi * 0.8))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 0.7), orders


def test_partition_and_orientation_circle():
    g = circle_geometry(32)
    m = g.mesh
    full = m.cell_volume()[tuple(g.pcells.T)]
    assert np.allclose(g.volume.sum(axis=1), full, rtol=1e-9)
    for k in range(2):
        assert np.allclose(g.aperture[k][0] + g.aperture[k][1], m.face_measure(k), rtol=1e-9)
    assert np.allclose(np.linalg.norm(g.intfc_normal, axis=1), 1.0)
    dc = g.centroid[:, 1] - g.centroid[:, 0]
    assert np.all(np.einsum("pd,pd->p", g.intfc_normal, dc) > 0)
    assert closure_residual(g) < 1e-9


def test_metric_consistency_cartesian_path():
    cells = (6, 6, 6)
    lo, hi = (1.0, 0.0, 0.0), (1.628, 0.628, 0.628)
    s = Sphere((1.314, 0.314, 0.314), 0.2)
    cyl = Mesh(CoordSystem.CYLINDRICAL3D, lo, hi, cells)
    car = Mesh(CoordSystem.CARTESIAN3D, lo, hi, cells)
    la, ca = surface_crossings(s, cyl)
    lb, cb = surface_crossings(s, car)
    g1 = build_geometry(cyl, la, ca, sampler=_sampler(s), metric="cartesian")
    g2 = build_geometry(car, lb, cb, sampler=_sampler(s))
    assert np.allclose(g1.volume, g2.volume, rtol=0, atol=1e-12)
    assert np.allclose(g1.intfc_vector, g2.intfc_vector, rtol=0, atol=1e-12)


def test_debug_csv(tmp_path):
    g = circle_geometry(8)
    path = tmp_path / "g.csv"
    g.write_debug_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,j,comp,volume,iface_measure,nx,ny,cx,cy"
    assert len(lines) == 1 + 2 * g.npartial


def test_perturbed_circle_geometry_area():
    s = PerturbedCircle(0.8, 0.05, 2, (1.0, 1.0))
    m = Mesh.square(64, 0, 2)
    labels, cr = surface_crossings(s, m)
    g = build_geometry(m, labels, cr, sampler=_sampler(s))
    assert g.comp_volume(0).sum() == pytest.approx(s.area(), rel=2e-3)
