"""Marching-squares / marching-cubes style cutting of single cells.

Cells and faces are cut with straight chords between edge crossings; every
moment is then obtained by boundary integration (divergence theorem) over
oriented triangles in index (coordinate) space.
"""
from __future__ import annotations

import numpy as np

# Degree-4 Dunavant rule on the reference triangle (weights sum to 1).
_TRI_BARY = np.array([
    [0.108103018168070, 0.445948490915965, 0.445948490915965],
    [0.445948490915965, 0.108103018168070, 0.445948490915965],
    [0.445948490915965, 0.445948490915965, 0.108103018168070],
    [0.816847572980459, 0.091576213509771, 0.091576213509771],
    [0.091576213509771, 0.816847572980459, 0.091576213509771],
    [0.091576213509771, 0.091576213509771, 0.816847572980459],
])
_TRI_W = np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)


def cut_quad(labels, has_crossing, center_label=None, points=None):
    """Split a quad into per-component polygons.

    ``labels`` are the four corner components in counter-clockwise order and
    ``has_crossing[k]`` flags the edge from corner k to corner k+1.  Vertex
    ids 0-3 are corners, 4-7 the crossings on edges 0-3.  Returns
    ``{component: [polygon, ...]}`` with CCW vertex-id lists.

    Saddles (four crossings) use ``center_label`` for the connected
    component; without it the pairing with the shorter total chord length
    (from ``points``, an id -> position mapping) wins.
    """
    labels = [int(v) for v in labels]
    crossed = [k for k in range(4) if has_crossing[k]]
    if not crossed:
        return {labels[0]: [[0, 1, 2, 3]]}
    arcs = []
    for n, ci in enumerate(crossed):
        cj = crossed[(n + 1) % len(crossed)]
        corners = []
        k = (ci + 1) % 4
        while True:
            corners.append(k)
            if k == cj:
                break
            k = (k + 1) % 4
        arcs.append((labels[(ci + 1) % 4], [4 + ci] + corners + [4 + cj]))
    if len(crossed) == 2:
        return {lab: [poly] for lab, poly in arcs}
    if len(crossed) != 4:
        raise ValueError("odd number of edge crossings on a quad")
    if center_label is None:
        center_label = _shorter_pairing(arcs, points)
    out = {0: [], 1: []}
    merged = []
    for lab, poly in arcs:
        if lab == center_label:
            merged.extend(poly)
        else:
            out[lab].append(poly)
    out[center_label].append(merged)
    return out


def _shorter_pairing(arcs, points):
    if points is None:
        return arcs[0][0]
    best, best_len = None, np.inf
    for lab in (arcs[0][0], arcs[1][0]):
        # the component that is NOT connected owns the corner triangles whose
        # closing chords separate the regions
        total = 0.0
        for arc_lab, poly in arcs:
            if arc_lab != lab:
                total += np.linalg.norm(np.asarray(points[poly[-1]]) - np.asarray(points[poly[0]]))
        if total < best_len:
            best, best_len = lab, total
    return best


def polygon_chords(poly):
    """Directed chords (crossing-to-crossing edges) of a CCW polygon."""
    out = []
    n = len(poly)
    for m in range(n):
        p, q = poly[m], poly[(m + 1) % n]
        if p >= 4 and q >= 4:
            out.append((p, q))
    return out


def fan_triangles(verts):
    """Fan-triangulate an ordered (possibly non-planar) loop about its vertex mean."""
    verts = np.asarray(verts, dtype=float)
    if len(verts) == 3:
        return verts[None, :, :]
    c = verts.mean(axis=0)
    nxt = np.roll(verts, -1, axis=0)
    return np.stack([np.broadcast_to(c, verts.shape), verts, nxt], axis=1)


def polygon_triangles(verts):
    """Fan from the first vertex; exact for signed polynomial integrals."""
    verts = np.asarray(verts, dtype=float)
    n = len(verts)
    return np.stack([np.broadcast_to(verts[0], (n - 2, verts.shape[1])),
                     verts[1:-1], verts[2:]], axis=1)


def tri_quadrature(tris):
    """Quadrature points (T, 6, 3) and oriented vector areas (T, 3)."""
    tris = np.asarray(tris, dtype=float)
    pts = np.einsum("qk,tkd->tqd", _TRI_BARY, tris)
    area_vec = 0.5 * np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    return pts, area_vec


def region_moments(tris, metric, origin):
    """Metric volume and centroid of the region bounded by outward triangles.

    Cartesian: V = (1/3) ∮ n·x ds.  Cylindrical (r, θ, z): V = (1/4) ∮ n·F ds
    with F = (r, rθ, z) expressed in coordinate space, i.e. the flux of
    (r², rθ, rz).  First moments use ∫ x_k w dV = ∮ G_k n_k with G_k the
    antiderivative of x_k w along axis k.
    """
    if len(tris) == 0:
        return 0.0, np.full(3, np.nan)
    pts, av = tri_quadrature(tris)
    x = pts - origin
    w = _TRI_W
    if metric == "cartesian":
        vol = np.einsum("tqd,td,q->", x, av, w) / 3.0
        first = np.einsum("tqd,td,q->d", 0.5 * x * x, av, w)
    else:
        r = pts[..., 0]
        flux = np.stack([r * r, r * x[..., 1], r * x[..., 2]], axis=-1)
        vol = np.einsum("tqd,td,q->", flux, av, w) / 4.0
        g = np.stack([r ** 3 / 3.0, 0.5 * r * x[..., 1] ** 2, 0.5 * r * x[..., 2] ** 2], axis=-1)
        first = np.einsum("tqd,td,q->d", g, av, w)
    if vol <= 0.0:
        return vol, np.full(3, np.nan)
    cen = first / vol
    if metric == "cartesian":
        cen = cen + origin
    else:
        cen = np.array([cen[0], cen[1] + origin[1], cen[2] + origin[2]])
    return vol, cen


def surface_moments(tris, metric):
    """Physical area, physical vector area and centroid of a triangulated patch."""
    pts, av = tri_quadrature(tris)
    if metric == "cartesian":
        area_t = np.linalg.norm(av, axis=1)
        area = float(area_t.sum())
        vec = av.sum(axis=0)
        cen = np.einsum("tqd,t,q->d", pts, area_t, _TRI_W) / area if area > 0 else pts.mean(axis=(0, 1))
        return area, vec, cen
    r = pts[..., 0]
    # n_phys dS = (r n_r, n_θ, r n_z) dA in coordinate space
    phys = np.stack([r * av[:, None, 0], np.broadcast_to(av[:, None, 1], r.shape), r * av[:, None, 2]], axis=-1)
    dens = np.linalg.norm(phys, axis=-1)
    area = float(np.einsum("tq,q->", dens, _TRI_W))
    vec = np.einsum("tqd,q->d", phys, _TRI_W)
    cen = np.einsum("tqd,tq,q->d", pts, dens, _TRI_W) / area if area > 0 else pts.mean(axis=(0, 1))
    return area, vec, cen


def chain_loops(edges):
    """Chain directed edges (start, end) into closed loops of vertex keys."""
    succ = {}
    for s, e in edges:
        if s in succ:
            raise ValueError("interface patch is not a set of simple loops")
        succ[s] = e
    loops = []
    seen = set()
    for start in succ:
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        cur = succ[start]
        while cur != start:
            if cur in seen or cur not in succ:
                raise ValueError("open interface loop")
            loop.append(cur)
            seen.add(cur)
            cur = succ[cur]
        loops.append(loop)
    return loops
