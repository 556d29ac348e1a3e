"""Cell classification and cut-cell geometric moments.

Components are labelled 0 (``a``) and 1 (``b``).  Edge crossings are stored
per axis as float arrays of shape ``mesh.edge_shape(axis)`` holding the
crossing parameter in (0, 1) measured from the lower node, NaN where the edge
is not crossed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateCut, InconsistentTopology
from . import marching
from .mesh import Mesh

SNAP_EPS = 1e-6


class CellType(enum.IntEnum):
    EXTERNAL = 0
    INTERNAL = 1
    BOUNDARY = 2
    PARTIAL = 3


@dataclass(frozen=True)
class EdgeCrossing:
    """A single interface crossing on the grid edge starting at ``node``."""

    node: tuple
    axis: int
    position: float
    components: tuple

    def __post_init__(self):
        if self.components[0] == self.components[1]:
            raise InconsistentTopology("side components of a crossing must differ")


def crossings_from_list(mesh: Mesh, crossings) -> list:
    arrays = [np.full(mesh.edge_shape(k), np.nan) for k in range(mesh.dim)]
    for c in crossings:
        arr = arrays[c.axis]
        node = tuple(c.node)
        if not np.isnan(arr[node]):
            raise InconsistentTopology(f"edge {node} axis {c.axis} crossed more than once")
        arr[node] = c.position
    return arrays


def crossings_to_list(mesh: Mesh, crossings, labels) -> list:
    out = []
    for k in range(mesh.dim):
        for node in zip(*np.nonzero(~np.isnan(crossings[k]))):
            node = tuple(int(v) for v in node)
            end = list(node)
            end[k] += 1
            out.append(EdgeCrossing(node, k, float(crossings[k][node]),
                                    (int(labels[node]), int(labels[tuple(end)]))))
    return out


def _as_arrays(mesh, crossings):
    if isinstance(crossings, (list, tuple)) and crossings and isinstance(crossings[0], np.ndarray):
        return [np.asarray(c, dtype=float) for c in crossings]
    return crossings_from_list(mesh, crossings)


def _edge_lo_hi(arr_shape, axis):
    lo = tuple(slice(0, n) if k == axis else slice(None) for k, n in enumerate(arr_shape))
    hi = tuple(slice(1, n + 1) if k == axis else slice(None) for k, n in enumerate(arr_shape))
    return lo, hi


def check_topology(mesh: Mesh, labels, crossings) -> None:
    for k in range(mesh.dim):
        lo, hi = _edge_lo_hi(mesh.edge_shape(k), k)
        flips = labels[lo] != labels[hi]
        crossed = ~np.isnan(crossings[k])
        if np.any(flips != crossed):
            bad = np.argwhere(flips != crossed)[0]
            raise InconsistentTopology(
                f"corner labels and crossings disagree on axis-{k} edge {tuple(bad)}")


def partial_mask(mesh: Mesh, crossings) -> np.ndarray:
    """Cells with at least one crossed edge."""
    mask = np.zeros(mesh.cells, dtype=bool)
    for k in range(mesh.dim):
        crossed = ~np.isnan(crossings[k])
        others = [a for a in range(mesh.dim) if a != k]
        for offs in np.ndindex(*(2,) * len(others)):
            sl = [slice(None)] * mesh.dim
            for a, o in zip(others, offs):
                sl[a] = slice(o, o + mesh.cells[a])
            mask |= crossed[tuple(sl)]
    return mask


def classify_cells(mesh: Mesh, crossings, corner_components, external=None) -> np.ndarray:
    """Assign a CellType to every cell.

    ``external`` optionally flags cells outside a grid-aligned exterior
    domain; their in-domain neighbours are still ``internal`` since the
    exterior boundary then coincides with cell faces.
    """
    labels = np.asarray(corner_components)
    arrays = _as_arrays(mesh, crossings)
    check_topology(mesh, labels, arrays)
    types = np.full(mesh.cells, CellType.INTERNAL, dtype=np.int8)
    types[partial_mask(mesh, arrays)] = CellType.PARTIAL
    if external is not None:
        types[np.asarray(external, dtype=bool)] = CellType.EXTERNAL
    return types


def snap_crossings(crossings, eps=SNAP_EPS):
    out = []
    for arr in crossings:
        arr = np.array(arr, dtype=float)
        ok = ~np.isnan(arr)
        if np.any(np.isinf(arr)):
            raise DegenerateCut("non-finite crossing parameter")
        arr[ok] = np.clip(arr[ok], eps, 1.0 - eps)
        out.append(arr)
    return out


@dataclass
class CutGeometry:
    """Geometry tables for one front position on one mesh.

    Partial-cell arrays are indexed by ``p = pidx[cell]``.  ``volume`` and
    apertures are metric measures; centroids are in coordinate space.
    ``intfc_vector`` is the physical vector area ∫ n dS (oriented a → b) and
    ``intfc_normal`` its unit direction.
    """

    mesh: Mesh
    metric: str
    labels: np.ndarray
    crossings: list
    cell_type: np.ndarray
    center_comp: np.ndarray
    pidx: np.ndarray
    pcells: np.ndarray
    volume: np.ndarray
    centroid: np.ndarray
    intfc_area: np.ndarray
    intfc_vector: np.ndarray
    intfc_normal: np.ndarray
    intfc_centroid: np.ndarray
    aperture: list
    face_comp: list
    cut_faces: list = field(default_factory=list)
    cut_face_centroid: list = field(default_factory=list)

    @property
    def npartial(self) -> int:
        return len(self.pcells)

    def comp_volume(self, comp: int) -> np.ndarray:
        """Metric volume of component ``comp`` in every cell."""
        full = np.broadcast_to(self.mesh.cell_volume(), self.mesh.cells)
        vol = np.where(self.center_comp == comp, full, 0.0)
        vol = np.where(self.cell_type == CellType.EXTERNAL, 0.0, vol)
        if self.npartial:
            vol[tuple(self.pcells.T)] = self.volume[:, comp]
        return vol

    def has_comp(self, comp: int) -> np.ndarray:
        partial = self.cell_type == CellType.PARTIAL
        whole = (self.cell_type != CellType.EXTERNAL) & ~partial & (self.center_comp == comp)
        return whole | partial

    def cut_face_lookup(self, axis: int) -> dict:
        faces = self.cut_faces[axis]
        return {tuple(int(v) for v in f): n for n, f in enumerate(faces)}

    def face_flux_weight(self, axis: int, face, comp: int):
        """(aperture, centroid) of the ``comp`` portion of a face."""
        face = tuple(int(v) for v in face)
        ap = float(self.aperture[axis][(comp,) + face])
        center = self.mesh.face_center(axis, face)
        if self.face_comp[axis][face] >= 0:
            if ap == 0.0:
                return 0.0, center
            if self.metric == "cylindrical" and axis == 2:
                center = center.copy()
                r0 = center[0] - 0.5 * self.mesh.spacing[0]
                r1 = r0 + self.mesh.spacing[0]
                center[0] = (2.0 / 3.0) * (r1 ** 3 - r0 ** 3) / (r1 ** 2 - r0 ** 2)
            return ap, center
        n = self.cut_face_lookup(axis)[face]
        return ap, self.cut_face_centroid[axis][n, comp].copy()

    def debug_rows(self):
        """Rows ``i,j[,k],comp,volume,iface_measure,nx,ny[,nz],cx,cy[,cz]``."""
        rows = []
        for p, cell in enumerate(self.pcells):
            for comp in (0, 1):
                rows.append(list(int(v) for v in cell) + [comp, float(self.volume[p, comp]),
                            float(self.intfc_area[p])] + list(map(float, self.intfc_normal[p]))
                            + list(map(float, self.centroid[p, comp])))
        return rows

    def write_debug_csv(self, path) -> None:
        d = self.mesh.dim
        idx = ["i", "j", "k"][:d]
        head = idx + ["comp", "volume", "iface_measure"] + ["nx", "ny", "nz"][:d] + ["cx", "cy", "cz"][:d]
        with open(path, "w") as fh:
            fh.write(",".join(head) + "\n")
            for row in self.debug_rows():
                fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def build_geometry(mesh: Mesh, labels, crossings, sampler=None, metric=None,
                   external=None) -> CutGeometry:
    """Classify cells and compute every cut-cell moment.

    ``sampler(points) -> labels`` resolves saddle configurations (cell centre
    in 2D, face centre in 3D) and the component owning partial cell centres.
    ``metric`` defaults to the mesh's own; passing ``"cartesian"`` for a
    cylindrical mesh evaluates it with flat formulas.
    """
    labels = np.asarray(labels, dtype=np.int8)
    arrays = snap_crossings(_as_arrays(mesh, crossings))
    for arr in arrays:
        if np.any(np.isinf(arr)):
            raise DegenerateCut("non-finite crossing parameter")
    if metric is None:
        metric = "cylindrical" if mesh.cylindrical else "cartesian"
    if metric == "cylindrical" and not mesh.cylindrical:
        raise ValueError("cylindrical metric needs a cylindrical mesh")
    cell_type = classify_cells(mesh, arrays, labels, external)
    pcells = np.argwhere(cell_type == CellType.PARTIAL)
    pidx = np.full(mesh.cells, -1, dtype=np.int64)
    pidx[tuple(pcells.T)] = np.arange(len(pcells))
    center_comp = labels[tuple(slice(0, n) for n in mesh.cells)].copy()
    if mesh.dim == 2:
        geo = _build_2d(mesh, labels, arrays, pcells, sampler)
    else:
        geo = _build_3d(mesh, labels, arrays, pcells, sampler, metric)
    if len(pcells):
        if sampler is not None:
            cc = np.asarray(sampler(mesh.centers[tuple(pcells.T)]), dtype=np.int8)
        else:
            cc = np.argmax(geo["volume"] / geo["volume"].sum(axis=1, keepdims=True), axis=1)
        center_comp[tuple(pcells.T)] = cc
    return CutGeometry(mesh=mesh, metric=metric, labels=labels, crossings=arrays,
                       cell_type=cell_type, center_comp=center_comp, pidx=pidx,
                       pcells=pcells, **geo)


def _uncut_faces(mesh, labels, crossings, metric):
    """Face component and full apertures for faces without crossings."""
    dim = mesh.dim
    face_comp, aperture, cut = [], [], []
    for k in range(dim):
        shape = mesh.face_shape(k)
        sl = tuple(slice(0, n) for n in shape)
        comp = labels[sl].astype(np.int8).copy()
        is_cut = np.zeros(shape, dtype=bool)
        for a in range(dim):
            if a == k:
                continue
            others = [b for b in range(dim) if b not in (k, a)]
            arr = ~np.isnan(crossings[a])
            for offs in np.ndindex(*(2,) * len(others)):
                s = [slice(None)] * dim
                s[k] = slice(0, shape[k])
                s[a] = slice(0, shape[a])
                for b, o in zip(others, offs):
                    s[b] = slice(o, o + shape[b])
                is_cut |= arr[tuple(s)]
        comp[is_cut] = -1
        if metric == "cylindrical":
            full = mesh.face_measure(k)
        else:
            full = np.full(shape, float(np.prod([mesh.spacing[b] for b in range(dim) if b != k])))
        ap = np.zeros((2,) + shape)
        ap[0] = np.where(comp == 0, full, 0.0)
        ap[1] = np.where(comp == 1, full, 0.0)
        face_comp.append(comp)
        aperture.append(ap)
        cut.append(np.argwhere(is_cut))
    return face_comp, aperture, cut


# ---------------------------------------------------------------- 2D (vectorised)

def _build_2d(mesh, labels, crossings, pcells, sampler):
    hx, hy = mesh.spacing
    face_comp, aperture, cut_faces = _uncut_faces(mesh, labels, crossings, "cartesian")
    cut_cen = []
    # faces normal to axis k are the edges parallel to the other axis
    for k in range(2):
        e = 1 - k
        faces = cut_faces[k]
        t = crossings[e][tuple(faces.T)]
        start = labels[tuple(faces.T)]
        length = mesh.spacing[e]
        lo = np.array(mesh.lower)[None, :] + faces * mesh.spacing
        c_first = lo.copy()
        c_first[:, e] += 0.5 * t * length
        c_second = lo.copy()
        c_second[:, e] += 0.5 * (1.0 + t) * length
        cen = np.empty((len(faces), 2, 2))
        first_is_a = start == 0
        cen[:, 0] = np.where(first_is_a[:, None], c_first, c_second)
        cen[:, 1] = np.where(first_is_a[:, None], c_second, c_first)
        ap = aperture[k]
        ap[(0,) + tuple(faces.T)] = np.where(first_is_a, t, 1.0 - t) * length
        ap[(1,) + tuple(faces.T)] = np.where(first_is_a, 1.0 - t, t) * length
        cut_cen.append(cen)

    P = len(pcells)
    out = dict(aperture=aperture, face_comp=face_comp, cut_faces=cut_faces,
               cut_face_centroid=cut_cen)
    if P == 0:
        out.update(volume=np.zeros((0, 2)), centroid=np.zeros((0, 2, 2)), intfc_area=np.zeros(0),
                   intfc_vector=np.zeros((0, 2)), intfc_normal=np.zeros((0, 2)),
                   intfc_centroid=np.zeros((0, 2)))
        return out
    i, j = pcells[:, 0], pcells[:, 1]
    L = np.stack([labels[i, j], labels[i + 1, j], labels[i + 1, j + 1], labels[i, j + 1]], axis=1)
    C = np.array([[0.0, 0.0], [hx, 0.0], [hx, hy], [0.0, hy]])
    t = np.stack([crossings[0][i, j], crossings[1][i + 1, j],
                  crossings[0][i, j + 1], crossings[1][i, j]], axis=1)
    X = np.zeros((P, 4, 2))
    X[:, 0] = np.stack([t[:, 0] * hx, np.zeros(P)], 1)
    X[:, 1] = np.stack([np.full(P, hx), t[:, 1] * hy], 1)
    X[:, 2] = np.stack([t[:, 2] * hx, np.full(P, hy)], 1)
    X[:, 3] = np.stack([np.zeros(P), t[:, 3] * hy], 1)
    crossed = ~np.isnan(t)
    X = np.where(crossed[..., None], X, 0.0)
    Ln = np.roll(L, -1, axis=1)
    Ck = np.broadcast_to(C, (P, 4, 2))
    Cn = np.broadcast_to(np.roll(C, -1, axis=0), (P, 4, 2))
    # a-portion of each cell edge as a directed segment
    s0 = np.where((~crossed & (L == 0))[..., None], Ck,
                  np.where((crossed & (L == 0))[..., None], Ck, X))
    s1 = np.where((~crossed & (L == 0))[..., None], Cn,
                  np.where((crossed & (L == 0))[..., None], X, Cn))
    seg_on = (L == 0) | (Ln == 0)
    # chords: exit (a->b along CCW) to entry (b->a)
    exits = crossed & (L == 0)
    entries = crossed & (L == 1)
    nsad = crossed.sum(axis=1) == 4
    a_connected = np.zeros(P, dtype=bool)
    if np.any(nsad):
        sad = np.nonzero(nsad)[0]
        centers = mesh.centers[i[sad], j[sad]]
        if sampler is not None:
            a_connected[sad] = np.asarray(sampler(centers)) == 0
        else:
            for n in sad:
                pts = {4 + k: X[n, k] for k in range(4)}
                lab = marching._shorter_pairing(
                    [(int(L[n, (k + 1) % 4]), [4 + k, 4 + (k + 1) % 4]) for k in range(4)], pts)
                a_connected[n] = lab == 0
    ch0 = np.zeros((P, 2, 2))
    ch1 = np.zeros((P, 2, 2))
    ch_on = np.zeros((P, 2), dtype=bool)
    ex_idx = np.argsort(~exits, axis=1, kind="stable")[:, :2]
    for m in range(2):
        e_k = ex_idx[:, m]
        valid = exits[np.arange(P), e_k] & ((m == 0) | nsad)
        # next entry CCW for connected-a saddles and all plain cells
        nxt = np.full(P, -1)
        prv = np.full(P, -1)
        for step in (1, 2, 3):
            cand = (e_k + step) % 4
            hit = entries[np.arange(P), cand] & (nxt < 0)
            nxt = np.where(hit, cand, nxt)
            cand = (e_k - step) % 4
            hit = entries[np.arange(P), cand] & (prv < 0)
            prv = np.where(hit, cand, prv)
        target = np.where(nsad & ~a_connected, prv, nxt)
        target = np.where(valid, target, 0)
        ch0[:, m] = X[np.arange(P), e_k]
        ch1[:, m] = X[np.arange(P), target]
        ch_on[:, m] = valid
    segs_a = np.concatenate([np.stack([s0, s1], axis=2), np.stack([ch0, ch1], axis=2)], axis=1)
    on = np.concatenate([seg_on, ch_on], axis=1)
    p0, p1 = segs_a[:, :, 0], segs_a[:, :, 1]
    cross = (p0[..., 0] * p1[..., 1] - p1[..., 0] * p0[..., 1]) * on
    area_a = 0.5 * cross.sum(axis=1)
    mom_a = ((p0 + p1) * cross[..., None]).sum(axis=1) / 6.0
    full = hx * hy
    mom_full = np.array([0.5 * hx, 0.5 * hy]) * full
    area_b = full - area_a
    mom_b = mom_full - mom_a
    lower = np.array(mesh.lower) + pcells * mesh.spacing
    with np.errstate(invalid="ignore", divide="ignore"):
        cen_a = lower + mom_a / area_a[:, None]
        cen_b = lower + mom_b / area_b[:, None]
    d = ch1 - ch0
    seglen = np.linalg.norm(d, axis=2) * ch_on
    nvec = np.stack([d[..., 1], -d[..., 0]], axis=2) * ch_on[..., None]
    mid = 0.5 * (ch0 + ch1)
    length = seglen.sum(axis=1)
    vec = nvec.sum(axis=1)
    cen_i = lower + (mid * seglen[..., None]).sum(axis=1) / length[:, None]
    nrm = np.linalg.norm(vec, axis=1)
    normal = vec / np.where(nrm > 0, nrm, 1.0)[:, None]
    degenerate = nrm <= 1e-14 * length
    if np.any(degenerate):
        first = nvec[:, 0] / np.where(seglen[:, :1] > 0, seglen[:, :1], 1.0)
        normal[degenerate] = first[degenerate]
    out.update(volume=np.stack([area_a, area_b], axis=1),
               centroid=np.stack([cen_a, cen_b], axis=1),
               intfc_area=length, intfc_vector=vec, intfc_normal=normal,
               intfc_centroid=cen_i)
    return out


# ---------------------------------------------------------------- 3D (per cell)

def _face_pieces(mesh, labels, crossings, axis, face, sampler, metric, cache):
    key = (axis,) + face
    if key in cache:
        return cache[key]
    u, v = (axis + 1) % 3, (axis + 2) % 3
    f = np.array(face)
    eu = np.eye(3, dtype=int)[u]
    ev = np.eye(3, dtype=int)[v]
    nodes = [f, f + eu, f + eu + ev, f + ev]
    edges = [(u, f), (v, f + eu), (u, f + ev), (v, f)]
    lab = [int(labels[tuple(n)]) for n in nodes]
    has = []
    keys = {}
    pos = {}
    lower = np.array(mesh.lower)
    h = mesh.spacing
    for m, n in enumerate(nodes):
        keys[m] = (-1,) + tuple(int(x) for x in n)
        pos[m] = lower + n * h
    for m, (ax, n) in enumerate(edges):
        t = crossings[ax][tuple(n)]
        has.append(not np.isnan(t))
        if has[-1]:
            keys[4 + m] = (ax,) + tuple(int(x) for x in n)
            p = lower + n * h
            p[ax] += t * h[ax]
            pos[4 + m] = p
    center_label = None
    if sum(has) == 4 and sampler is not None:
        fc = lower + (f + 0.5 * eu + 0.5 * ev) * h
        center_label = int(np.asarray(sampler(fc[None, :]))[0])
    polys = marching.cut_quad(lab, has, center_label, pos)
    out = {}
    for comp in (0, 1):
        plist = []
        area_p, first = 0.0, np.zeros(3)
        for poly in polys.get(comp, []):
            verts = np.array([pos[m] for m in poly])
            plist.append(([keys[m] for m in poly], verts))
            tris = marching.polygon_triangles(verts)
            pts, av = marching.tri_quadrature(tris)
            a_t = av[:, axis]
            if metric == "cylindrical" and axis == 2:
                wgt = pts[..., 0]
            else:
                wgt = np.ones(pts.shape[:2])
            area_p += float(np.einsum("tq,t,q->", wgt, a_t, marching._TRI_W))
            first += np.einsum("tqd,tq,t,q->d", pts, wgt, a_t, marching._TRI_W)
        if area_p > 0:
            cen = first / area_p
        else:
            cen = np.full(3, np.nan)
        measure = area_p
        if metric == "cylindrical" and axis == 0:
            measure = area_p * pos[0][0]
        out[comp] = (plist, measure, cen)
    cache[key] = out
    return out


def cut_cell_3d(mesh, labels, crossings, cell, sampler=None, metric="cartesian", cache=None):
    """Moments of one 3D cell; returns a dict of per-component and interface data."""
    cache = {} if cache is None else cache
    cell = np.asarray(cell, dtype=int)
    lower = np.array(mesh.lower) + cell * mesh.spacing
    tris = {0: [], 1: []}
    chords = []
    faces = {}
    for axis in range(3):
        for side in (0, 1):
            face = cell.copy()
            face[axis] += side
            pieces = _face_pieces(mesh, labels, crossings, axis, tuple(int(x) for x in face),
                                  sampler, metric, cache)
            faces[(axis, side)] = pieces
            for comp in (0, 1):
                for keys, verts in pieces[comp][0]:
                    if side == 0:
                        keys, verts = keys[::-1], verts[::-1]
                    tris[comp].append(marching.polygon_triangles(verts))
                    if comp == 0:
                        n = len(keys)
                        for m in range(n):
                            a, b = keys[m], keys[(m + 1) % n]
                            if a[0] >= 0 and b[0] >= 0:
                                chords.append((b, a, verts[(m + 1) % n], verts[m]))
    posmap = {c[0]: c[2] for c in chords}
    loops = marching.chain_loops([(c[0], c[1]) for c in chords])
    itris = [marching.fan_triangles([posmap[k] for k in loop]) for loop in loops]
    itris = np.concatenate(itris) if itris else np.zeros((0, 3, 3))
    ta = np.concatenate(tris[0] + [itris]) if tris[0] else itris
    tb = np.concatenate(tris[1] + [itris[:, ::-1]]) if tris[1] else itris[:, ::-1]
    va, ca = marching.region_moments(ta, metric, lower)
    vb, cb = marching.region_moments(tb, metric, lower)
    if len(itris):
        area, vec, cen = marching.surface_moments(itris, metric)
    else:
        area, vec, cen = 0.0, np.zeros(3), np.full(3, np.nan)
    return dict(volume=(va, vb), centroid=(ca, cb), intfc_area=area, intfc_vector=vec,
                intfc_centroid=cen, faces=faces)


def _build_3d(mesh, labels, crossings, pcells, sampler, metric):
    face_comp, aperture, cut_faces = _uncut_faces(mesh, labels, crossings, metric)
    cache = {}
    P = len(pcells)
    volume = np.zeros((P, 2))
    centroid = np.zeros((P, 2, 3))
    area = np.zeros(P)
    vec = np.zeros((P, 3))
    icen = np.zeros((P, 3))
    for p, cell in enumerate(pcells):
        res = cut_cell_3d(mesh, labels, crossings, cell, sampler, metric, cache)
        volume[p] = res["volume"]
        centroid[p] = res["centroid"]
        area[p] = res["intfc_area"]
        vec[p] = res["intfc_vector"]
        icen[p] = res["intfc_centroid"]
    cut_cen = []
    for k in range(3):
        faces = cut_faces[k]
        cen = np.zeros((len(faces), 2, 3))
        for n, f in enumerate(faces):
            pieces = _face_pieces(mesh, labels, crossings, k, tuple(int(x) for x in f),
                                  sampler, metric, cache)
            for comp in (0, 1):
                aperture[k][(comp,) + tuple(f)] = pieces[comp][1]
                cen[n, comp] = pieces[comp][2]
        cut_cen.append(cen)
    nrm = np.linalg.norm(vec, axis=1)
    normal = vec / np.where(nrm > 0, nrm, 1.0)[:, None]
    return dict(volume=volume, centroid=centroid, intfc_area=area, intfc_vector=vec,
                intfc_normal=normal, intfc_centroid=icen, aperture=aperture,
                face_comp=face_comp, cut_faces=cut_faces, cut_face_centroid=cut_cen)


def cut_cell_moments_2d(mesh, labels, crossings, cell, sampler=None) -> dict:
    """Moments of a single 2D partial cell (thin wrapper over the batched path)."""
    arrays = snap_crossings(_as_arrays(mesh, crossings))
    res = _build_2d(mesh, np.asarray(labels, dtype=np.int8), arrays,
                    np.asarray([cell], dtype=int), sampler)
    return {k: res[k][0] for k in ("volume", "centroid", "intfc_area", "intfc_vector",
                                   "intfc_normal", "intfc_centroid")}


def cut_cell_moments_3d(mesh, labels, crossings, cell, sampler=None, metric=None) -> dict:
    arrays = snap_crossings(_as_arrays(mesh, crossings))
    if metric is None:
        metric = "cylindrical" if mesh.cylindrical else "cartesian"
    res = cut_cell_3d(mesh, np.asarray(labels, dtype=np.int8), arrays, cell, sampler, metric)
    vec = res["intfc_vector"]
    n = np.linalg.norm(vec)
    res["intfc_normal"] = vec / n if n > 0 else vec
    return res
