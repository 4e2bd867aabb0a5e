"""Planar Delaunay triangulation, alpha filtration, and persistence in dim 1.

Radius convention: a simplex enters the alpha complex at parameter ``v`` when
balls of radius ``v/2`` around its vertices (clipped to Voronoi cells) share a
point, so filtration values here are TWICE the conventional alpha radius:
vertices at 0, a triangle at twice its circumradius, a Gabriel edge at its
length.  This keeps birth/death values directly comparable to the
ball-intersection thresholds used by the triple scores.

Homology is computed over GF(2) by left-to-right boundary-matrix reduction
with columns stored as Python integers (bitmasks); no clearing or twist
optimizations, which is ample at desk scale.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay as _SciPyDelaunay
from scipy.spatial import QhullError

from .errors import DegenerateTriple
from .geometry import EPS_GEOM, circumcircle
from .spatial import GridIndex


@dataclass(frozen=True)
class Triangulation:
    """Delaunay triangulation of planar points.

    Triangles are positively oriented vertex index triples; ``edges`` is the
    derived undirected edge set (sorted pairs) and ``adjacency`` maps a
    triangle index to the triangle indices sharing one of its edges.
    Degenerate (collinear) inputs yield an edges-only triangulation.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    adjacency: dict = field(compare=False, hash=False)


def _orient_ccw(pts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    out = tris.copy()
    for row in out:
        a, b, c = pts[row[0]], pts[row[1]], pts[row[2]]
        area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if area2 < 0:
            row[1], row[2] = row[2], row[1]
    return out


def _collinear_chain(pts: np.ndarray) -> np.ndarray:
    """Edges between lexicographically consecutive points on a common line."""
    if pts.shape[0] < 2:
        return np.zeros((0, 2), dtype=np.int64)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pairs = [(min(order[i], order[i + 1]), max(order[i], order[i + 1]))
             for i in range(len(order) - 1)]
    return np.array(pairs, dtype=np.int64)


def delaunay(points) -> Triangulation:
    """Delaunay triangulation with the empty-circumdisk property.

    Backed by Qhull; deterministic given the input order.  Fewer than three
    points, or an all-collinear input, produce a triangulation with edges
    only (consecutive points along the line).
    """
    pts = np.ascontiguousarray(np.asarray(points, dtype=float))
    if pts.ndim != 2 or (pts.size and pts.shape[1] != 2):
        raise ValueError("points must have shape (N, 2)")
    n = pts.shape[0]
    if n < 3:
        return Triangulation(vertices=pts,
                             triangles=np.zeros((0, 3), dtype=np.int64),
                             edges=_collinear_chain(pts), adjacency={})
    try:
        tri = _SciPyDelaunay(pts)
    except QhullError:
        return Triangulation(vertices=pts,
                             triangles=np.zeros((0, 3), dtype=np.int64),
                             edges=_collinear_chain(pts), adjacency={})
    tris = _orient_ccw(pts, np.asarray(tri.simplices, dtype=np.int64))
    edge_set = set()
    edge_to_tris: dict[tuple, list[int]] = {}
    for t_idx, row in enumerate(tris):
        for a, b in ((row[0], row[1]), (row[1], row[2]), (row[2], row[0])):
            e = (min(int(a), int(b)), max(int(a), int(b)))
            edge_set.add(e)
            edge_to_tris.setdefault(e, []).append(t_idx)
    adjacency = {t_idx: [] for t_idx in range(len(tris))}
    for e, owners in edge_to_tris.items():
        for i in owners:
            for j in owners:
                if i != j:
                    adjacency[i].append(j)
    edges = np.array(sorted(edge_set), dtype=np.int64) if edge_set \
        else np.zeros((0, 2), dtype=np.int64)
    return Triangulation(vertices=pts, triangles=tris, edges=edges,
                         adjacency=adjacency)


@dataclass(frozen=True)
class AlphaFiltration:
    """Simplices of the Delaunay complex sorted by appearance value.

    Entries are (dim, vertex tuple, value) with faces preceding cofaces;
    the sort key is (value, dim, vertex tuple).
    """

    simplices: list

    def values_by_simplex(self) -> dict:
        return {verts: value for _, verts, value in self.simplices}


def alpha_filtration(tri: Triangulation) -> AlphaFiltration:
    """Alpha filtration values in the doubled-radius convention.

    Triangle value: twice the circumradius.  Edge value: the edge length when
    the open diametral disk is empty (Gabriel edge), else the minimum value
    of its incident triangles.  For a Delaunay edge the diametral disk can
    only contain the apex vertices of the incident triangles, so the Gabriel
    test checks those.
    """
    pts = tri.vertices
    entries = [(0, (int(i),), 0.0) for i in range(pts.shape[0])]

    tri_value = {}
    edge_to_tris: dict[tuple, list[int]] = {}
    for t_idx, row in enumerate(tri.triangles):
        a, b, c = (pts[row[0]], pts[row[1]], pts[row[2]])
        try:
            circ = circumcircle(a, b, c)
            value = 2.0 * circ.radius
        except DegenerateTriple:
            # Sliver beyond tolerance: fall back to the longest edge.
            value = 2.0 * max(np.hypot(*(a - b)), np.hypot(*(b - c)),
                              np.hypot(*(c - a))) / 2.0
        tri_value[t_idx] = value
        verts = tuple(sorted(int(v) for v in row))
        entries.append((2, verts, value))
        for e in ((verts[0], verts[1]), (verts[0], verts[2]), (verts[1], verts[2])):
            edge_to_tris.setdefault(e, []).append(t_idx)

    for e in map(tuple, tri.edges):
        u, v = int(e[0]), int(e[1])
        mid = 0.5 * (pts[u] + pts[v])
        delta = pts[u] - pts[v]
        len2 = float((delta * delta).sum())
        length = np.sqrt(len2)
        gabriel = True
        for t_idx in edge_to_tris.get((u, v), []):
            apex = [w for w in tri.triangles[t_idx] if int(w) not in (u, v)][0]
            dm = pts[apex] - mid
            if float((dm * dm).sum()) < 0.25 * len2:
                gabriel = False
                break
        if gabriel:
            value = length
        else:
            value = min(tri_value[t_idx] for t_idx in edge_to_tris[(u, v)])
        entries.append((1, (u, v), value))

    entries.sort(key=lambda ent: (ent[2], ent[0], ent[1]))
    return AlphaFiltration(simplices=entries)


@dataclass(frozen=True)
class PersistenceDiagram:
    """Birth/death pairs of dimension-1 features (death may be inf)."""

    pairs: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("dim,birth,death\r\n")
        for birth, death in self.pairs:
            d = "inf" if np.isinf(death) else repr(float(death))
            buf.write(f"1,{float(birth)!r},{d}\r\n")
        return buf.getvalue()


def _reduce(filt: AlphaFiltration):
    """GF(2) column reduction; returns dim-1 (birth, death) pairs (inf kept).

    Cached on the filtration object after the first call.
    """
    cached = getattr(filt, "_pairs_cache", None)
    if cached is not None:
        return cached
    sims = filt.simplices
    index_of = {}
    for idx, (dim, verts, _value) in enumerate(sims):
        index_of[verts] = idx
    pivot_owner: dict[int, int] = {}
    reduced_cols: dict[int, int] = {}
    creator = [False] * len(sims)
    pair_of: dict[int, int] = {}
    for j, (dim, verts, _value) in enumerate(sims):
        if dim == 0:
            creator[j] = True
            continue
        if dim == 1:
            col = (1 << index_of[(verts[0],)]) | (1 << index_of[(verts[1],)])
        else:
            col = 0
            for face in ((verts[0], verts[1]), (verts[0], verts[2]),
                         (verts[1], verts[2])):
                col ^= 1 << index_of[face]
        while col:
            low = col.bit_length() - 1
            owner = pivot_owner.get(low)
            if owner is None:
                break
            col ^= reduced_cols[owner]
        if col:
            low = col.bit_length() - 1
            pivot_owner[low] = j
            reduced_cols[j] = col
            pair_of[low] = j
        else:
            creator[j] = True
    pairs = []
    for j, (dim, verts, value) in enumerate(sims):
        if dim != 1 or not creator[j]:
            continue
        killer = pair_of.get(j)
        death = sims[killer][2] if killer is not None else np.inf
        pairs.append((value, death))
    object.__setattr__(filt, "_pairs_cache", pairs)
    return pairs


def persistence_pairs_dim1(filt: AlphaFiltration) -> PersistenceDiagram:
    """Dimension-1 diagram; zero-persistence pairs are dropped."""
    pairs = [(b, d) for b, d in _reduce(filt) if d > b]
    return PersistenceDiagram(pairs=sorted(pairs))


def persistent_betti_1(filt: AlphaFiltration, s: float, t: float) -> int:
    """Number of one-cycles born by ``s`` that are still open at ``t``.

    Counts reduction pairs with birth <= s and death > t (infinite deaths
    included); equal to the rank of cycles at ``s`` modulo boundaries at
    ``t``.  Requires s <= t.
    """
    if s > t:
        raise ValueError("need s <= t")
    return sum(1 for b, d in _reduce(filt) if b <= s and d > t)


def morse_count_delaunay(tri: Triangulation, radii) -> np.ndarray:
    """Critical-point counts from the triangulation.

    A Delaunay triangle has an empty open circumdisk by construction, so the
    count of index-2 critical points with value at most ``radius`` equals the
    number of Delaunay triangles whose circumcenter lies strictly inside the
    triangle with circumradius at most ``radius``.  ``radii`` are absolute
    (same units as the vertices).
    """
    radii = np.asarray([float(v) for v in np.atleast_1d(radii)])
    counts = np.zeros(len(radii), dtype=np.int64)
    pts = tri.vertices
    for row in tri.triangles:
        a, b, c = pts[row[0]], pts[row[1]], pts[row[2]]
        try:
            circ = circumcircle(a, b, c)
        except DegenerateTriple:
            continue
        acute = True
        for p, q, s in ((a, b, c), (b, c, a), (c, a, b)):
            dot = float(((q - p) * (s - p)).sum())
            if dot <= EPS_GEOM:
                acute = False
                break
        if not acute:
            continue
        counts += circ.radius <= radii
    return counts


def component_size_vertex_count(points, r_edge: float) -> int:
    """Vertices in size >= 4 components of the geometric graph at ``r_edge``.

    Union-find over grid-enumerated edges (edge iff distance <= r_edge).
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n == 0:
        return 0
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    index = GridIndex(pts, r_edge)
    r2 = r_edge * r_edge
    for i in range(n):
        for j in index.query_ball_candidates(pts[i], r_edge):
            if j <= i:
                continue
            delta = pts[j] - pts[i]
            if float((delta * delta).sum()) <= r2:
                parent[find(i)] = find(j)
    sizes: dict[int, int] = {}
    for i in range(n):
        root = find(i)
        sizes[root] = sizes.get(root, 0) + 1
    return sum(size for size in sizes.values() if size >= 4)
