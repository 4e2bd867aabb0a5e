"""Grid-accelerated enumeration of locally concentrated tuples.

A uniform cell grid over the unit cube supports two query types with one
build: enumeration of k-subsets of diameter at most ``r*L`` and isolation
tests at radius ``r*t``.  Tuples are generated by expanding around each point
as anchor (the lexicographic minimum of the subset), scanning only cells that
can contain lexicographically larger members, so every subset is emitted
exactly once without a dedup set.

This module is the readable reference implementation; the replicate kernels
in ``_kernels`` reproduce its decisions bit for bit and are cross-checked
against it in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .pointproc import PointCloud


class GridIndex:
    """Uniform hash grid over points in the unit cube.

    Every indexed point lives in exactly one cell; a range query of radius q
    visits the ceil(q / cell_size)-ring of cells around the query point and
    returns a superset of the true q-neighborhood.
    """

    def __init__(self, points: np.ndarray, cell_size: float):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.points = np.asarray(points, dtype=float)
        self.cell_size = float(cell_size)
        self.inv_cell = 1.0 / self.cell_size
        self.cells: dict[tuple, list[int]] = {}
        for i, p in enumerate(self.points):
            self.cells.setdefault(self._cell_of(p), []).append(i)

    def _cell_of(self, p) -> tuple:
        return tuple(int(np.floor(v * self.inv_cell)) for v in p)

    def query_ball_candidates(self, center, radius: float):
        """Indices in all cells intersecting the ball's bounding box."""
        center = np.asarray(center, dtype=float)
        ring = int(np.ceil(radius * self.inv_cell))
        base = self._cell_of(center)
        out: list[int] = []
        for offs in itertools.product(range(-ring, ring + 1), repeat=len(base)):
            cell = tuple(b + o for b, o in zip(base, offs))
            got = self.cells.get(cell)
            if got:
                out.extend(got)
        return out

    def query_ball(self, center, radius: float):
        """Indices of points with ||p - center|| <= radius (exact filter)."""
        center = np.asarray(center, dtype=float)
        r2 = radius * radius
        cand = self.query_ball_candidates(center, radius)
        keep = []
        for i in cand:
            delta = self.points[i] - center
            if float((delta * delta).sum()) <= r2:
                keep.append(i)
        return keep


def build_index(cloud: PointCloud, cell_size: float) -> GridIndex:
    return GridIndex(cloud.points, cell_size)


@dataclass(frozen=True)
class TupleRecord:
    """A k-subset with its diameter and centered, r-scaled coordinates.

    ``center`` is the lexicographically smallest member; ``centered`` lists
    the members in lexicographic order, translated by the center and divided
    by the regime radius, so its first row is the origin.
    ``isolated_at`` is filled by callers that evaluated isolation thresholds.
    """

    indices: tuple
    diam: float
    center: np.ndarray
    centered: np.ndarray
    isolated_at: tuple = ()


def _lex_order(points: np.ndarray) -> np.ndarray:
    keys = tuple(points[:, col] for col in range(points.shape[1] - 1, -1, -1))
    return np.lexsort(keys)


def make_tuple_record(cloud: PointCloud, indices) -> TupleRecord:
    """Build the canonical record (sorted indices, lex-ordered centered coords)."""
    idx = tuple(sorted(int(i) for i in indices))
    pts = cloud.points[list(idx)]
    order = _lex_order(pts)
    ordered = pts[order]
    center = ordered[0].copy()
    centered = (ordered - center) / cloud.regime.r
    diffs = pts[:, None, :] - pts[None, :, :]
    diam = float(np.sqrt((diffs ** 2).sum(axis=-1).max()))
    return TupleRecord(indices=idx, diam=diam, center=center, centered=centered)


def enumerate_tuples(cloud: PointCloud, k: int, L: float,
                     index: GridIndex | None = None) -> list[TupleRecord]:
    """All k-subsets of the cloud with diameter at most ``r*L``, each once.

    The anchor of a subset is its lexicographically smallest point; subsets
    are produced by combining each anchor with lexicographically larger
    points within ``r*L`` and filtering on the full pairwise diameter.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    r = cloud.regime.r
    reach = r * L
    pts = cloud.points
    n = pts.shape[0]
    if n < k:
        return []
    if index is None:
        index = GridIndex(pts, reach)
    reach2 = reach * reach
    out: list[TupleRecord] = []
    for a in range(n):
        pa = pts[a]
        cand = []
        for j in index.query_ball_candidates(pa, reach):
            if j == a:
                continue
            pj = pts[j]
            if tuple(pj) <= tuple(pa):
                continue
            delta = pj - pa
            if float((delta * delta).sum()) <= reach2:
                cand.append(j)
        if len(cand) < k - 1:
            continue
        for combo in itertools.combinations(sorted(cand), k - 1):
            ok = True
            for u, v in itertools.combinations(combo, 2):
                delta = pts[u] - pts[v]
                if float((delta * delta).sum()) > reach2:
                    ok = False
                    break
            if ok:
                out.append(make_tuple_record(cloud, (a,) + combo))
    out.sort(key=lambda rec: rec.indices)
    return out


def isolation(rec: TupleRecord, cloud: PointCloud, t: float,
              index: GridIndex | None = None) -> int:
    """1 iff every non-member is at distance >= r*t from every member.

    The comparison at the boundary is exact (ties count as isolated); under
    the sampling model ties occur with probability zero.
    """
    r = cloud.regime.r
    radius = r * t
    radius2 = radius * radius
    pts = cloud.points
    if index is None:
        index = GridIndex(pts, radius)
    members = set(rec.indices)
    for m in rec.indices:
        pm = pts[m]
        for j in index.query_ball_candidates(pm, radius):
            if j in members:
                continue
            delta = pts[j] - pm
            if float((delta * delta).sum()) < radius2:
                return 0
    return 1


def s_indicator(rec: TupleRecord, cloud: PointCloud, t: float, L: float,
                index: GridIndex | None = None) -> int:
    """Isolation at ``t`` together with the diameter bound ``r*L``."""
    if rec.diam > cloud.regime.r * L:
        return 0
    return isolation(rec, cloud, t, index=index)
