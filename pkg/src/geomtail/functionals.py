"""Score functions on scaled tuples and the derived counting statistics.

A score maps a k-tuple, already centered and divided by the regime radius, to
a vector of m nonnegative components.  Built-in scores are indicator-valued
and obey three structural rules that the tests probe bitwise: symmetry under
permutation of the inputs, translation invariance, and a support bound L
beyond which every component vanishes.

The statistics follow one pattern: enumerate locally concentrated tuples,
evaluate the score on the scaled coordinates, and weight by an isolation
indicator -- per-component distance isolation for T/U/xi, the empty
circumdisk condition for the critical-point count.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTriple
from .geometry import EPS_GEOM, circumcircle, enclosing_radius
from .pointproc import PointCloud
from .spatial import GridIndex, TupleRecord, enumerate_tuples, isolation, make_tuple_record

MAX_GRAPH_VERTICES = 6


# ---------------------------------------------------------------------------
# canonical graphs and small complexes
# ---------------------------------------------------------------------------

def _pair_positions(k: int) -> dict:
    return {pair: pos for pos, pair in enumerate(itertools.combinations(range(k), 2))}


@dataclass(frozen=True)
class CanonicalGraph:
    """A graph on k labelled vertices in canonical (isomorphism-invariant) form.

    ``edge_bitmask`` is the minimum over all vertex relabelings of the edge
    incidence bitmask, so two graphs are isomorphic iff their canonical
    bitmasks are equal.  Limited to k <= 6 (at most 720 relabelings).
    """

    k: int
    edge_bitmask: int

    def edges(self) -> list:
        pos = _pair_positions(self.k)
        return [pair for pair, p in pos.items() if self.edge_bitmask >> p & 1]

    def is_connected(self) -> bool:
        parent = list(range(self.k))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges():
            parent[find(u)] = find(v)
        return len({find(i) for i in range(self.k)}) == 1


def canonicalize_graph(k: int, edges) -> CanonicalGraph:
    """Canonical form of an undirected graph given as an edge list."""
    if k > MAX_GRAPH_VERTICES:
        raise ValueError(f"canonical graphs support at most {MAX_GRAPH_VERTICES} vertices")
    if k < 1:
        raise ValueError("need k >= 1")
    pos = _pair_positions(k)
    edge_set = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v or not (0 <= u < k and 0 <= v < k):
            raise ValueError(f"bad edge ({u}, {v}) for k={k}")
        edge_set.add((min(u, v), max(u, v)))
    best = None
    for perm in itertools.permutations(range(k)):
        mask = 0
        for u, v in edge_set:
            pu, pv = perm[u], perm[v]
            mask |= 1 << pos[(min(pu, pv), max(pu, pv))]
        if best is None or mask < best:
            best = mask
    return CanonicalGraph(k=k, edge_bitmask=best)


def _canonical_complex_key(n: int, simplices: frozenset) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        relabeled = sorted(tuple(sorted(perm[v] for v in s)) for s in simplices)
        key = tuple(relabeled)
        if best is None or key < best:
            best = key
    return best


@dataclass(frozen=True)
class CechTarget:
    """A small simplicial complex (on at most 4 vertices) up to isomorphism."""

    n_vertices: int
    canonical_key: tuple

    @classmethod
    def from_simplices(cls, n_vertices: int, simplices) -> "CechTarget":
        if n_vertices > 4:
            raise ValueError("targets support at most 4 vertices")
        sims = set()
        for s in simplices:
            s = frozenset(int(v) for v in s)
            if len(s) < 2:
                continue
            if not all(0 <= v < n_vertices for v in s):
                raise ValueError(f"vertex out of range in simplex {sorted(s)}")
            sims.add(s)
        # downward closure
        closure = set(sims)
        for s in sims:
            for m in range(2, len(s)):
                closure.update(frozenset(c) for c in itertools.combinations(s, m))
        # connectivity over the 1-skeleton
        parent = list(range(n_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for s in closure:
            vs = sorted(s)
            for u, v in itertools.combinations(vs, 2):
                parent[find(u)] = find(v)
        if len({find(i) for i in range(n_vertices)}) != 1:
            raise ValueError("target complex must be connected")
        return cls(n_vertices=n_vertices,
                   canonical_key=_canonical_complex_key(n_vertices, frozenset(closure)))


def _cech_complex_key(pts: np.ndarray, radius: float) -> tuple:
    """Canonical key of the Cech complex of <= 4 planar points at ``radius``.

    Balls carry radius ``radius/2``; edges need pairwise distance at most
    ``radius`` and triangles a common triple intersection, decided
    analytically.  Four balls in the plane intersect iff every three do
    (Helly), so no new predicate is needed for the 3-simplex.
    """
    m = pts.shape[0]
    r2 = radius * radius
    simplices = set()
    for i, j in itertools.combinations(range(m), 2):
        delta = pts[i] - pts[j]
        if float((delta * delta).sum()) <= r2:
            simplices.add(frozenset((i, j)))
    filled = set()
    for tri in itertools.combinations(range(m), 3):
        if all(frozenset(e) in simplices for e in itertools.combinations(tri, 2)):
            if radius >= 2.0 * enclosing_radius(pts[tri[0]], pts[tri[1]], pts[tri[2]]):
                simplices.add(frozenset(tri))
                filled.add(frozenset(tri))
    if m == 4 and len(filled) == 4:
        simplices.add(frozenset(range(4)))
    return _canonical_complex_key(m, frozenset(simplices))


# ---------------------------------------------------------------------------
# score functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScoreFunction:
    """A symmetric, translation-invariant, locally determined score.

    ``evaluate_batch`` maps an (N, k, d) array of scaled tuples to an (N, m)
    array; ``evaluate`` is the single-tuple view of the same code path.
    ``thresholds[i]`` is the isolation radius attached to component i, and
    ``support_L`` bounds the diameter beyond which all components are zero.
    """

    name: str
    k: int
    m: int
    support_L: float
    thresholds: tuple
    _batch: object = field(repr=False)
    params: dict = field(default_factory=dict)

    def evaluate(self, scaled_tuple: np.ndarray) -> np.ndarray:
        arr = np.asarray(scaled_tuple, dtype=float)
        return self._batch(arr[None, :, :])[0]

    def evaluate_batch(self, scaled_tuples: np.ndarray) -> np.ndarray:
        return self._batch(np.asarray(scaled_tuples, dtype=float))


def score_rgg_component(k: int, target: CanonicalGraph, t: float) -> ScoreFunction:
    """Indicator that the radius-``t`` geometric graph on the tuple matches a target.

    The target must be a connected graph on k vertices; the support bound is
    L = k*t (a connected graph at threshold t has diameter below k*t).
    """
    if target.k != k:
        raise ValueError("target vertex count must equal k")
    if k > MAX_GRAPH_VERTICES:
        raise ValueError(f"supported only for k <= {MAX_GRAPH_VERTICES}")
    if not target.is_connected():
        raise ValueError("target graph must be connected")
    pos = _pair_positions(k)
    t2 = t * t

    def batch(tuples: np.ndarray) -> np.ndarray:
        out = np.zeros((tuples.shape[0], 1))
        for idx in range(tuples.shape[0]):
            pts = tuples[idx]
            edges = []
            for u, v in pos:
                delta = pts[u] - pts[v]
                if float((delta * delta).sum()) <= t2:
                    edges.append((u, v))
            if canonicalize_graph(k, edges).edge_bitmask == target.edge_bitmask:
                out[idx, 0] = 1.0
        return out

    return ScoreFunction(name="rgg-component", k=k, m=1, support_L=k * t,
                         thresholds=(t,), _batch=batch,
                         params={"k": k, "edges": target.edges(), "t": t})


def score_cech_component(k_plus_1: int, target: CechTarget, t: float) -> ScoreFunction:
    """Indicator that the Cech complex at radius ``t`` matches a target complex."""
    if k_plus_1 != target.n_vertices:
        raise ValueError("target vertex count must equal k_plus_1")
    if k_plus_1 > 4:
        raise ValueError("supported only for tuples of at most 4 points")

    def batch(tuples: np.ndarray) -> np.ndarray:
        if tuples.shape[2] != 2:
            raise ValueError("Cech component scores are planar (d=2)")
        out = np.zeros((tuples.shape[0], 1))
        for idx in range(tuples.shape[0]):
            if _cech_complex_key(tuples[idx], t) == target.canonical_key:
                out[idx, 0] = 1.0
        return out

    return ScoreFunction(name="cech-component", k=k_plus_1, m=1,
                         support_L=k_plus_1 * t, thresholds=(t,), _batch=batch,
                         params={"k_plus_1": k_plus_1, "t": t,
                                 "target_key": target.canonical_key})


def _triple_geometry(tuples: np.ndarray):
    """Squared edge lengths, twice-signed areas, and circumradii of triples."""
    b = tuples[:, 1, :] - tuples[:, 0, :]
    c = tuples[:, 2, :] - tuples[:, 0, :]
    e = tuples[:, 2, :] - tuples[:, 1, :]
    ab2 = (b * b).sum(axis=1)
    ac2 = (c * c).sum(axis=1)
    bc2 = (e * e).sum(axis=1)
    area2 = b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        circum = np.sqrt(ab2 * ac2 * bc2) / (2.0 * np.abs(area2))
    return ab2, ac2, bc2, area2, circum


def _fill_radius(ab2, ac2, bc2, area2, circum):
    """Smallest s with a common point of radius-s balls (minimax radius)."""
    longest2 = np.maximum(np.maximum(ab2, ac2), bc2)
    other = ab2 + ac2 + bc2 - longest2
    obtuse = longest2 >= other
    s_star = np.where(obtuse | (np.abs(area2) <= EPS_GEOM),
                      0.5 * np.sqrt(longest2), circum)
    return s_star


def score_persistent_triple(s: float, t: float) -> ScoreFunction:
    """Indicator of a planar 3-point one-cycle born by ``s`` and alive at ``t``.

    Requires 0 <= s <= t; the cycle exists at radius u iff all edges are at
    most u while u is below twice the minimax radius, so the product
    h_s * h_t reduces to (longest edge <= s) and (t < 2 * minimax radius).
    Isolation for this score runs at threshold ``t``.
    """
    if not 0 <= s <= t:
        raise ValueError("need 0 <= s <= t")

    def batch(tuples: np.ndarray) -> np.ndarray:
        if tuples.shape[1] != 3 or tuples.shape[2] != 2:
            raise ValueError("persistent-triple scores take planar triples")
        ab2, ac2, bc2, area2, circum = _triple_geometry(tuples)
        longest2 = np.maximum(np.maximum(ab2, ac2), bc2)
        s_star = _fill_radius(ab2, ac2, bc2, area2, circum)
        born = longest2 <= s * s
        alive = t < 2.0 * s_star
        return (born & alive).astype(float)[:, None]

    return ScoreFunction(name="persistent-triple", k=3, m=1, support_L=t,
                         thresholds=(t,), _batch=batch, params={"s": s, "t": t})


def score_morse(t_list) -> ScoreFunction:
    """Planar index-2 critical point scores at the given radius thresholds.

    Component i is 1 iff the triple's circumcenter lies strictly inside its
    convex hull (acute triangle) and the circumradius is at most ``t_list[i]``.
    The companion isolation condition for the critical-point count is the
    empty open circumdisk, applied by :func:`compute_morse`, not the
    distance-based indicator used by :func:`compute_T`.
    """
    t_list = tuple(float(t) for t in t_list)
    if not t_list:
        raise ValueError("need at least one threshold")
    t_arr = np.array(t_list)

    def batch(tuples: np.ndarray) -> np.ndarray:
        if tuples.shape[1] != 3 or tuples.shape[2] != 2:
            raise ValueError("critical-point scores take planar triples")
        ab2, ac2, bc2, area2, circum = _triple_geometry(tuples)
        longest2 = np.maximum(np.maximum(ab2, ac2), bc2)
        other = ab2 + ac2 + bc2 - longest2
        acute = (longest2 < other - EPS_GEOM) & (np.abs(area2) > EPS_GEOM)
        out = acute[:, None] & (circum[:, None] <= t_arr[None, :])
        return out.astype(float)

    return ScoreFunction(name="morse", k=3, m=len(t_list),
                         support_L=2.0 * max(t_list), thresholds=t_list,
                         _batch=batch, params={"t_list": list(t_list)})


def score_edge(thresholds) -> ScoreFunction:
    """Pair score: component i is 1 iff the scaled distance is at most t_i."""
    ts = tuple(float(t) for t in thresholds) if np.iterable(thresholds) \
        else (float(thresholds),)
    if not ts:
        raise ValueError("need at least one threshold")
    t_arr = np.array(ts)

    def batch(tuples: np.ndarray) -> np.ndarray:
        delta = tuples[:, 1, :] - tuples[:, 0, :]
        d2 = (delta * delta).sum(axis=1)
        return (d2[:, None] <= (t_arr * t_arr)[None, :]).astype(float)

    return ScoreFunction(name="edge", k=2, m=len(ts), support_L=max(ts),
                         thresholds=ts, _batch=batch, params={"t": list(ts)})


def stack_scores(scores) -> ScoreFunction:
    """Concatenate same-k scores into one multi-component score."""
    scores = list(scores)
    if not scores:
        raise ValueError("need at least one score")
    k = scores[0].k
    if any(s.k != k for s in scores):
        raise ValueError("all stacked scores must share k")

    def batch(tuples: np.ndarray) -> np.ndarray:
        return np.concatenate([s.evaluate_batch(tuples) for s in scores], axis=1)

    return ScoreFunction(name="stack", k=k, m=sum(s.m for s in scores),
                         support_L=max(s.support_L for s in scores),
                         thresholds=tuple(t for s in scores for t in s.thresholds),
                         _batch=batch, params={"parts": [s.name for s in scores]})


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StatisticVector:
    """Raw (unnormalized) statistic values with their normalizer attached."""

    values: np.ndarray
    rho: float

    @property
    def normalized(self) -> np.ndarray:
        return self.values / self.rho


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted atoms on a bounded state space."""

    locations: np.ndarray
    weights: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        dim = self.locations.shape[1] if self.locations.size else 0
        buf.write(",".join(f"loc{i}" for i in range(dim)) + ",weight\r\n")
        for loc, w in zip(self.locations, self.weights):
            buf.write(",".join(repr(float(v)) for v in loc)
                      + f",{float(w)!r}\r\n")
        return buf.getvalue()


def _empty_measure(dim: int) -> EmpiricalMeasure:
    return EmpiricalMeasure(locations=np.zeros((0, dim)), weights=np.zeros(0))


def _shared_index(cloud: PointCloud, score: ScoreFunction) -> GridIndex:
    cell = cloud.regime.r * max(score.support_L, max(score.thresholds))
    return GridIndex(cloud.points, cell)


def _isolation_by_threshold(rec: TupleRecord, cloud: PointCloud,
                            thresholds, index: GridIndex) -> dict:
    return {t: isolation(rec, cloud, t, index=index)
            for t in sorted(set(thresholds))}


def compute_T(cloud: PointCloud, score: ScoreFunction,
              index: GridIndex | None = None) -> StatisticVector:
    """Sum of score vectors over isolated tuples (component-wise isolation).

    Enumeration at L = score.support_L is exact because the score vanishes on
    wider tuples.
    """
    if index is None:
        index = _shared_index(cloud, score)
    values = np.zeros(score.m)
    for rec in enumerate_tuples(cloud, score.k, score.support_L, index=index):
        h = score.evaluate(rec.centered)
        if not h.any():
            continue
        iso = _isolation_by_threshold(rec, cloud, score.thresholds, index)
        for i, t in enumerate(score.thresholds):
            values[i] += h[i] * iso[t]
    return StatisticVector(values=values, rho=cloud.regime.rho)


def compute_U(cloud: PointCloud, score: ScoreFunction,
              index: GridIndex | None = None) -> EmpiricalMeasure:
    """Empirical measure of nonzero isolated score vectors, weight 1/rho each.

    Zero vectors are dropped: the state space excludes the origin.
    """
    if index is None:
        index = _shared_index(cloud, score)
    rho = cloud.regime.rho
    atoms = []
    for rec in enumerate_tuples(cloud, score.k, score.support_L, index=index):
        h = score.evaluate(rec.centered)
        if not h.any():
            continue
        iso = _isolation_by_threshold(rec, cloud, score.thresholds, index)
        g = np.array([h[i] * iso[t] for i, t in enumerate(score.thresholds)])
        if g.any():
            atoms.append(g)
    if not atoms:
        return _empty_measure(score.m)
    locs = np.array(atoms)
    return EmpiricalMeasure(locations=locs, weights=np.full(len(atoms), 1.0 / rho))


def compute_xi(cloud: PointCloud, t: float, L: float, k: int,
               index: GridIndex | None = None) -> EmpiricalMeasure:
    """Point process of centered scaled tuples that are isolated at ``t``.

    Atom locations are the flattened (k*d) centered coordinates, whose first
    d entries are zero by the centering convention.
    """
    if index is None:
        index = GridIndex(cloud.points, cloud.regime.r * max(L, t))
    rho = cloud.regime.rho
    atoms = []
    for rec in enumerate_tuples(cloud, k, L, index=index):
        if isolation(rec, cloud, t, index=index):
            atoms.append(rec.centered.reshape(-1))
    if not atoms:
        return _empty_measure(k * cloud.regime.d)
    return EmpiricalMeasure(locations=np.array(atoms),
                            weights=np.full(len(atoms), 1.0 / rho))


def _morse_predicates(scaled: np.ndarray):
    """(is_acute, scaled circumcenter, scaled circumradius) of a scaled triple."""
    try:
        circ = circumcircle(scaled[0], scaled[1], scaled[2])
    except DegenerateTriple:
        return False, None, np.inf
    acute = True
    for p, q, s in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        dot = ((scaled[q] - scaled[p]) * (scaled[s] - scaled[p])).sum()
        if dot <= EPS_GEOM:
            acute = False
            break
    return acute, circ.center, circ.radius


def compute_morse(cloud: PointCloud, t_list,
                  index: GridIndex | None = None) -> StatisticVector:
    """Count of planar index-2 critical points with values below r*t_i.

    A triple contributes to component i iff its circumcenter lies strictly
    inside the triangle, the circumradius is at most r*t_i, and the open
    circumdisk contains no cloud point.  A qualifying triple has diameter at
    most 2*r*t_max, so grid enumeration at L = 2*t_max is exact.
    """
    if cloud.regime.d != 2:
        raise ValueError("critical-point counting is planar (d=2)")
    t_list = [float(t) for t in t_list]
    t_max = max(t_list)
    r = cloud.regime.r
    if index is None:
        index = GridIndex(cloud.points, r * 2.0 * t_max)
    values = np.zeros(len(t_list))
    pts = cloud.points
    for rec in enumerate_tuples(cloud, 3, 2.0 * t_max, index=index):
        acute, center_scaled, radius_scaled = _morse_predicates(rec.centered)
        if not acute or radius_scaled > t_max:
            continue
        center = rec.center + r * center_scaled
        radius = r * radius_scaled
        radius2 = radius * radius
        empty = True
        for j in index.query_ball_candidates(center, radius):
            if j in rec.indices:
                continue
            delta = pts[j] - center
            if float((delta * delta).sum()) < radius2:
                empty = False
                break
        if not empty:
            continue
        for i, t in enumerate(t_list):
            if radius_scaled <= t:
                values[i] += 1
    return StatisticVector(values=values, rho=cloud.regime.rho)


# ---------------------------------------------------------------------------
# brute-force oracles (no grid; direct O(n^k) scans)
# ---------------------------------------------------------------------------

def brute_force_T(cloud: PointCloud, score: ScoreFunction) -> StatisticVector:
    """Direct enumeration over all k-subsets with full-cloud isolation scans."""
    pts = cloud.points
    n = pts.shape[0]
    r = cloud.regime.r
    reach2 = (r * score.support_L) ** 2
    values = np.zeros(score.m)
    for combo in itertools.combinations(range(n), score.k):
        ok = True
        for u, v in itertools.combinations(combo, 2):
            delta = pts[u] - pts[v]
            if float((delta * delta).sum()) > reach2:
                ok = False
                break
        if not ok:
            continue
        rec = make_tuple_record(cloud, combo)
        h = score.evaluate(rec.centered)
        if not h.any():
            continue
        members = set(combo)
        iso = {}
        for t in set(score.thresholds):
            radius2 = (r * t) ** 2
            good = 1
            for m in combo:
                pm = pts[m]
                for j in range(n):
                    if j in members:
                        continue
                    delta = pts[j] - pm
                    if float((delta * delta).sum()) < radius2:
                        good = 0
                        break
                if not good:
                    break
            iso[t] = good
        for i, t in enumerate(score.thresholds):
            values[i] += h[i] * iso[t]
    return StatisticVector(values=values, rho=cloud.regime.rho)


def brute_force_morse(cloud: PointCloud, t_list) -> StatisticVector:
    """Direct triple enumeration for the critical-point count."""
    pts = cloud.points
    n = pts.shape[0]
    r = cloud.regime.r
    t_list = [float(t) for t in t_list]
    t_max = max(t_list)
    values = np.zeros(len(t_list))
    for combo in itertools.combinations(range(n), 3):
        rec = make_tuple_record(cloud, combo)
        if rec.diam > 2.0 * r * t_max:
            continue
        acute, center_scaled, radius_scaled = _morse_predicates(rec.centered)
        if not acute or radius_scaled > t_max:
            continue
        center = rec.center + r * center_scaled
        radius2 = (r * radius_scaled) ** 2
        empty = True
        for j in range(n):
            if j in combo:
                continue
            delta = pts[j] - center
            if float((delta * delta).sum()) < radius2:
                empty = False
                break
        if not empty:
            continue
        for i, t in enumerate(t_list):
            if radius_scaled <= t:
                values[i] += 1
    return StatisticVector(values=values, rho=cloud.regime.rho)
