import itertools

import numpy as np
import pytest

from geomtail.pointproc import PointCloud, make_regime, sample_poisson
from geomtail.spatial import (GridIndex, TupleRecord, build_index,
                              enumerate_tuples, isolation, make_tuple_record,
                              s_indicator)


def _cloud(points, d=2, k=2, n=100.0, r=0.1):
    rho = n ** k * r ** (d * (k - 1))
    reg = make_regime(d, k, n, rho, eps_sparse=np.inf)
    return PointCloud(points=np.asarray(points, dtype=float), regime=reg, seed=0)


def brute_tuples(cloud, k, L):
    """Index sets of all k-subsets with diameter <= r*L (direct scan)."""
    pts = cloud.points
    reach2 = (cloud.regime.r * L) ** 2
    out = set()
    for combo in itertools.combinations(range(len(pts)), k):
        if all(((pts[u] - pts[v]) ** 2).sum() <= reach2
               for u, v in itertools.combinations(combo, 2)):
            out.add(combo)
    return out


def test_empty_and_singleton_index():
    idx = GridIndex(np.zeros((0, 2)), 0.1)
    assert idx.cells == {}
    idx = GridIndex(np.array([[0.5, 0.5]]), 0.1)
    assert len(idx.cells) == 1


def test_query_ball_matches_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(30):
        pts = rng.random((60, 2))
        idx = GridIndex(pts, rng.uniform(0.02, 0.3))
        center = rng.random(2)
        radius = rng.uniform(0.01, 0.4)
        got = sorted(idx.query_ball(center, radius))
        want = [i for i in range(60)
                if ((pts[i] - center) ** 2).sum() <= radius * radius]
        assert got == want
        # candidates are a superset
        assert set(want) <= set(idx.query_ball_candidates(center, radius))


def test_pair_enumeration_basic():
    r = 0.01
    cloud = _cloud([[0.5, 0.5], [0.5 + r * 0.5, 0.5]], r=r)
    recs = enumerate_tuples(cloud, 2, 1.0)
    assert len(recs) == 1
    assert recs[0].diam == pytest.approx(r * 0.5)
    cloud = _cloud([[0.5, 0.5], [0.5 + 2 * r, 0.5]], r=r)
    assert enumerate_tuples(cloud, 2, 1.0) == []


def test_tuple_record_centering():
    r = 0.01
    cloud = _cloud([[0.5, 0.5], [0.5 + r * 0.3, 0.5]], r=r)
    rec = enumerate_tuples(cloud, 2, 1.0)[0]
    assert np.array_equal(rec.centered[0], [0.0, 0.0])
    assert rec.centered[1] == pytest.approx([0.3, 0.0])
    assert np.linalg.norm(rec.centered, axis=1).max() <= 1.0


def test_enumeration_matches_brute_force():
    rng = np.random.default_rng(1)
    for k in (2, 3):
        for trial in range(20):
            n = 120
            r = 0.05
            reg = make_regime(2, k, n, n ** k * r ** (2 * (k - 1)),
                              eps_sparse=np.inf)
            cloud = sample_poisson(reg, trial)
            got = {rec.indices for rec in enumerate_tuples(cloud, k, 1.0)}
            assert got == brute_tuples(cloud, k, 1.0)


def test_isolation_cases():
    r = 0.01
    base = [[0.5, 0.5], [0.5 + 0.5 * r, 0.5]]
    far = _cloud(base + [[0.9, 0.9]], r=r)
    rec = enumerate_tuples(far, 2, 1.0)[0]
    assert isolation(rec, far, 1.0) == 1
    near = _cloud(base + [[0.5 + 0.5 * r, 0.5 + 0.5 * r]], r=r)
    rec = [q for q in enumerate_tuples(near, 2, 1.0) if q.indices == (0, 1)][0]
    assert isolation(rec, near, 1.0) == 0


def test_isolation_boundary_is_inclusive():
    # a point at distance exactly r*t does not break isolation
    r = 0.015625  # power of two so r*t is exact
    cloud = _cloud([[0.5, 0.5], [0.5 + 0.5 * r, 0.5], [0.5 - r, 0.5]], r=r)
    rec = [q for q in enumerate_tuples(cloud, 2, 1.0) if q.indices == (0, 1)][0]
    assert isolation(rec, cloud, 1.0) == 1
    just_inside = _cloud([[0.5, 0.5], [0.5 + 0.5 * r, 0.5],
                          [0.5 - r * (1 - 1e-9), 0.5]], r=r)
    rec = [q for q in enumerate_tuples(just_inside, 2, 1.0)
           if q.indices == (0, 1)][0]
    assert isolation(rec, just_inside, 1.0) == 0


def test_s_indicator():
    r = 0.01
    iso_pair = _cloud([[0.5, 0.5], [0.5 + 0.5 * r, 0.5]], r=r)
    rec = enumerate_tuples(iso_pair, 2, 1.0)[0]
    assert s_indicator(rec, iso_pair, 1.0, 1.0) == 1
    assert s_indicator(rec, iso_pair, 1.0, 0.25) == 0  # diam bound broken
    crowded = _cloud([[0.5, 0.5], [0.5 + 0.5 * r, 0.5], [0.5, 0.5 + 0.4 * r]],
                     r=r)
    rec = [q for q in enumerate_tuples(crowded, 2, 1.0)
           if q.indices == (0, 1)][0]
    assert s_indicator(rec, crowded, 1.0, 1.0) == 0


def test_isolated_centers_spread():
    # two isolated tuples cannot have centers in one cube of side r*t/sqrt(d)
    rng = np.random.default_rng(2)
    n, k, r, t = 400, 2, 0.02, 1.0
    reg = make_regime(2, k, n, n ** k * r ** 2, eps_sparse=np.inf)
    side = r * t / np.sqrt(2)
    seen_any = False
    for trial in range(20):
        cloud = sample_poisson(reg, trial)
        index = build_index(cloud, r * t)
        centers = []
        for rec in enumerate_tuples(cloud, k, 1.0, index=index):
            if isolation(rec, cloud, t, index=index):
                centers.append(rec.center)
        boxes = {tuple((c / side).astype(int)) for c in centers}
        assert len(boxes) == len(centers)
        seen_any = seen_any or bool(centers)
    assert seen_any


def test_make_tuple_record_sorted_indices():
    cloud = _cloud([[0.6, 0.1], [0.1, 0.2], [0.3, 0.9]], r=0.5)
    rec = make_tuple_record(cloud, (2, 0, 1))
    assert rec.indices == (0, 1, 2)
    # centered rows are in lexicographic order of the original coordinates
    assert rec.centered[0] == pytest.approx([0.0, 0.0])
    lex = sorted(map(tuple, cloud.points))
    expected = (np.array(lex) - lex[0]) / cloud.regime.r
    assert np.allclose(rec.centered, expected)
