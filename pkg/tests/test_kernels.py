"""Compiled kernels against the reference implementations, on shared clouds."""

import numpy as np
import pytest

from geomtail import _kernels
from geomtail.functionals import (CechTarget, brute_force_T, brute_force_morse,
                                  canonicalize_graph, compute_T, compute_morse,
                                  score_cech_component, score_edge,
                                  score_persistent_triple,
                                  score_rgg_component)
from geomtail.harness import blocked_point_process_counts
from geomtail.pointproc import PointCloud, make_regime


def _workspace(n_total, n_max):
    table = 1
    while table < 4 * max(n_max, 16):
        table <<= 1
    return (np.full(table, -1, dtype=np.int64),
            np.full(table, -1, dtype=np.int64),
            np.full(max(n_total, 1), -1, dtype=np.int64),
            np.zeros(table, dtype=np.int64),
            np.zeros(max(n_max, 1), dtype=np.int64))


def _random_batch(rng, n, b):
    counts = rng.poisson(n, b).astype(np.int64)
    offsets = np.zeros(b + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    pts = rng.random((int(offsets[-1]), 2))
    return offsets, pts


def test_pair_kernel_matches_compute_T():
    rng = np.random.default_rng(0)
    n, nr2, b = 150, 0.25, 12
    r = np.sqrt(nr2 / n)
    reg = make_regime(2, 2, n, n ** 2 * r ** 2, eps_sparse=np.inf)
    offsets, pts = _random_batch(rng, n, b)
    sk, sh, nxt, touched, _buf = _workspace(int(offsets[-1]), 250)
    out = np.zeros(b, dtype=np.int64)
    _kernels.pair_count_batch(pts, offsets, reg.r, 1.0, 1.0, 1.0,
                              sk, sh, nxt, touched, out)
    score = score_edge(1.0)
    for rep in range(b):
        cloud = PointCloud(points=pts[offsets[rep]:offsets[rep + 1]],
                           regime=reg, seed=None)
        assert out[rep] == compute_T(cloud, score).values[0]


def test_ptriple_kernel_matches_compute_T():
    rng = np.random.default_rng(1)
    n, nr2, b = 120, 0.3, 10
    r = np.sqrt(nr2 / n)
    reg = make_regime(2, 3, n, n ** 3 * r ** 4, eps_sparse=np.inf)
    s, t = 1.2, 1.3
    # random points in [0, 0.8]^2 plus one planted isolated one-cycle triple:
    # equilateral side 1.16*r is born by s and still open at t
    side = 1.16 * reg.r
    planted = np.array([[0.9, 0.9], [0.9 + side, 0.9],
                        [0.9 + side / 2, 0.9 + side * np.sqrt(3) / 2]])
    chunks = []
    counts = []
    for rep in range(b):
        block = np.vstack([rng.random((rng.poisson(n), 2)) * 0.8, planted])
        chunks.append(block)
        counts.append(len(block))
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    pts = np.vstack(chunks)
    sk, sh, nxt, touched, buf = _workspace(int(offsets[-1]), 250)
    out = np.zeros(b, dtype=np.int64)
    _kernels.ptriple_count_batch(pts, offsets, reg.r, s, t,
                                 sk, sh, nxt, touched, buf, out)
    score = score_persistent_triple(s, t)
    for rep in range(b):
        cloud = PointCloud(points=pts[offsets[rep]:offsets[rep + 1]],
                           regime=reg, seed=None)
        want = compute_T(cloud, score).values[0]
        assert out[rep] == want
        assert want >= 1  # the planted triple always scores


def test_morse_kernel_matches_compute_morse():
    rng = np.random.default_rng(2)
    n, nr2, b = 120, 0.3, 10
    r = np.sqrt(nr2 / n)
    reg = make_regime(2, 3, n, n ** 3 * r ** 4, eps_sparse=np.inf)
    t_arr = np.array([0.8, 1.0])
    offsets, pts = _random_batch(rng, n, b)
    sk, sh, nxt, touched, buf = _workspace(int(offsets[-1]), 220)
    out = np.zeros((b, 2), dtype=np.int64)
    _kernels.morse_count_batch(pts, offsets, reg.r, t_arr,
                               sk, sh, nxt, touched, buf, out)
    total = 0
    for rep in range(b):
        cloud = PointCloud(points=pts[offsets[rep]:offsets[rep + 1]],
                           regime=reg, seed=None)
        want = compute_morse(cloud, t_arr).values.astype(np.int64)
        assert np.array_equal(out[rep], want)
        total += want.sum()
    assert total > 0


def test_blocked_kernel_matches_reference():
    rng = np.random.default_rng(3)
    n, rho, b = 400, 9.0, 6
    reg = make_regime(2, 2, n, rho, eps_sparse=np.inf)
    offsets, pts = _random_batch(rng, n, b)
    m_side = 3
    sk, sh, nxt, touched, _buf = _workspace(int(offsets[-1]), 520)
    out = np.zeros(b * m_side * m_side, dtype=np.int64)
    _kernels.blocked_pair_count_batch(pts, offsets, reg.r, 1.0, 1.0, m_side,
                                      sk, sh, nxt, touched, out)
    for rep in range(b):
        cloud = PointCloud(points=pts[offsets[rep]:offsets[rep + 1]],
                           regime=reg, seed=None)
        ref = blocked_point_process_counts(cloud, 2, 1.0, 1.0)
        assert ref.m_side == m_side
        got = out[rep * 9:(rep + 1) * 9]
        assert np.array_equal(got, ref.counts)


def test_brute_kernels_match_python_brute():
    rng = np.random.default_rng(4)
    n, nr2 = 60, 0.35
    r2 = np.sqrt(nr2 / n)
    reg2 = make_regime(2, 2, n, n ** 2 * r2 ** 2, eps_sparse=np.inf)
    reg3 = make_regime(2, 3, n, n ** 3 * r2 ** 4, eps_sparse=np.inf)
    hollow = CechTarget.from_simplices(3, [(0, 1), (1, 2), (0, 2)])
    full = CechTarget.from_simplices(3, [(0, 1, 2)])
    path = canonicalize_graph(3, [(0, 1), (1, 2)])
    for seed in range(6):
        pts = rng.random((rng.poisson(n), 2))
        c2 = PointCloud(points=pts, regime=reg2, seed=None)
        c3 = PointCloud(points=pts, regime=reg3, seed=None)
        assert _kernels.brute_pair_count(pts, reg2.r, 1.0, 1.0, 1.0) == \
            brute_force_T(c2, score_edge(1.0)).values[0]
        assert _kernels.brute_ptriple_count(pts, reg3.r, 1.2, 1.3) == \
            brute_force_T(c3, score_persistent_triple(1.2, 1.3)).values[0]
        outm = np.zeros(2, dtype=np.int64)
        _kernels.brute_morse_count(pts, reg3.r, np.array([0.8, 1.0]), outm)
        assert np.array_equal(outm,
                              brute_force_morse(c3, [0.8, 1.0]).values)
        assert _kernels.brute_triple_class_count(pts, reg3.r, 1.0, 2, -1) == \
            brute_force_T(c3, score_rgg_component(3, path, 1.0)).values[0]
        assert _kernels.brute_triple_class_count(pts, reg3.r, 1.0, 3, 0) == \
            brute_force_T(c3, score_cech_component(3, hollow, 1.0)).values[0]
        assert _kernels.brute_triple_class_count(pts, reg3.r, 1.0, 3, 1) == \
            brute_force_T(c3, score_cech_component(3, full, 1.0)).values[0]


def test_kernel_empty_replicates():
    offsets = np.array([0, 0, 0], dtype=np.int64)
    pts = np.zeros((0, 2))
    sk, sh, nxt, touched, buf = _workspace(1, 16)
    out = np.zeros(2, dtype=np.int64)
    _kernels.pair_count_batch(pts, offsets, 0.01, 1.0, 1.0, 1.0,
                              sk, sh, nxt, touched, out)
    assert out.tolist() == [0, 0]
