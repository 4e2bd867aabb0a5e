import itertools

import numpy as np
import pytest

from geomtail.functionals import compute_morse, score_persistent_triple, compute_T
from geomtail.persistence2d import (AlphaFiltration, Triangulation,
                                    alpha_filtration,
                                    component_size_vertex_count, delaunay,
                                    morse_count_delaunay,
                                    persistence_pairs_dim1,
                                    persistent_betti_1)
from geomtail.pointproc import PointCloud, make_regime, sample_poisson


def _equilateral(side, offset=0.0):
    return offset + np.array([[0.0, 0.0], [side, 0.0],
                              [side / 2, side * np.sqrt(3) / 2]])


def test_delaunay_triangle():
    tri = delaunay(_equilateral(0.5, 0.2))
    assert tri.triangles.shape == (1, 3)
    assert tri.edges.shape == (3, 2)


def test_delaunay_quad_euler():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0 + 1e-6]])
    tri = delaunay(pts)
    assert tri.triangles.shape[0] == 2
    assert tri.edges.shape[0] == 5
    # V - E + T = 1 for a triangulated disc
    assert 4 - 5 + 2 == 1


def test_delaunay_collinear_chain():
    pts = np.array([[0.1, 0.1], [0.5, 0.5], [0.3, 0.3], [0.9, 0.9]])
    tri = delaunay(pts)
    assert tri.triangles.shape[0] == 0
    assert sorted(map(tuple, tri.edges)) == [(0, 2), (1, 3), (2, 1)] or \
        tri.edges.shape[0] == 3


def test_delaunay_empty_circumdisk():
    rng = np.random.default_rng(0)
    from geomtail.geometry import circumcircle
    for seed in range(10):
        pts = rng.random((120, 2))
        tri = delaunay(pts)
        for row in tri.triangles:
            circ = circumcircle(pts[row[0]], pts[row[1]], pts[row[2]])
            d2 = ((pts - circ.center) ** 2).sum(axis=1)
            inside = d2 < circ.radius ** 2 * (1 - 1e-9)
            inside[row] = False
            assert not inside.any()


def test_delaunay_triangle_count_identity():
    rng = np.random.default_rng(1)
    from scipy.spatial import ConvexHull
    for seed in range(10):
        pts = rng.random((80, 2))
        tri = delaunay(pts)
        hull = ConvexHull(pts)
        assert tri.triangles.shape[0] == 2 * len(pts) - 2 - hull.vertices.size


def test_alpha_filtration_equilateral():
    side = 0.5
    filt = alpha_filtration(delaunay(_equilateral(side, 0.2)))
    values = filt.values_by_simplex()
    for e in ((0, 1), (0, 2), (1, 2)):
        assert values[e] == pytest.approx(side)
    assert values[(0, 1, 2)] == pytest.approx(2 * side / np.sqrt(3))


def test_alpha_filtration_right_triangle():
    pts = np.array([[0.1, 0.1], [0.5, 0.1], [0.1, 0.4]])
    filt = alpha_filtration(delaunay(pts))
    values = filt.values_by_simplex()
    hyp = np.hypot(0.4, 0.3)
    assert values[(1, 2)] == pytest.approx(hyp)
    assert values[(0, 1, 2)] == pytest.approx(hyp)  # circumradius = hyp/2


def test_alpha_gabriel_matches_full_scan():
    rng = np.random.default_rng(2)
    for seed in range(5):
        pts = rng.random((60, 2))
        tri = delaunay(pts)
        filt = alpha_filtration(tri)
        values = filt.values_by_simplex()
        for u, v in map(tuple, tri.edges):
            mid = 0.5 * (pts[u] + pts[v])
            rad2 = 0.25 * ((pts[u] - pts[v]) ** 2).sum()
            d2 = ((pts - mid) ** 2).sum(axis=1)
            d2[[u, v]] = np.inf
            gabriel = not (d2 < rad2).any()
            if gabriel:
                assert values[(u, v)] == pytest.approx(
                    np.sqrt(((pts[u] - pts[v]) ** 2).sum()))
            else:
                assert values[(u, v)] > np.sqrt(rad2) * 2 - 1e-12


def test_alpha_monotone_under_inclusion():
    rng = np.random.default_rng(3)
    for seed in range(10):
        pts = rng.random((100, 2))
        filt = alpha_filtration(delaunay(pts))
        values = filt.values_by_simplex()
        for dim, verts, value in filt.simplices:
            for face in itertools.combinations(verts, len(verts) - 1):
                if len(face) >= 1:
                    assert values[tuple(sorted(face))] <= value + 1e-12


def test_filtration_sorted_faces_first():
    rng = np.random.default_rng(4)
    pts = rng.random((50, 2))
    filt = alpha_filtration(delaunay(pts))
    position = {verts: i for i, (_, verts, _) in enumerate(filt.simplices)}
    for dim, verts, _value in filt.simplices:
        for face in itertools.combinations(verts, len(verts) - 1):
            if face:
                assert position[tuple(sorted(face))] < position[verts]


def test_persistent_betti_equilateral():
    filt = alpha_filtration(delaunay(_equilateral(1.0 / 3, 0.2)))
    side = 1.0 / 3
    # cycle born at side, filled at 2*side/sqrt(3)
    assert persistent_betti_1(filt, 1.05 * side, 1.10 * side) == 1
    assert persistent_betti_1(filt, 0.9 * side, 1.0 * side) == 0
    assert persistent_betti_1(filt, 1.05 * side, 1.20 * side) == 0
    # s = t above the fill value: ordinary Betti number of a filled triangle
    assert persistent_betti_1(filt, 1.2 * side, 1.2 * side) == 0


def test_persistent_betti_validates_order():
    filt = alpha_filtration(delaunay(_equilateral(0.3, 0.2)))
    with pytest.raises(ValueError):
        persistent_betti_1(filt, 0.5, 0.4)


def test_empty_cloud_diagram():
    filt = alpha_filtration(delaunay(np.zeros((0, 2))))
    assert persistent_betti_1(filt, 0.1, 0.2) == 0
    assert persistence_pairs_dim1(filt).pairs == []


def test_betti_monotonicity_in_s_and_t():
    rng = np.random.default_rng(5)
    pts = rng.random((150, 2)) * 0.3 + 0.3
    filt = alpha_filtration(delaunay(pts))
    svals = np.linspace(0.01, 0.1, 6)
    for i, s in enumerate(svals):
        for t_lo, t_hi in zip(svals[i:], svals[i + 1:]):
            assert persistent_betti_1(filt, s, t_hi) <= \
                persistent_betti_1(filt, s, t_lo)
    for s_lo, s_hi in zip(svals, svals[1:]):
        t = svals[-1]
        assert persistent_betti_1(filt, s_lo, t) <= \
            persistent_betti_1(filt, s_hi, t)


def test_diagram_pairs_positive_persistence():
    rng = np.random.default_rng(6)
    pts = rng.random((200, 2))
    diag = persistence_pairs_dim1(alpha_filtration(delaunay(pts)))
    for b, d in diag.pairs:
        assert b < d


def test_diagram_csv_format():
    diag = persistence_pairs_dim1(alpha_filtration(delaunay(_equilateral(0.4, 0.2))))
    text = diag.to_csv()
    lines = text.strip().split("\r\n")
    assert lines[0] == "dim,birth,death"
    dim, birth, death = lines[1].split(",")
    assert dim == "1"
    assert float(birth) == pytest.approx(0.4)
    assert float(death) == pytest.approx(0.8 / np.sqrt(3))


def test_euler_pairing_bookkeeping():
    from geomtail.persistence2d import _reduce
    rng = np.random.default_rng(7)
    for seed in range(10):
        pts = rng.random((120, 2))
        tri = delaunay(pts)
        filt = alpha_filtration(tri)
        pairs = _reduce(filt)
        # E - V + C independent one-cycles over the filtration's lifetime
        assert len(pairs) == tri.edges.shape[0] - len(pts) + 1


def test_morse_count_delaunay_single_triangles():
    acute = delaunay(_equilateral(0.4, 0.2))
    assert morse_count_delaunay(acute, [0.4]).tolist() == [1]   # R = 0.231
    assert morse_count_delaunay(acute, [0.2]).tolist() == [0]
    obtuse = delaunay(np.array([[0.1, 0.1], [0.9, 0.1], [0.5, 0.15]]))
    assert morse_count_delaunay(obtuse, [5.0]).tolist() == [0]


def test_morse_count_matches_triple_scan():
    n, nr2 = 90, 0.35
    r = np.sqrt(nr2 / n)
    reg = make_regime(2, 3, n, n ** 3 * r ** 4, eps_sparse=np.inf)
    for seed in range(8):
        cloud = sample_poisson(reg, seed)
        scan = compute_morse(cloud, [0.8, 1.0]).values
        tri = morse_count_delaunay(delaunay(cloud.points),
                                   [reg.r * 0.8, reg.r * 1.0])
        assert np.array_equal(scan.astype(np.int64), tri)


def test_component_size_vertex_count():
    r_edge = 0.05
    chain = np.array([[0.1, 0.1], [0.14, 0.1], [0.18, 0.1], [0.22, 0.1]])
    assert component_size_vertex_count(chain, r_edge) == 4
    assert component_size_vertex_count(chain[:3], r_edge) == 0
    two_pairs = np.array([[0.1, 0.1], [0.13, 0.1], [0.8, 0.8], [0.83, 0.8]])
    assert component_size_vertex_count(two_pairs, r_edge) == 0


def test_morse_inequality_sandwich():
    # 0 <= beta1(s,t) - isolated triples <= 3 * (vertices in components >= 4)
    s, t = 1.3, 1.35
    n, nr2 = 300, 0.25
    r = np.sqrt(nr2 / n)
    reg = make_regime(2, 3, n, n ** 3 * r ** 4, eps_sparse=np.inf)
    nonzero = 0
    for seed in range(25):
        cloud = sample_poisson(reg, seed)
        filt = alpha_filtration(delaunay(cloud.points))
        beta = persistent_betti_1(filt, reg.r * s, reg.r * t)
        triples = compute_T(cloud, score_persistent_triple(s, t)).values[0]
        bound = 3 * component_size_vertex_count(cloud.points, reg.r * t)
        assert 0 <= beta - triples <= bound
        nonzero += beta > 0
    assert nonzero > 0
