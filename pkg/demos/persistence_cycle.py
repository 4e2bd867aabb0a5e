"""Birth and death of planar one-cycles in the alpha filtration.

Walks through the canonical three-point cycle, then runs a random cloud and
verifies the sandwich between the persistent Betti number, the isolated
triple count, and the component-size bound, per sample.
"""

import numpy as np

from geomtail.functionals import compute_T, score_persistent_triple
from geomtail.persistence2d import (alpha_filtration,
                                    component_size_vertex_count, delaunay,
                                    persistence_pairs_dim1,
                                    persistent_betti_1)
from geomtail.pointproc import make_regime, sample_poisson


def main():
    print("== a single equilateral triangle, side 0.3 ==")
    side = 0.3
    pts = 0.2 + side * np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    filt = alpha_filtration(delaunay(pts))
    diagram = persistence_pairs_dim1(filt)
    for birth, death in diagram.pairs:
        print(f"one-cycle born at {birth:.4f}, filled at {death:.4f}")
    print(f"expected: born at the side length {side}, filled at "
          f"2*side/sqrt(3) = {2 * side / np.sqrt(3):.4f}")
    print(f"beta1 just after birth : {persistent_betti_1(filt, 0.31, 0.32)}")
    print(f"beta1 after the fill   : {persistent_betti_1(filt, 0.31, 0.36)}")

    print("\n== random cloud: Betti vs isolated triples, per sample ==")
    s, t = 1.3, 1.35
    n, nr2 = 1000.0, 0.15
    r = np.sqrt(nr2 / n)
    regime = make_regime(2, 3, n, n ** 3 * r ** 4, eps_sparse=1.0)
    score = score_persistent_triple(s, t)
    print(f"{'seed':>5} {'beta1':>6} {'triples':>8} {'bound':>6}")
    for seed in range(8):
        cloud = sample_poisson(regime, seed)
        filt = alpha_filtration(delaunay(cloud.points))
        beta = persistent_betti_1(filt, regime.r * s, regime.r * t)
        triples = int(compute_T(cloud, score).values[0])
        bound = 3 * component_size_vertex_count(cloud.points, regime.r * t)
        assert 0 <= beta - triples <= bound
        print(f"{seed:5d} {beta:6d} {triples:8d} {bound:6d}")
    print("every sample satisfies 0 <= beta1 - triples <= bound")


if __name__ == "__main__":
    main()
