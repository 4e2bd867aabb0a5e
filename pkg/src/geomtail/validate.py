"""Self-contained oracle-equivalence and invariant checks.

Each check pits a production path against an independent oracle (brute-force
enumeration, grid sampling, a closed form) at desk scale and reports a
pass/fail line.  The CLI ``validate`` subcommand runs all of them; the test
suite runs them too and additionally verifies that an injected fault makes
them fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import functionals
from .functionals import (CechTarget, brute_force_T, brute_force_morse,
                          canonicalize_graph, compute_morse,
                          score_cech_component, score_edge,
                          score_persistent_triple, score_rgg_component)
from .geometry import cech_one_cycle, enclosing_radius, triple_intersection_oracle
from .persistence2d import alpha_filtration, delaunay, morse_count_delaunay
from .pointproc import make_regime, rng_from_seed, sample_poisson
from .rates import (DiscreteMeasure, RateFunctionHandle, ScoreLaw, duality_gap,
                    rate_I, rate_I_poisson_closed_form)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _oracle_scores():
    tri_hollow = CechTarget.from_simplices(3, [(0, 1), (1, 2), (0, 2)])
    return [
        ("edge t=1", score_edge(1.0), 2),
        ("rgg path-3 t=1",
         score_rgg_component(3, canonicalize_graph(3, [(0, 1), (1, 2)]), 1.0), 3),
        ("cech hollow-3 t=1", score_cech_component(3, tri_hollow, 1.0), 3),
        ("persistent-triple (1.05,1.15)", score_persistent_triple(1.05, 1.15), 3),
    ]


def check_grid_vs_brute(seed: int = 0, n: int = 60, n_seeds: int = 5,
                        nr2: float = 0.2) -> CheckResult:
    """Grid-based T equals direct O(n^k) enumeration, exact integer equality."""
    failures = []
    for label, score, k in _oracle_scores():
        r = float(np.sqrt(nr2 / n))
        rho = float(n) ** k * r ** (2 * (k - 1))
        regime = make_regime(2, k, n, rho, eps_sparse=1.0)
        for s in range(n_seeds):
            cloud = sample_poisson(regime, np.random.SeedSequence(seed, spawn_key=(s,)))
            fast = functionals.compute_T(cloud, score).values
            slow = brute_force_T(cloud, score).values
            if not np.array_equal(fast, slow):
                failures.append(f"{label} seed {s}: {fast} != {slow}")
    return CheckResult("compute_T grid vs brute force", not failures,
                       "; ".join(failures) or "exact match")


def check_morse_vs_delaunay(seed: int = 1, n: int = 60, n_seeds: int = 5,
                            nr2: float = 0.2) -> CheckResult:
    """Triple-scan critical-point count equals the Delaunay-based count."""
    t_list = [0.8, 1.0]
    r = float(np.sqrt(nr2 / n))
    rho = float(n) ** 3 * r ** 4
    regime = make_regime(2, 3, n, rho, eps_sparse=1.0)
    failures = []
    for s in range(n_seeds):
        cloud = sample_poisson(regime, np.random.SeedSequence(seed, spawn_key=(s,)))
        scan = compute_morse(cloud, t_list).values
        brute = brute_force_morse(cloud, t_list).values
        tri = morse_count_delaunay(delaunay(cloud.points),
                                   [regime.r * t for t in t_list])
        if not (np.array_equal(scan, brute) and np.array_equal(scan, tri)):
            failures.append(f"seed {s}: scan={scan}, brute={brute}, delaunay={tri}")
    return CheckResult("critical-point scan vs brute vs Delaunay", not failures,
                       "; ".join(failures) or "exact match")


def check_duality(seed: int = 2, n_instances: int = 25) -> CheckResult:
    """Entropy duality gap vanishes once the analytic maximizer is included."""
    rng = rng_from_seed(seed)
    worst = 0.0
    for _ in range(n_instances):
        masses = rng.uniform(0.05, 2.0, size=10)
        tau = DiscreteMeasure(locations=tuple((i,) for i in range(10)),
                              masses=masses)
        f = rng.uniform(-1.5, 1.5, size=10)
        grid = [masses * rng.uniform(0.2, 2.0, size=10) for _ in range(8)]
        gap = duality_gap(tau, f, grid)
        worst = max(worst, abs(gap))
        if gap < -1e-12:
            return CheckResult("entropy duality gap", False,
                               f"negative gap {gap:.3e}")
    return CheckResult("entropy duality gap", worst <= 1e-10,
                       f"worst |gap| = {worst:.3e}")


def check_newton_vs_closed_form(mu: float = np.pi / 2) -> CheckResult:
    """Newton rate evaluation matches the one-component closed form."""
    law = ScoreLaw.from_atoms({(1,): mu}, L=1.0, k=2, d=2)
    handle = RateFunctionHandle(law)
    worst = 0.0
    for x in np.linspace(0.2 * mu, 3.0 * mu, 20):
        newton = rate_I(handle, [x])
        closed = rate_I_poisson_closed_form(mu, float(x))
        worst = max(worst, abs(newton - closed))
    return CheckResult("Newton vs closed-form rate", worst <= 1e-8,
                       f"worst |diff| = {worst:.3e}")


def check_cech_predicate(seed: int = 3, n_triples: int = 200) -> CheckResult:
    """Analytic one-cycle predicate agrees with the grid-sampling oracle."""
    rng = rng_from_seed(seed)
    bad = 0
    for _ in range(n_triples):
        pts = rng.random((3, 2))
        longest = float(np.sqrt(max(
            ((pts[0] - pts[1]) ** 2).sum(),
            ((pts[1] - pts[2]) ** 2).sum(),
            ((pts[2] - pts[0]) ** 2).sum())))
        radius = longest * rng.uniform(0.85, 1.35)
        step = 1e-3 * radius
        crit_pair = longest
        crit_fill = 2.0 * enclosing_radius(pts[0], pts[1], pts[2])
        if min(abs(radius - crit_pair), abs(radius - crit_fill)) < 10 * step:
            continue
        analytic = cech_one_cycle(pts[0], pts[1], pts[2], radius)
        pairwise = longest <= radius
        filled = triple_intersection_oracle(pts[0], pts[1], pts[2],
                                            radius / 2.0, step)
        oracle = 1 if (pairwise and not filled) else 0
        if analytic != oracle:
            bad += 1
    return CheckResult("one-cycle predicate vs grid oracle", bad == 0,
                       f"{bad} disagreements / {n_triples}")


def check_filtration_bookkeeping(seed: int = 4, n_clouds: int = 5,
                                 n: int = 150) -> CheckResult:
    """Monotone filtration values and Euler-consistent persistence pairing."""
    from .persistence2d import _reduce

    rng = rng_from_seed(seed)
    failures = []
    for c in range(n_clouds):
        pts = rng.random((n, 2))
        tri = delaunay(pts)
        filt = alpha_filtration(tri)
        values = filt.values_by_simplex()
        for dim, verts, value in filt.simplices:
            if dim == 1:
                for v in verts:
                    if values[(v,)] > value:
                        failures.append(f"cloud {c}: vertex above edge")
            elif dim == 2:
                for e in ((verts[0], verts[1]), (verts[0], verts[2]),
                          (verts[1], verts[2])):
                    if values[e] > value + 1e-12:
                        failures.append(f"cloud {c}: edge above triangle")
        pairs = _reduce(filt)
        finite = sum(1 for _b, d in pairs if np.isfinite(d))
        infinite = len(pairs) - finite
        euler_cycles = tri.edges.shape[0] - n + 1  # one component, generic cloud
        if finite + infinite != euler_cycles:
            failures.append(
                f"cloud {c}: pairs {finite}+{infinite} != E-V+C {euler_cycles}")
    return CheckResult("alpha filtration bookkeeping", not failures,
                       "; ".join(failures[:3]) or "monotone and Euler-consistent")


def run_validation(seed: int = 0) -> list:
    """All checks, deterministic given the seed."""
    return [
        check_grid_vs_brute(seed=seed),
        check_morse_vs_delaunay(seed=seed + 1),
        check_duality(seed=seed + 2),
        check_newton_vs_closed_form(),
        check_cech_predicate(seed=seed + 3),
        check_filtration_bookkeeping(seed=seed + 4),
    ]
