"""Replicated Monte Carlo experiments over sparse-regime point clouds.

One engine drives every experiment: for each grid point (n, rho) it streams
batches of independent replicates, computes an integer statistic per
replicate, and accumulates sums, squared sums, and tail hits.  Statistics
with compiled kernels (isolated pairs, persistent triples, critical points in
the plane) run at acceptance scale; anything else falls back to the readable
reference implementations.

Determinism: every batch draws its generator from
``SeedSequence(seed_root, spawn_key=(point_index, batch_index))`` and partial
results are integer counts reduced in batch order, so results are bitwise
reproducible for any worker count.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import stats as scipy_stats

from . import _kernels
from .errors import ConfigError, GeomtailError, InsufficientData
from .functionals import (CechTarget, canonicalize_graph, compute_T, compute_U,
                          compute_morse, compute_xi, score_cech_component,
                          score_edge, score_morse, score_persistent_triple,
                          score_rgg_component)
from .persistence2d import (alpha_filtration, component_size_vertex_count,
                            delaunay, morse_count_delaunay, persistent_betti_1)
from .pointproc import PointCloud, RegimeParams, make_regime
from .spatial import GridIndex, enumerate_tuples, isolation

STATISTICS = ("T", "N", "U-mass", "xi-count", "beta1")
UNDER_RESOLVED_HITS = 50


def build_score(spec: dict):
    """Construct a built-in score from its serializable spec."""
    known = {"edge", "rgg-component", "cech-component", "persistent-triple",
             "morse"}
    name = spec.get("name")
    if name not in known:
        raise ConfigError(f"unknown score {name!r}; expected one of {sorted(known)}")
    if name == "edge":
        return score_edge(spec.get("t", 1.0))
    if name == "rgg-component":
        target = canonicalize_graph(spec["k"], spec["edges"])
        return score_rgg_component(spec["k"], target, spec["t"])
    if name == "cech-component":
        target = CechTarget.from_simplices(spec["k_plus_1"], spec["simplices"])
        return score_cech_component(spec["k_plus_1"], target, spec["t"])
    if name == "persistent-triple":
        return score_persistent_triple(spec["s"], spec["t"])
    return score_morse(spec["t_list"])


@dataclass(frozen=True)
class ExperimentPlan:
    """A grid of regimes, a statistic, and a replicate budget.

    Replicates are embarrassingly parallel: with ``workers > 1`` the batch
    range is split into contiguous chunks processed by a process pool, and
    the integer partials reduce in chunk order, so results are bit-identical
    for every worker count.
    """

    d: int
    k: int
    grid: tuple
    score: dict
    statistic: str = "T"
    stat_params: dict = field(default_factory=dict)
    component: int = 0
    x: float | None = None
    direction: str = "ge"
    replicates: object = 1000
    seed_root: int = 0
    kind: str = "poisson"
    eps_sparse: float = 0.05
    batch_size: int = 128
    workers: int = 1

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ConfigError(f"unknown statistic {self.statistic!r}")
        if self.direction not in ("ge", "le"):
            raise ConfigError("direction must be 'ge' or 'le'")
        if self.kind not in ("poisson", "binomial"):
            raise ConfigError("kind must be 'poisson' or 'binomial'")
        if np.iterable(self.replicates):
            reps = tuple(int(v) for v in self.replicates)
            if len(reps) != len(self.grid):
                raise ConfigError("per-point replicates must match the grid")
        else:
            reps = tuple(int(self.replicates) for _ in self.grid)
        if any(v < 1 for v in reps):
            raise ConfigError("need at least one replicate per grid point")
        object.__setattr__(self, "replicates", reps)
        object.__setattr__(self, "grid",
                           tuple((float(n), float(rho)) for n, rho in self.grid))

    def regimes(self) -> list:
        """Regime per grid point; raises SparsityViolation outside the guard."""
        return [make_regime(self.d, self.k, n, rho, self.eps_sparse)
                for n, rho in self.grid]

    def statistic_dim(self) -> int:
        if self.statistic in ("U-mass", "xi-count", "beta1"):
            return 1
        if self.statistic == "N":
            return len(self.score["t_list"])
        return build_score(self.score).m


# ---------------------------------------------------------------------------
# per-replicate statistics
# ---------------------------------------------------------------------------

def replicate_statistic(plan: ExperimentPlan, regime: RegimeParams,
                        cloud: PointCloud) -> np.ndarray:
    """Reference (pure Python) statistic of one replicate; integer-valued."""
    if plan.statistic == "T":
        return compute_T(cloud, build_score(plan.score)).values
    if plan.statistic == "N":
        values = compute_morse(cloud, plan.score["t_list"]).values
        if len(cloud) <= 300:
            tri = delaunay(cloud.points)
            radii = [regime.r * t for t in plan.score["t_list"]]
            alt = morse_count_delaunay(tri, radii)
            if not np.array_equal(alt, values.astype(np.int64)):
                raise GeomtailError(
                    "critical-point count disagrees with the Delaunay count")
        return values
    if plan.statistic == "U-mass":
        measure = compute_U(cloud, build_score(plan.score))
        return np.array([round(measure.total_mass * regime.rho)])
    if plan.statistic == "xi-count":
        p = plan.stat_params
        measure = compute_xi(cloud, p["t"], p["L"], plan.k)
        return np.array([round(measure.total_mass * regime.rho)])
    # beta1: persistent Betti number with the per-sample sandwich check
    p = plan.stat_params
    s, t = p["s"], p["t"]
    filt = alpha_filtration(delaunay(cloud.points))
    beta = persistent_betti_1(filt, regime.r * s, regime.r * t)
    triple_sum = compute_T(cloud, score_persistent_triple(s, t)).values[0]
    slack = 3 * component_size_vertex_count(cloud.points, regime.r * t)
    if not 0 <= beta - triple_sum <= slack:
        raise GeomtailError(
            f"persistence sandwich violated: beta1={beta}, "
            f"isolated triples={triple_sum}, bound={slack}")
    return np.array([beta])


class _Workspace:
    """Reusable hash-grid and coordinate buffers for the compiled kernels."""

    def __init__(self):
        self.slot_key = None
        self.slot_head = None
        self.nxt = None
        self.touched = None
        self.buf = None
        self.pts_buf = None

    def ensure(self, max_per_replicate: int, total: int):
        table = 1
        while table < 4 * max(max_per_replicate, 16):
            table <<= 1
        if self.slot_key is None or self.slot_key.shape[0] < table:
            self.slot_key = np.full(table, -1, dtype=np.int64)
            self.slot_head = np.full(table, -1, dtype=np.int64)
            self.touched = np.zeros(table, dtype=np.int64)
        if self.nxt is None or self.nxt.shape[0] < total:
            self.nxt = np.full(max(total, 1), -1, dtype=np.int64)
        if self.buf is None or self.buf.shape[0] < max_per_replicate:
            self.buf = np.zeros(max(max_per_replicate, 1), dtype=np.int64)

    def points(self, rng, total: int, d: int) -> np.ndarray:
        """Fill and return a reused (total, d) uniform coordinate block."""
        if self.pts_buf is None or self.pts_buf.shape[0] < total \
                or self.pts_buf.shape[1] != d:
            self.pts_buf = np.empty((max(total, 1), d))
        view = self.pts_buf[:total]
        rng.random(out=view)
        return view


def _kernel_dispatch(plan: ExperimentPlan):
    """Compiled path for this plan, or None."""
    if plan.d != 2:
        return None
    name = plan.score.get("name")
    if plan.statistic == "T" and name == "edge" and plan.k == 2:
        ts = plan.score.get("t", 1.0)
        if np.iterable(ts):
            if len(ts) != 1:
                return None
            ts = ts[0]
        t = float(ts)

        def run(pts, offsets, regime, ws: _Workspace, out2d):
            out = np.zeros(offsets.shape[0] - 1, dtype=np.int64)
            _kernels.pair_count_batch(pts, offsets, regime.r, t, t, t,
                                      ws.slot_key, ws.slot_head, ws.nxt,
                                      ws.touched, out)
            out2d[:, 0] = out

        return run
    if plan.statistic == "T" and name == "persistent-triple" and plan.k == 3:
        s, t = float(plan.score["s"]), float(plan.score["t"])

        def run(pts, offsets, regime, ws: _Workspace, out2d):
            out = np.zeros(offsets.shape[0] - 1, dtype=np.int64)
            _kernels.ptriple_count_batch(pts, offsets, regime.r, s, t,
                                         ws.slot_key, ws.slot_head, ws.nxt,
                                         ws.touched, ws.buf, out)
            out2d[:, 0] = out

        return run
    if plan.statistic == "N" and plan.k == 3:
        t_arr = np.asarray([float(t) for t in plan.score["t_list"]])

        def run(pts, offsets, regime, ws: _Workspace, out2d):
            out = np.zeros((offsets.shape[0] - 1, t_arr.shape[0]), dtype=np.int64)
            _kernels.morse_count_batch(pts, offsets, regime.r, t_arr,
                                       ws.slot_key, ws.slot_head, ws.nxt,
                                       ws.touched, ws.buf, out)
            out2d[:, :] = out

        return run
    return None


def _batch_points(rng, n: float, b: int, kind: str, d: int = 2,
                  ws: "_Workspace | None" = None):
    if kind == "poisson":
        counts = rng.poisson(n, b).astype(np.int64)
    else:
        counts = np.full(b, int(round(n)), dtype=np.int64)
    offsets = np.zeros(b + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    total = int(offsets[-1])
    if ws is not None:
        pts = ws.points(rng, total, d)
    else:
        pts = rng.random((total, d))
    return counts, offsets, pts


@dataclass
class PointResult:
    """Accumulated replicate statistics at one grid point."""

    n: float
    rho: float
    r: float
    replicates: int
    sums: np.ndarray
    sumsq: np.ndarray
    hits: int

    def mean(self) -> np.ndarray:
        """Mean of statistic / rho."""
        return self.sums / self.replicates / self.rho

    def stderr(self) -> np.ndarray:
        """Standard error of the mean of statistic / rho."""
        if self.replicates < 2:
            return np.full_like(self.sums, np.nan)
        var = (self.sumsq - self.sums ** 2 / self.replicates) / (self.replicates - 1)
        return np.sqrt(np.maximum(var, 0.0) / self.replicates) / self.rho


def _run_batches(plan: ExperimentPlan, pt_idx: int, first_batch: int,
                 last_batch: int, progress=None):
    """Partial sums over a contiguous range of batch indices."""
    regime = plan.regimes()[pt_idx]
    reps = plan.replicates[pt_idx]
    m = plan.statistic_dim()
    kernel = _kernel_dispatch(plan)
    ws = _Workspace()
    sums = np.zeros(m)
    sumsq = np.zeros(m)
    hits = 0
    for batch_idx in range(first_batch, last_batch):
        done = batch_idx * plan.batch_size
        b = min(plan.batch_size, reps - done)
        if b <= 0:
            break
        ss = np.random.SeedSequence(plan.seed_root, spawn_key=(pt_idx, batch_idx))
        rng = np.random.Generator(np.random.PCG64(ss))
        use_ws = ws if kernel is not None else None
        counts, offsets, pts = _batch_points(rng, regime.n, b, plan.kind,
                                             plan.d, ws=use_ws)
        stats = np.zeros((b, m), dtype=np.int64)
        if kernel is not None:
            ws.ensure(int(counts.max()) if b else 16, int(offsets[-1]))
            kernel(pts, offsets, regime, ws, stats)
        else:
            for rep in range(b):
                cloud = PointCloud(points=pts[offsets[rep]:offsets[rep + 1]],
                                   regime=regime, seed=None, kind=plan.kind)
                stats[rep] = replicate_statistic(plan, regime, cloud)
        sums += stats.sum(axis=0)
        sumsq += (stats.astype(float) ** 2).sum(axis=0)
        if plan.x is not None:
            norm = stats[:, plan.component] / regime.rho
            if plan.direction == "ge":
                hits += int((norm >= plan.x).sum())
            else:
                hits += int((norm <= plan.x).sum())
        if progress is not None:
            progress(pt_idx, done + b, reps)
    return sums, sumsq, hits


def _chunk_worker(plan_dict: dict, pt_idx: int, first_batch: int,
                  last_batch: int):
    plan = ExperimentPlan(**plan_dict)
    return _run_batches(plan, pt_idx, first_batch, last_batch)


def run_point(plan: ExperimentPlan, pt_idx: int,
              progress=None) -> PointResult:
    """Stream all replicates of one grid point through batches."""
    regime = plan.regimes()[pt_idx]
    reps = plan.replicates[pt_idx]
    n_batches = -(-reps // plan.batch_size)
    if plan.workers <= 1 or n_batches < 2 * plan.workers:
        sums, sumsq, hits = _run_batches(plan, pt_idx, 0, n_batches,
                                         progress=progress)
    else:
        from concurrent.futures import ProcessPoolExecutor

        plan_dict = asdict(plan)
        bounds = np.linspace(0, n_batches, plan.workers + 1).astype(int)
        sums = sumsq = None
        hits = 0
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            futures = [pool.submit(_chunk_worker, plan_dict, pt_idx,
                                   int(lo), int(hi))
                       for lo, hi in zip(bounds[:-1], bounds[1:])]
            # collect in submission (= chunk) order for a deterministic sum
            for done_chunks, fut in enumerate(futures, start=1):
                part_sums, part_sumsq, part_hits = fut.result()
                sums = part_sums if sums is None else sums + part_sums
                sumsq = part_sumsq if sumsq is None else sumsq + part_sumsq
                hits += part_hits
                if progress is not None:
                    progress(pt_idx, min(int(bounds[done_chunks])
                                         * plan.batch_size, reps), reps)
    return PointResult(n=regime.n, rho=regime.rho, r=regime.r, replicates=reps,
                       sums=sums, sumsq=sumsq, hits=hits)


# ---------------------------------------------------------------------------
# law of large numbers and tails
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LLNPoint:
    n: float
    rho: float
    r: float
    replicates: int
    mean: np.ndarray
    stderr: np.ndarray


def run_lln(plan: ExperimentPlan, progress=None) -> list:
    """Per-regime mean and standard error of statistic / rho."""
    out = []
    for idx in range(len(plan.grid)):
        res = run_point(plan, idx, progress=progress)
        out.append(LLNPoint(n=res.n, rho=res.rho, r=res.r,
                            replicates=res.replicates, mean=res.mean(),
                            stderr=res.stderr()))
    return out


def wilson_interval(hits: int, total: int, z: float = 1.96):
    """Wilson 95% interval for a binomial proportion."""
    if total == 0:
        return 0.0, 1.0
    p = hits / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * np.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


@dataclass(frozen=True)
class TailEstimate:
    """Tail hit fraction at one grid point, with its mean as a by-product."""

    n: float
    rho: float
    r: float
    replicates: int
    hits: int
    p_hat: float
    ci: tuple
    under_resolved: bool
    mean: np.ndarray
    stderr: np.ndarray


def estimate_tail(plan: ExperimentPlan, progress=None) -> list:
    """Fraction of replicates with statistic/rho in the deviation half-line.

    Points with fewer than 50 hits are flagged under-resolved rather than
    dropped; their Wilson intervals remain valid.
    """
    if plan.x is None:
        raise ConfigError("tail estimation needs a deviation level x")
    out = []
    for idx in range(len(plan.grid)):
        res = run_point(plan, idx, progress=progress)
        p_hat = res.hits / res.replicates
        out.append(TailEstimate(
            n=res.n, rho=res.rho, r=res.r, replicates=res.replicates,
            hits=res.hits, p_hat=p_hat,
            ci=wilson_interval(res.hits, res.replicates),
            under_resolved=res.hits < UNDER_RESOLVED_HITS,
            mean=res.mean(), stderr=res.stderr()))
    return out


@dataclass(frozen=True)
class SlopeFit:
    """Weighted least squares fit of log p-hat against rho."""

    slope: float
    intercept: float
    slope_se: float
    slope_ci: tuple
    n_points: int


def fit_ldp_slope(estimates) -> SlopeFit:
    """WLS of log p-hat vs rho, weights from the binomial variance of log p-hat.

    Only points with 0 < p_hat < 1 enter; fewer than three such points raise
    :class:`InsufficientData`.  The slope estimates the negated infimum of
    the rate function over the deviation set; its CI comes from the delta
    method with the binomial variance taken as known.
    """
    usable = [e for e in estimates if 0 < e.hits < e.replicates]
    if len(usable) < 3:
        raise InsufficientData(
            f"slope fit needs >= 3 points with hits, got {len(usable)}")
    rho = np.array([e.rho for e in usable])
    y = np.log(np.array([e.p_hat for e in usable]))
    w = np.array([e.replicates * e.p_hat / (1.0 - e.p_hat) for e in usable])
    rho_bar = float(np.sum(w * rho) / w.sum())
    y_bar = float(np.sum(w * y) / w.sum())
    sxx = float(np.sum(w * (rho - rho_bar) ** 2))
    slope = float(np.sum(w * (rho - rho_bar) * (y - y_bar)) / sxx)
    intercept = y_bar - slope * rho_bar
    se = float(np.sqrt(1.0 / sxx))
    return SlopeFit(slope=slope, intercept=intercept, slope_se=se,
                    slope_ci=(slope - 1.96 * se, slope + 1.96 * se),
                    n_points=len(usable))


# ---------------------------------------------------------------------------
# blocked process and Poisson approximation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockedCounts:
    """Per-block tuple counts for one cloud (blocks in row-major order)."""

    counts: np.ndarray
    m_side: int

    @property
    def block_volume(self) -> float:
        return 1.0 / (self.m_side * self.m_side)


def blocked_point_process_counts(cloud: PointCloud, k: int, t: float,
                                 L: float) -> BlockedCounts:
    """Counts of within-block isolated concentrated k-subsets, per block.

    The unit square is partitioned into m^2 blocks with m = floor(rho^(1/d));
    a subset counts for a block iff all members lie in it, its diameter is at
    most r*L, and no other point of the same block comes within r*t of a
    member (restriction to the block, so straddling subsets never count).
    """
    regime = cloud.regime
    if regime.d != 2:
        raise ConfigError("blocked counts are implemented for d = 2")
    m_side = int(np.floor(regime.rho ** (1.0 / regime.d)))
    if m_side < 1:
        raise ConfigError("rho too small: no complete block fits")
    counts = np.zeros(m_side * m_side, dtype=np.int64)
    pts = cloud.points
    block_ids = np.minimum((pts * m_side).astype(np.int64), m_side - 1)
    flat = block_ids[:, 0] * m_side + block_ids[:, 1]
    for block in range(m_side * m_side):
        sel = np.where(flat == block)[0]
        if sel.size < k:
            continue
        sub = PointCloud(points=pts[sel], regime=regime, seed=None,
                         kind=cloud.kind)
        index = GridIndex(sub.points, regime.r * max(L, t))
        total = 0
        for rec in enumerate_tuples(sub, k, L, index=index):
            total += isolation(rec, sub, t, index=index)
        counts[block] = total
    return BlockedCounts(counts=counts, m_side=m_side)


def pooled_blocked_counts(n: float, rho: float, d: int, k: int, t: float,
                          L: float, replicates: int, seed_root: int,
                          eps_sparse: float = 0.05,
                          kind: str = "poisson",
                          batch_size: int = 16) -> np.ndarray:
    """Per-block counts pooled over replicates (compiled path, k = 2)."""
    if k != 2 or d != 2:
        raise ConfigError("the pooled blocked path supports d = 2, k = 2")
    regime = make_regime(d, k, n, rho, eps_sparse)
    m_side = int(np.floor(rho ** (1.0 / d)))
    if m_side < 1:
        raise ConfigError("rho too small: no complete block fits")
    nblocks = m_side * m_side
    ws = _Workspace()
    pooled = []
    done = 0
    batch_idx = 0
    while done < replicates:
        b = min(batch_size, replicates - done)
        ss = np.random.SeedSequence(seed_root, spawn_key=(0, batch_idx))
        rng = np.random.Generator(np.random.PCG64(ss))
        counts, offsets, pts = _batch_points(rng, regime.n, b, kind, d, ws=ws)
        ws.ensure(int(counts.max()) if b else 16, int(offsets[-1]))
        out = np.zeros(b * nblocks, dtype=np.int64)
        _kernels.blocked_pair_count_batch(pts, offsets, regime.r, t, L,
                                          m_side, ws.slot_key, ws.slot_head,
                                          ws.nxt, ws.touched, out)
        pooled.append(out)
        done += b
        batch_idx += 1
    return np.concatenate(pooled)


@dataclass(frozen=True)
class PoissonApproxReport:
    """Chi-square fit of pooled block counts against a Poisson law."""

    lambda_target: float
    n_counts: int
    chi2: float
    dof: int
    p_value: float
    tv_estimate: float

    def passed(self, significance: float = 1e-3) -> bool:
        return self.p_value > significance


def poisson_approx_test(counts: np.ndarray, lambda_target: float) -> PoissonApproxReport:
    """Goodness of fit of integer counts against Poisson(lambda_target).

    Bins {0, 1, ..., J-1, >=J} with J chosen so the expected tail bin mass
    stays at least 5; the total-variation estimate compares the empirical
    histogram with the Poisson mass function over the observed support.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.size
    if n == 0:
        raise ValueError("no counts to test")
    j_max = 1
    while n * scipy_stats.poisson.sf(j_max - 1, lambda_target) >= 5.0:
        j_max += 1
    j_max = max(j_max - 1, 1)
    # Merge leading values until the first bin holds expected mass >= 5.
    j_min = 0
    while j_min < j_max - 1 and \
            n * scipy_stats.poisson.cdf(j_min, lambda_target) < 5.0:
        j_min += 1
    edges = list(range(j_min, j_max))  # bins: <=j_min, j_min+1..j_max-1, >=j_max
    observed = np.zeros(len(edges) + 1)
    for c in counts:
        c = int(c)
        if c <= j_min:
            observed[0] += 1
        elif c >= j_max:
            observed[-1] += 1
        else:
            observed[c - j_min] += 1
    expected = np.concatenate((
        [n * scipy_stats.poisson.cdf(j_min, lambda_target)],
        [n * scipy_stats.poisson.pmf(j, lambda_target)
         for j in range(j_min + 1, j_max)],
        [n * scipy_stats.poisson.sf(j_max - 1, lambda_target)]))
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    dof = len(observed) - 1
    p_value = float(scipy_stats.chi2.sf(chi2, dof))
    top = int(counts.max())
    emp = np.bincount(counts, minlength=top + 1) / n
    model = scipy_stats.poisson.pmf(np.arange(top + 1), lambda_target)
    tv = 0.5 * (np.abs(emp - model).sum()
                + float(scipy_stats.poisson.sf(top, lambda_target)))
    return PoissonApproxReport(lambda_target=lambda_target, n_counts=n,
                               chi2=chi2, dof=dof, p_value=p_value,
                               tv_estimate=float(tv))


def blocked_lambda_target(rho: float, m_side: int, region_mass_tau: float) -> float:
    """Poisson mean for one block: rho * block volume * tau(E).

    Equals tau(E) exactly when rho is a perfect d-th power (interior-block
    value, no boundary correction).
    """
    return region_mass_tau * rho / float(m_side * m_side)


# ---------------------------------------------------------------------------
# sampler comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairedComparison:
    """Poisson vs binomial runs of one plan."""

    points: list
    poisson_slope: SlopeFit | None
    binomial_slope: SlopeFit | None

    @property
    def means_agree(self) -> bool:
        return all(pt["agree"] for pt in self.points)

    @property
    def slopes_overlap(self) -> bool | None:
        if self.poisson_slope is None or self.binomial_slope is None:
            return None
        a, b = self.poisson_slope.slope_ci, self.binomial_slope.slope_ci
        return a[0] <= b[1] and b[0] <= a[1]


def poisson_vs_binomial(plan: ExperimentPlan, progress=None) -> PairedComparison:
    """Run one plan under both samplers and compare means and tail slopes.

    Means agree when they differ by at most three combined standard errors;
    the slope comparison is attempted only when the plan defines a deviation
    level and enough grid points resolve.
    """
    if any(n != round(n) for n, _rho in plan.grid):
        raise ConfigError("binomial comparison needs integer n")
    plan_p = replace(plan, kind="poisson")
    plan_b = replace(plan, kind="binomial", seed_root=plan.seed_root + 1)
    slope_p = slope_b = None
    if plan.x is not None:
        tails_p = estimate_tail(plan_p, progress=progress)
        tails_b = estimate_tail(plan_b, progress=progress)
        try:
            slope_p = fit_ldp_slope(tails_p)
            slope_b = fit_ldp_slope(tails_b)
        except InsufficientData:
            pass
        res_p = [(e.mean, e.stderr) for e in tails_p]
        res_b = [(e.mean, e.stderr) for e in tails_b]
    else:
        lln_p = run_lln(plan_p, progress=progress)
        lln_b = run_lln(plan_b, progress=progress)
        res_p = [(e.mean, e.stderr) for e in lln_p]
        res_b = [(e.mean, e.stderr) for e in lln_b]
    points = []
    for (n, rho), (mp, sp), (mb, sb) in zip(plan.grid, res_p, res_b):
        c = plan.component
        combined = float(np.sqrt(sp[c] ** 2 + sb[c] ** 2))
        delta = float(abs(mp[c] - mb[c]))
        points.append({"n": n, "rho": rho, "mean_poisson": float(mp[c]),
                       "se_poisson": float(sp[c]), "mean_binomial": float(mb[c]),
                       "se_binomial": float(sb[c]), "combined_se": combined,
                       "agree": delta <= 3.0 * combined})
    return PairedComparison(points=points, poisson_slope=slope_p,
                            binomial_slope=slope_b)
