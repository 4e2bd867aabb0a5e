"""Command-line entry point.

Subcommands: ``simulate`` (LLN and tail experiments), ``rate`` (score law and
rate-function curves), ``persistence`` (one-cloud persistence diagnostics),
``validate`` (oracle-equivalence suite).  Experiments are configured by a
single JSON file so runs are diffable and archivable; all randomness flows
from one root seed (overridable with --seed), never from ambient entropy.

Outputs are RFC-4180 CSV ("." decimal separator) and UTF-8 JSON.  Exit
codes: 0 success, 1 configuration error, 2 sparsity-guard violation,
3 under-resolved tail points (results still written, flagged).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import (ConfigError, GeomtailError, InsufficientData,
                     NonConvergence, SparsityViolation)
from .functionals import compute_T, score_persistent_triple
from .harness import (ExperimentPlan, build_score, estimate_tail, fit_ldp_slope,
                      run_lln)
from .persistence2d import (alpha_filtration, component_size_vertex_count,
                            delaunay, persistence_pairs_dim1,
                            persistent_betti_1)
from .pointproc import (PointCloud, RegimeParams, make_regime, sample_binomial,
                        sample_poisson)
from .rates import (RateFunctionHandle, estimate_score_law, mu_vector, rate_I,
                    rate_I_poisson_closed_form)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SPARSITY = 2
EXIT_UNDER_RESOLVED = 3


@dataclass(frozen=True)
class Config:
    """Validated simulate-experiment configuration."""

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
    seed: int = 0
    kind: str = "poisson"
    eps_sparse: float = 0.05
    batch_size: int = 128
    workers: int = 1
    law_samples: int = 200_000
    out: str = "geomtail-out"

    _KEYS = ("d", "k", "grid", "score", "statistic", "stat_params", "component",
             "x", "direction", "replicates", "seed", "kind", "eps_sparse",
             "batch_size", "workers", "law_samples", "out")

    @classmethod
    def from_dict(cls, raw: dict) -> "Config":
        unknown = set(raw) - set(cls._KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"d", "k", "grid", "score"} - set(raw)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        kwargs = dict(raw)
        kwargs["grid"] = tuple(tuple(point) for point in raw["grid"])
        if "replicates" in kwargs and np.iterable(kwargs["replicates"]):
            kwargs["replicates"] = tuple(kwargs["replicates"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["grid"] = [list(point) for point in self.grid]
        if np.iterable(self.replicates):
            out["replicates"] = list(self.replicates)
        return out

    def plan(self) -> ExperimentPlan:
        return ExperimentPlan(d=self.d, k=self.k, grid=self.grid,
                              score=self.score, statistic=self.statistic,
                              stat_params=self.stat_params,
                              component=self.component, x=self.x,
                              direction=self.direction,
                              replicates=self.replicates, seed_root=self.seed,
                              kind=self.kind, eps_sparse=self.eps_sparse,
                              batch_size=self.batch_size,
                              workers=self.workers)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _apply_overrides(raw: dict, args) -> dict:
    raw = dict(raw)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.workers is not None:
        raw["workers"] = args.workers
    if args.out is not None:
        raw["out"] = args.out
    return raw


def _write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def cmd_simulate(args) -> int:
    """Run the configured LLN/tail experiment and write ledger + summary."""
    cfg = Config.from_dict(_apply_overrides(_load_json(args.config), args))
    plan = cfg.plan()
    plan.regimes()  # raises SparsityViolation before any work
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = ["n", "rho", "r", "statistic", "mean", "stderr",
              "p_hat", "ci_lo", "ci_hi"]
    summary: dict = {"config": cfg.to_dict()}
    under = False
    if cfg.x is not None:
        tails = estimate_tail(plan)
        rows = [[_fmt(e.n), _fmt(e.rho), _fmt(e.r), plan.statistic,
                 _fmt(e.mean[cfg.component]), _fmt(e.stderr[cfg.component]),
                 _fmt(e.p_hat), _fmt(e.ci[0]), _fmt(e.ci[1])] for e in tails]
        under = any(e.under_resolved for e in tails)
        summary["tail"] = {
            "x": cfg.x, "direction": cfg.direction,
            "points": [{"n": e.n, "rho": e.rho, "p_hat": e.p_hat,
                        "hits": e.hits, "under_resolved": e.under_resolved}
                       for e in tails]}
        try:
            fit = fit_ldp_slope(tails)
            summary["slope_fit"] = {"slope": fit.slope,
                                    "intercept": fit.intercept,
                                    "slope_se": fit.slope_se,
                                    "slope_ci": list(fit.slope_ci),
                                    "n_points": fit.n_points}
        except InsufficientData as exc:
            summary["slope_fit"] = {"error": str(exc)}
        score = build_score(cfg.score)
        if score.m == 1:
            law = estimate_score_law(
                score, cfg.k, cfg.d, cfg.law_samples,
                np.random.SeedSequence(cfg.seed, spawn_key=(2 ** 20,)))
            mu = float(mu_vector(law)[0])
            summary["mu_hat"] = mu
            try:
                summary["target_minus_rate"] = -rate_I(
                    RateFunctionHandle(law), [cfg.x])
            except NonConvergence:
                summary["target_minus_rate"] = None
    else:
        points = run_lln(plan)
        rows = [[_fmt(e.n), _fmt(e.rho), _fmt(e.r), plan.statistic,
                 _fmt(e.mean[cfg.component]), _fmt(e.stderr[cfg.component]),
                 "", "", ""] for e in points]
        summary["lln"] = {"points": [
            {"n": e.n, "rho": e.rho, "mean": list(map(float, e.mean)),
             "stderr": list(map(float, e.stderr))} for e in points]}
    _write_csv(out_dir / "ledger.csv", header, rows)
    _write_json(out_dir / "summary.json", summary)
    return EXIT_UNDER_RESOLVED if under else EXIT_OK


_RATE_KEYS = {"d", "k", "score", "x_grid", "law_samples", "seed", "out",
              "workers"}


def cmd_rate(args) -> int:
    """Estimate the score law and tabulate the rate function on a grid."""
    raw = _apply_overrides(_load_json(args.config), args)
    unknown = set(raw) - _RATE_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"d", "k", "score", "x_grid"} - set(raw)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    seed = int(raw.get("seed", 0))
    out_dir = Path(raw.get("out", "geomtail-out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    score = build_score(raw["score"])
    law = estimate_score_law(score, int(raw["k"]), int(raw["d"]),
                             int(raw.get("law_samples", 200_000)),
                             np.random.SeedSequence(seed))
    (out_dir / "score_law.json").write_text(law.to_json(), encoding="utf-8")
    handle = RateFunctionHandle(law)
    mu = mu_vector(law)
    # For one component the canonical I column is the closed form (defined on
    # the whole half-line); the Newton column cross-checks and may be "inf"
    # at boundary points where the supremum is only attained in the limit.
    header = [f"x{i}" for i in range(score.m)] + ["I", "newton_I"]
    rows = []
    for entry in raw["x_grid"]:
        x = np.atleast_1d(np.asarray(entry, dtype=float))
        if x.shape != (score.m,):
            raise ConfigError(f"x grid entry {entry} has wrong dimension")
        try:
            newton = _fmt(rate_I(handle, x))
        except NonConvergence:
            newton = "inf"
        if score.m == 1:
            closed = rate_I_poisson_closed_form(float(mu[0]), float(x[0]))
            rows.append([_fmt(x[0]), _fmt(closed), newton])
        else:
            rows.append([_fmt(v) for v in x] + [newton, newton])
    _write_csv(out_dir / "rate_curve.csv", header, rows)
    _write_json(out_dir / "rate_summary.json",
                {"mu": [float(v) for v in mu], "total_mass": law.total,
                 "n_samples": law.n_samples, "seed": seed})
    return EXIT_OK


_PERSISTENCE_KEYS = {"regime", "input_points", "input_r", "s_t_pairs", "seed",
                     "out", "workers", "kind"}


def _load_points_csv(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or not header[0].startswith("x"):
            raise ConfigError(f"{path}: expected header x0,...,x{{d-1}}")
        rows = [[float(v) for v in row] for row in reader if row]
    return np.array(rows) if rows else np.zeros((0, len(header)))


def cmd_persistence(args) -> int:
    """One-cloud persistence diagnostics: diagram, Betti queries, sandwich check."""
    raw = _apply_overrides(_load_json(args.config), args)
    unknown = set(raw) - _PERSISTENCE_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if ("regime" in raw) == ("input_points" in raw):
        raise ConfigError("need exactly one of 'regime' or 'input_points'")
    seed = int(raw.get("seed", 0))
    out_dir = Path(raw.get("out", "geomtail-out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    if "regime" in raw:
        reg = raw["regime"]
        regime = make_regime(int(reg["d"]), int(reg.get("k", 3)),
                             float(reg["n"]), float(reg["rho"]),
                             float(reg.get("eps_sparse", 0.05)))
        sampler = sample_binomial if raw.get("kind") == "binomial" else sample_poisson
        cloud = sampler(regime, seed)
    else:
        pts = _load_points_csv(raw["input_points"])
        r = float(raw.get("input_r", 1.0))
        regime = RegimeParams(d=2, k=3, n=float(max(len(pts), 1)), rho=1.0,
                              r=r, sparsity=0.0, eps_sparse=np.inf)
        cloud = PointCloud(points=pts, regime=regime, seed=seed, kind="binomial")
    r = cloud.regime.r
    filt = alpha_filtration(delaunay(cloud.points))
    diagram = persistence_pairs_dim1(filt)
    scaled = [(b / r, d / r if np.isfinite(d) else np.inf)
              for b, d in diagram.pairs]
    with open(out_dir / "diagram.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("dim,birth,death\r\n")
        for b, d in scaled:
            death = "inf" if np.isinf(d) else repr(float(d))
            fh.write(f"1,{float(b)!r},{death}\r\n")
    queries = []
    for s, t in raw.get("s_t_pairs", []):
        beta = persistent_betti_1(filt, r * s, r * t)
        triple_sum = int(compute_T(cloud, score_persistent_triple(s, t)).values[0])
        slack = 3 * component_size_vertex_count(cloud.points, r * t)
        queries.append({"s": s, "t": t, "beta1": beta,
                        "isolated_triples": triple_sum,
                        "sandwich_bound": slack,
                        "sandwich": "pass" if 0 <= beta - triple_sum <= slack
                        else "fail"})
    _write_json(out_dir / "persistence_summary.json",
                {"n_points": len(cloud), "r": r, "queries": queries,
                 "n_pairs": len(scaled)})
    if any(q["sandwich"] == "fail" for q in queries):
        return EXIT_CONFIG
    return EXIT_OK


def cmd_validate(args) -> int:
    """Run the oracle-equivalence suite and print a pass/fail table."""
    from .validate import run_validation

    seed = args.seed if args.seed is not None else 0
    results = run_validation(seed=seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomtail",
        description="Sparse-regime geometric statistics experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_config in (
            ("simulate", cmd_simulate, True),
            ("rate", cmd_rate, True),
            ("persistence", cmd_persistence, True),
            ("validate", cmd_validate, False)):
        p = sub.add_parser(name, help=fn.__doc__)
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config root seed")
        p.add_argument("--workers", type=int, default=None,
                       help="worker count override")
        p.add_argument("--out", default=None, help="output directory override")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SparsityViolation as exc:
        print(f"sparsity violation: {exc}", file=sys.stderr)
        return EXIT_SPARSITY
    except GeomtailError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
