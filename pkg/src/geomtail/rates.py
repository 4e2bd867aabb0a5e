"""Limit measures, log-moment-generating functions, and rate functions.

For an indicator-valued score the limit law of score values is purely atomic:
each atom is a nonzero 0/1 vector v with mass nu_v equal to the (Lebesgue)
measure of tuple configurations scoring v, divided by k!.  The log-MGF is
then a finite exponential sum and the Legendre transform reduces to a smooth
concave maximization solved by damped Newton iteration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import LogMgfOverflow, NonConvergence
from .functionals import ScoreFunction
from .pointproc import rng_from_seed

_EXP_LIMIT = 700.0  # exp() overflows just above this

GRAD_TOL = 1e-10
MAX_NEWTON_ITER = 200
# |a*| beyond this is treated as divergence toward the effective-domain
# boundary (the supremum is attained only in a limit a_i -> -inf there).
DUAL_BOX = 20.0


@dataclass(frozen=True)
class ScoreLaw:
    """Atomic law of an indicator score: masses on nonzero 0/1 vectors.

    ``atoms`` maps each support vector (tuple of 0/1 ints) to its mass;
    ``stderr`` carries per-atom Monte Carlo standard errors (zero for laws
    constructed analytically).
    """

    m: int
    atoms: dict
    stderr: dict
    n_samples: int
    L: float
    k: int
    d: int

    @property
    def total(self) -> float:
        return float(sum(self.atoms.values()))

    def to_json(self) -> str:
        payload = {
            "atoms": [
                {"v": list(v), "mass": mass, "stderr": self.stderr.get(v, 0.0)}
                for v, mass in sorted(self.atoms.items())
            ],
            "total": self.total,
            "n_samples": self.n_samples,
            "L": self.L,
            "k": self.k,
            "d": self.d,
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ScoreLaw":
        payload = json.loads(text)
        atoms = {tuple(int(x) for x in rec["v"]): float(rec["mass"])
                 for rec in payload["atoms"]}
        stderr = {tuple(int(x) for x in rec["v"]): float(rec.get("stderr", 0.0))
                  for rec in payload["atoms"]}
        m = len(next(iter(atoms))) if atoms else 0
        return cls(m=m, atoms=atoms, stderr=stderr,
                   n_samples=int(payload["n_samples"]), L=float(payload["L"]),
                   k=int(payload["k"]), d=int(payload["d"]))

    @classmethod
    def from_atoms(cls, atoms: dict, L: float = 0.0, k: int = 2,
                   d: int = 2) -> "ScoreLaw":
        atoms = {tuple(int(x) for x in v): float(mass) for v, mass in atoms.items()}
        m = len(next(iter(atoms))) if atoms else 0
        for v in atoms:
            if len(v) != m or not any(v) or not all(x in (0, 1) for x in v):
                raise ValueError(f"support vectors must be nonzero 0/1 vectors, got {v}")
        return cls(m=m, atoms=atoms, stderr={v: 0.0 for v in atoms},
                   n_samples=0, L=L, k=k, d=d)


def estimate_score_law(score: ScoreFunction, k: int, d: int, n_samples: int,
                       seed, batch_size: int = 200_000) -> ScoreLaw:
    """Monte Carlo estimate of the score-value law.

    Samples the k-1 non-anchored points uniformly on [-L, L]^(d(k-1)) -- the
    support bound guarantees no mass outside that box -- and converts hit
    fractions to masses via the box volume over k!.  The score must be
    indicator-valued.
    """
    if n_samples < 1:
        raise ValueError("need n_samples >= 1")
    if score.k != k:
        raise ValueError("score.k disagrees with k")
    L = score.support_L
    vol_factor = (2.0 * L) ** (d * (k - 1)) / math.factorial(k)
    rng = rng_from_seed(seed)
    counts: dict[tuple, int] = {}
    done = 0
    while done < n_samples:
        b = min(batch_size, n_samples - done)
        y = rng.uniform(-L, L, size=(b, k - 1, d))
        tuples = np.concatenate([np.zeros((b, 1, d)), y], axis=1)
        vals = score.evaluate_batch(tuples)
        if not np.isin(vals, (0.0, 1.0)).all():
            raise ValueError("score law estimation needs an indicator-valued score")
        nonzero = vals.any(axis=1)
        for row in vals[nonzero].astype(int):
            key = tuple(int(v) for v in row)
            counts[key] = counts.get(key, 0) + 1
        done += b
    atoms, stderr = {}, {}
    for v, cnt in sorted(counts.items()):
        p = cnt / n_samples
        atoms[v] = p * vol_factor
        stderr[v] = vol_factor * float(np.sqrt(p * (1.0 - p) / n_samples))
    return ScoreLaw(m=score.m, atoms=atoms, stderr=stderr, n_samples=n_samples,
                    L=L, k=k, d=d)


def mu_vector(law: ScoreLaw) -> np.ndarray:
    """Component means: mu_i = sum_v v_i * nu_v."""
    mu = np.zeros(law.m)
    for v, mass in law.atoms.items():
        mu += np.asarray(v, dtype=float) * mass
    return mu


def _support_arrays(law: ScoreLaw):
    vs = np.array(sorted(law.atoms), dtype=float).reshape(len(law.atoms), law.m)
    masses = np.array([law.atoms[tuple(int(x) for x in v)] for v in vs])
    return vs, masses


def log_mgf(law: ScoreLaw, a) -> float:
    """Lambda(a) = sum_v nu_v (e^<a,v> - 1); exact given the law."""
    a = np.asarray(a, dtype=float)
    if a.shape != (law.m,):
        raise ValueError(f"argument must have shape ({law.m},)")
    total = 0.0
    for v, mass in law.atoms.items():
        expo = float(np.dot(a, v))
        if expo > _EXP_LIMIT:
            raise LogMgfOverflow(f"exponent {expo:.3g} overflows", v)
        total += mass * (np.exp(expo) - 1.0)
    return total


@dataclass(frozen=True)
class RateFunctionHandle:
    """A score law packaged for repeated rate-function evaluations."""

    law: ScoreLaw

    @property
    def m(self) -> int:
        return self.law.m


def rate_I(handle: RateFunctionHandle, x, return_argmax: bool = False):
    """Legendre transform I(x) = sup_a { <a,x> - Lambda(a) }.

    Damped Newton ascent from a = 0: the dual is smooth and strictly concave
    (under nondegenerate support vectors), so halving the step until the
    objective increases converges globally.  Raises :class:`NonConvergence`
    for x outside the interior of the effective domain (e.g. a zero
    coordinate where the corresponding mean is positive) and for singular
    dual Hessians caused by linearly dependent score components.
    """
    law = handle.law
    x = np.asarray(x, dtype=float)
    if x.shape != (law.m,):
        raise ValueError(f"x must have shape ({law.m},)")
    if (x < 0).any():
        raise ValueError("x must lie in the closed positive orthant")
    vs, masses = _support_arrays(law)

    def dual_parts(a):
        expo = vs @ a
        if (expo > _EXP_LIMIT).any():
            raise NonConvergence("dual iterate overflowed; x outside domain")
        w = masses * np.exp(expo)
        value = float(a @ x - (w - masses).sum())
        grad = x - vs.T @ w
        return value, grad, w

    a = np.zeros(law.m)
    value, grad, w = dual_parts(a)
    for _ in range(MAX_NEWTON_ITER):
        if np.abs(grad).max() < GRAD_TOL:
            # Only ascent steps from g(0) = 0 are accepted, so value >= 0.
            return (value, a) if return_argmax else value
        if np.abs(a).max() > DUAL_BOX:
            raise NonConvergence(
                f"dual maximizer diverges at x={x} (|a| > {DUAL_BOX}); "
                "x lies on or outside the effective domain interior")
        hess = (vs.T * w) @ vs
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError as exc:
            raise NonConvergence(
                "singular dual Hessian (degenerate score components)") from exc
        grad_norm = np.abs(grad).max()
        scale = 1.0
        while scale >= 2.0 ** -60:
            cand = a + scale * step
            try:
                cand_value, cand_grad, cand_w = dual_parts(cand)
            except NonConvergence:
                scale *= 0.5
                continue
            # Near the optimum the dual value saturates in floating point
            # before the gradient tolerance is met; a full, tiny Newton step
            # that halves the gradient still makes progress, so accept it.
            tiny = np.abs(step).max() <= 1e-6
            if cand_value > value or \
                    (tiny and np.abs(cand_grad).max() < 0.5 * grad_norm):
                a, value, grad, w = cand, cand_value, cand_grad, cand_w
                break
            scale *= 0.5
        else:
            raise NonConvergence(
                f"no ascent step at a={a}; x={x} may touch the domain boundary")
    raise NonConvergence(f"Newton did not reach tolerance in "
                         f"{MAX_NEWTON_ITER} iterations at x={x}")


def rate_I_poisson_closed_form(mu: float, x: float) -> float:
    """One-component indicator rate function: x log(x/mu) - x + mu.

    Matches the large-deviation rate of i.i.d. Poisson(mu) sample means;
    x = 0 evaluates to mu by the 0*log 0 = 0 convention.
    """
    if mu <= 0:
        raise ValueError("need mu > 0")
    if x < 0:
        raise ValueError("need x >= 0")
    if x == 0.0:
        return float(mu)
    return float(x * np.log(x / mu) - x + mu)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite nonnegative measure given by atom locations and masses."""

    locations: tuple
    masses: np.ndarray

    @classmethod
    def from_pairs(cls, pairs) -> "DiscreteMeasure":
        pairs = list(pairs)
        locs = tuple(tuple(np.atleast_1d(loc)) if np.iterable(loc) else (loc,)
                     for loc, _ in pairs)
        masses = np.array([float(m) for _, m in pairs])
        if (masses < 0).any():
            raise ValueError("masses must be nonnegative")
        return cls(locations=locs, masses=masses)

    @property
    def total(self) -> float:
        return float(self.masses.sum())


def relative_entropy(rho: DiscreteMeasure, tau: DiscreteMeasure) -> float:
    """Entropy of rho relative to tau, extended to finite measures.

    sum_j rho_j log(rho_j / tau_j) - rho(E) + tau(E) with 0 log 0 = 0;
    +inf when rho charges an atom tau does not.
    """
    tau_mass = {loc: m for loc, m in zip(tau.locations, tau.masses)}
    rho_mass: dict = {}
    for loc, m in zip(rho.locations, rho.masses):
        rho_mass[loc] = rho_mass.get(loc, 0.0) + m
    total = 0.0
    for loc, m in rho_mass.items():
        if m == 0.0:
            continue
        t = tau_mass.get(loc, 0.0)
        if t == 0.0:
            return float(np.inf)
        total += m * np.log(m / t)
    return float(total - rho.total + tau.total)


def dual_objective(tau: DiscreteMeasure, f: np.ndarray,
                   rho_masses: np.ndarray) -> float:
    """<rho, f> - H(rho | tau) for rho given by masses on tau's atoms."""
    rho = DiscreteMeasure(locations=tau.locations, masses=np.asarray(rho_masses, float))
    return float(rho.masses @ f) - relative_entropy(rho, tau)


def duality_gap(tau: DiscreteMeasure, f, candidate_rho_grid=()) -> float:
    """Gap between int (e^f - 1) dtau and the entropy-penalized supremum.

    The analytic maximizer rho = e^f tau is always included among the
    candidates, so the returned gap is nonnegative for every grid candidate
    and zero up to floating error overall.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != tau.masses.shape:
        raise ValueError("f must assign one value per atom of tau")
    lhs = float(tau.masses @ (np.exp(f) - 1.0))
    candidates = [np.asarray(c, dtype=float) for c in candidate_rho_grid]
    candidates.append(tau.masses * np.exp(f))
    best = max(dual_objective(tau, f, c) for c in candidates)
    return lhs - best


def hessian_fd(handle: RateFunctionHandle, x, h: float | None = None) -> np.ndarray:
    """Central finite-difference Hessian of the rate function at interior x.

    Differentiates the dual maximizer field a*(x), which equals the gradient
    of the rate function; symmetry of the result (within discretization
    error) is therefore a genuine consistency check, and the matrix is
    positive definite at interior points.
    """
    x = np.asarray(x, dtype=float)
    m = handle.m
    if h is None:
        h = 1e-5 * float(np.linalg.norm(x))
    if h <= 0:
        raise ValueError("need a positive step")
    out = np.zeros((m, m))
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        _, a_plus = rate_I(handle, x + e, return_argmax=True)
        _, a_minus = rate_I(handle, x - e, return_argmax=True)
        out[i, :] = (a_plus - a_minus) / (2.0 * h)
    return out
