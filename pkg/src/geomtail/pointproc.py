"""Point process sampling on the unit cube and sparse-regime bookkeeping.

The scaling regime ties the connection radius ``r`` to the intensity ``n``
through ``rho = n^k * r^(d(k-1))``; the guard ``n * r^d <= eps_sparse`` keeps
every configuration inside the sparse phase where tuple clusters are rare and
mostly isolated.  Sampling is pure given ``(regime, seed)``: clouds are
immutable and safely shareable across workers.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import SparsityViolation

DEFAULT_EPS_SPARSE = 0.05


@dataclass(frozen=True)
class RegimeParams:
    """Sparse-regime parameters: dimension, tuple size, intensity, speed."""

    d: int
    k: int
    n: float
    rho: float
    r: float
    sparsity: float
    eps_sparse: float


def make_regime(d: int, k: int, n: float, rho: float,
                eps_sparse: float = DEFAULT_EPS_SPARSE) -> RegimeParams:
    """Solve the connection radius from ``rho = n^k * r^(d(k-1))``.

    Raises :class:`SparsityViolation` when the implied ``n * r^d`` exceeds
    ``eps_sparse``, signalling that the configuration is outside the sparse
    regime this package models.
    """
    if d < 2 or k < 2:
        raise ValueError("need d >= 2 and k >= 2")
    if n <= 0 or rho <= 0:
        raise ValueError("need n > 0 and rho > 0")
    r = float((rho / float(n) ** k) ** (1.0 / (d * (k - 1))))
    sparsity = float(n) * r ** d
    if sparsity > eps_sparse:
        raise SparsityViolation(
            f"n*r^d = {sparsity:.4g} exceeds the sparse-regime guard "
            f"{eps_sparse:.4g} (d={d}, k={k}, n={n}, rho={rho})"
        )
    return RegimeParams(d=d, k=k, n=float(n), rho=float(rho), r=r,
                        sparsity=sparsity, eps_sparse=eps_sparse)


@dataclass(frozen=True)
class PointCloud:
    """A finite sample in [0,1]^d with its generating regime attached."""

    points: np.ndarray
    regime: RegimeParams
    seed: object
    kind: str = "poisson"
    index: object = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, self.regime.d)
        if pts.ndim != 2 or pts.shape[1] != self.regime.d:
            raise ValueError("points must have shape (N, d)")
        if pts.size and (pts.min() < 0.0 or pts.max() > 1.0):
            raise ValueError("points must lie in the unit cube")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_csv(self) -> str:
        """One point per row; header ``x0,...,x{d-1}``."""
        buf = io.StringIO()
        buf.write(",".join(f"x{i}" for i in range(self.regime.d)) + "\r\n")
        for row in self.points:
            buf.write(",".join(repr(float(v)) for v in row) + "\r\n")
        return buf.getvalue()


def rng_from_seed(seed) -> np.random.Generator:
    """Build a PCG64 generator from an int seed or a SeedSequence.

    Replicate streams in the harness are derived from a single root through
    ``SeedSequence(root, spawn_key=...)``, so parallel workers never share
    mutable generator state.
    """
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sample_poisson(regime: RegimeParams, seed) -> PointCloud:
    """Homogeneous Poisson sample: count ~ Poisson(n), positions i.i.d. uniform."""
    rng = rng_from_seed(seed)
    count = int(rng.poisson(regime.n))
    pts = rng.random((count, regime.d))
    return PointCloud(points=pts, regime=regime, seed=seed, kind="poisson")


def sample_binomial(regime: RegimeParams, seed) -> PointCloud:
    """Exactly ``n`` i.i.d. uniform points; ``n`` must be a positive integer."""
    n = regime.n
    if n != round(n) or n < 1:
        raise ValueError("binomial sampling needs a positive integer n")
    rng = rng_from_seed(seed)
    pts = rng.random((int(n), regime.d))
    return PointCloud(points=pts, regime=regime, seed=seed, kind="binomial")
