import numpy as np
import pytest
from scipy import stats as scipy_stats

from geomtail.errors import SparsityViolation
from geomtail.pointproc import (PointCloud, make_regime, sample_binomial,
                                sample_poisson)


def test_make_regime_algebra():
    reg = make_regime(2, 2, 1e4, 25.0)
    assert reg.r == pytest.approx(5e-4)
    assert reg.sparsity == pytest.approx(2.5e-3)


def test_make_regime_rejects_dense():
    # d=2, k=3, n=1e3, rho=10: r = 1e-2 and n*r^2 = 0.1 > 0.05
    with pytest.raises(SparsityViolation):
        make_regime(2, 3, 1e3, 10.0)
    reg = make_regime(2, 3, 1e3, 10.0, eps_sparse=1.0)
    assert reg.r == pytest.approx(1e-2)
    assert reg.sparsity == pytest.approx(0.1)


def test_make_regime_round_trip():
    for d, k, n, rho in ((2, 2, 5e3, 12.0), (3, 2, 2e4, 7.0), (2, 3, 4e4, 3.0)):
        reg = make_regime(d, k, n, rho, eps_sparse=1.0)
        assert n ** k * reg.r ** (d * (k - 1)) == pytest.approx(rho, rel=1e-12)
        again = make_regime(d, k, n, n ** k * reg.r ** (d * (k - 1)),
                            eps_sparse=1.0)
        assert again.r == pytest.approx(reg.r, rel=1e-12)


def test_make_regime_validation():
    for bad in ((1, 2, 100, 1.0), (2, 1, 100, 1.0), (2, 2, 0, 1.0),
                (2, 2, 100, 0.0)):
        with pytest.raises(ValueError):
            make_regime(*bad)


def test_poisson_determinism_and_support():
    reg = make_regime(2, 2, 500, 1.0, eps_sparse=1.0)
    a = sample_poisson(reg, 123)
    b = sample_poisson(reg, 123)
    c = sample_poisson(reg, 124)
    assert np.array_equal(a.points, b.points)
    assert len(c) != len(a) or not np.array_equal(a.points, c.points)
    assert a.points.min() >= 0 and a.points.max() <= 1


def test_poisson_count_mean():
    reg = make_regime(2, 2, 100, 0.5, eps_sparse=1.0)
    counts = np.array([len(sample_poisson(reg, s)) for s in range(3000)])
    # CLT band: mean in 100 +/- 3 * 10 / sqrt(3000)
    assert abs(counts.mean() - 100) < 3 * 10 / np.sqrt(3000)


def test_poisson_count_distribution():
    # chi-square goodness of fit of the count law against Poisson(n)
    reg = make_regime(2, 2, 20, 0.1, eps_sparse=1.0)
    n_seeds = 20_000
    counts = np.array([len(sample_poisson(reg, s)) for s in range(n_seeds)])
    kmax = int(scipy_stats.poisson.ppf(0.999, 20))
    observed = np.bincount(np.minimum(counts, kmax), minlength=kmax + 1)
    expected = n_seeds * np.append(scipy_stats.poisson.pmf(np.arange(kmax), 20),
                                   scipy_stats.poisson.sf(kmax - 1, 20))
    keep = expected >= 5
    chi2 = (((observed[keep] - expected[keep]) ** 2) / expected[keep]).sum()
    chi2 += ((observed[~keep].sum() - expected[~keep].sum()) ** 2
             / expected[~keep].sum())
    p = scipy_stats.chi2.sf(chi2, keep.sum())
    assert p > 1e-3


def test_binomial_exact_count():
    reg = make_regime(2, 2, 1000, 1.0, eps_sparse=1.0)
    for seed in range(5):
        assert len(sample_binomial(reg, seed)) == 1000


def test_binomial_single_point():
    reg = make_regime(2, 2, 1, 1e-4, eps_sparse=1.0)
    assert len(sample_binomial(reg, 0)) == 1


def test_binomial_rejects_fractional_n():
    reg = make_regime(2, 2, 1000.5, 1.0, eps_sparse=1.0)
    with pytest.raises(ValueError):
        sample_binomial(reg, 0)


def test_binomial_coordinate_mean():
    reg = make_regime(2, 2, 100_000, 1.0, eps_sparse=1.0)
    cloud = sample_binomial(reg, 7)
    assert np.allclose(cloud.points.mean(axis=0), 0.5, atol=0.01)


def test_cloud_csv_round_trip():
    reg = make_regime(2, 2, 10, 1e-2, eps_sparse=1.0)
    cloud = sample_poisson(reg, 5)
    text = cloud.to_csv()
    lines = text.strip().split("\r\n")
    assert lines[0] == "x0,x1"
    parsed = np.array([[float(v) for v in line.split(",")]
                       for line in lines[1:]])
    if len(cloud):
        assert np.array_equal(parsed, cloud.points)


def test_cloud_immutable():
    reg = make_regime(2, 2, 50, 0.1, eps_sparse=1.0)
    cloud = sample_poisson(reg, 1)
    with pytest.raises(ValueError):
        cloud.points[0, 0] = 2.0


def test_cloud_rejects_outside_cube():
    reg = make_regime(2, 2, 10, 1e-2, eps_sparse=1.0)
    with pytest.raises(ValueError):
        PointCloud(points=np.array([[0.5, 1.5]]), regime=reg, seed=0)
