"""Per-block counts against their Poisson limit, inside and outside the
sparse regime.

Partitions the unit square into rho blocks, counts isolated concentrated
pairs block by block, pools across replicates, and tests the counts against
the Poisson law with the analytic intensity.  The same pipeline run far
outside the sparse regime shows the approximation degrade.
"""

import numpy as np

from geomtail.harness import (blocked_lambda_target, poisson_approx_test,
                              pooled_blocked_counts)


def main():
    tau_mass = np.pi / 2  # pair score at t = L = 1: half the unit-disk area

    print("== deep in the sparse regime: n*r^2 = 1e-3 ==")
    counts = pooled_blocked_counts(n=25_000.0, rho=25.0, d=2, k=2, t=1.0,
                                   L=1.0, replicates=300, seed_root=1)
    lam = blocked_lambda_target(25.0, 5, tau_mass)
    report = poisson_approx_test(counts, lam)
    print(f"pooled blocks      {report.n_counts}")
    print(f"target mean        {lam:.4f}")
    print(f"empirical mean     {counts.mean():.4f}")
    print(f"chi-square p-value {report.p_value:.4f}")
    print(f"TV distance est.   {report.tv_estimate:.4f}")

    print("\n== far outside: n*r^2 = 0.3 (guard disabled) ==")
    counts_bad = pooled_blocked_counts(n=270.0, rho=81.0, d=2, k=2, t=1.0,
                                       L=1.0, replicates=1000, seed_root=2,
                                       eps_sparse=1.0)
    lam_bad = blocked_lambda_target(81.0, 9, tau_mass)
    report_bad = poisson_approx_test(counts_bad, lam_bad)
    print(f"pooled blocks      {report_bad.n_counts}")
    print(f"target mean        {lam_bad:.4f}")
    print(f"empirical mean     {counts_bad.mean():.4f}")
    print(f"chi-square p-value {report_bad.p_value:.2e}")
    print(f"TV distance est.   {report_bad.tv_estimate:.4f}")
    print("\ncrowding and block-boundary effects suppress the counts, and "
          "the Poisson fit fails,\nexactly the mechanism the sparse-regime "
          "guard protects against")


if __name__ == "__main__":
    main()
