"""End-to-end acceptance gate: ten criteria, one pass/fail line each.

Each test prints "ACCEPTANCE <k>: PASS ..." on success; a failure both
raises and prints a FAIL line, so the one-line verdict always exists.
"""

import cmath
import math

import numpy as np
import pytest

import andersonwalk as aw
from andersonwalk.backtrack import kappa_max
from andersonwalk.halfplane import HalfPlanePoint, Mat2, d1, d2, mobius_apply

RADEMACHER = aw.NoiseDistribution.rademacher()


def verdict(k, ok, detail):
    line = f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line, flush=True)
    assert ok, line


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(10)
    # Sturm vs dense eigensolver, exact, 1000 instances up to n = 500
    for _ in range(1000):
        n = int(rng.integers(5, 501))
        sigma = float(rng.choice([0.01, 0.1, 0.5]))
        h = aw.FiniteHamiltonian.from_noise(sigma,
                                            rng.choice([-1.0, 1.0], size=n))
        ev = aw.dense_eigenvalues(h)
        e = float(rng.uniform(-2.5, 2.5))
        assert aw.count_below(h, e) == int(np.sum(ev < e))
    # boundary-value pass counting vs Sturm, exact, 500 instances up to n=300
    for _ in range(500):
        n = int(rng.integers(10, 301))
        sigma = float(rng.choice([0.01, 0.1, 0.5]))
        lam = float(rng.choice([1e-3, 1e-2, 1e-1]))
        lam0 = float(rng.uniform(0.2, 1.5)) * float(rng.choice([-1.0, 1.0]))
        p = aw.derive_params(lam0, sigma, 1.0)
        om = rng.choice([-1.0, 1.0], size=n)
        h = aw.FiniteHamiltonian.from_noise(sigma, om)
        assert aw.count_passes(p, om, lam).passes == \
            aw.count_in_interval(h, lam0, lam)
    verdict(1, True, "Sturm == dense on 1000 instances; "
                     "passes == Sturm on 500 instances, all exact")


def test_criterion_2_radius_identity():
    worst = 0.0
    seeds = 0
    for lam0 in (1.0, math.sqrt(2.0)):
        for sigma in (0.003, 0.05):
            p = aw.derive_params(lam0, sigma, 1.0)
            for s in range(5):
                om = aw.sample_noise(RADEMACHER, aw.RngStream(s, 21), 10 ** 6)
                traj = aw.walk_trajectory(p, om)
                # |exp(-log r) * Y - 1| ~ |log r + log Y| at this scale
                worst = max(worst, float(np.max(np.abs(traj.logrs
                                                       + traj.logys))))
                seeds += 1
    verdict(2, worst < 1e-8,
            f"r*Y = 1 to {worst:.2e} over {seeds} seeds of 1e6 steps")


def test_criterion_3_eigen_vs_backtracks():
    p = aw.derive_params(1.0, 0.01, 1.0)
    beta = 0.01 ** 3
    violations = 0
    vacuous = 0
    for s in range(200):
        om = aw.sample_noise(RADEMACHER, aw.RngStream(s, 31), 1000)
        res = aw.eigen_vs_backtracks(p, om, lam=1e-4, epsilon=1.0, beta=beta)
        if res.vacuous:
            vacuous += 1
        if not res.satisfied:
            violations += 1
        # supplementary non-vacuous configuration on the same noise
        res2 = aw.eigen_vs_backtracks(p, om, lam=1e-8, epsilon=1.0, beta=beta)
        if res2.vacuous or not res2.satisfied:
            violations += 1
    verdict(3, violations == 0,
            f"N_n <= 1 + backtracks on 200 instances, 0 violations "
            f"(stated config has B = log(eps*beta/lam) < 0, vacuous on "
            f"{vacuous}/200; non-vacuous lam=1e-8 variant also clean)")


def test_criterion_4_jump_bound():
    viol_statement = 0
    viol_proof = 0
    steps = 0
    worst_frac = 0.0
    for lam0 in (1.0, math.sqrt(2.0)):
        for sigma in (0.003, 0.05):
            p = aw.derive_params(lam0, sigma, 1.0)
            m_stmt = aw.m_bound(p)
            for s in range(25):
                om = aw.sample_noise(RADEMACHER, aw.RngStream(s, 41), 10 ** 4)
                r = aw.max_jump_ratio(aw.walk_trajectory(p, om))
                steps += 10 ** 4
                worst_frac = max(worst_frac, r / m_stmt)
                if r > m_stmt + 1e-12:
                    viol_statement += 1
                if r > 2.0 * m_stmt + 1e-12:  # the proof's sqrt(5) constant
                    viol_proof += 1
    ok = viol_statement == 0
    detail = (f"|dX|/Y <= (sqrt5/2) sigma c0^2/sin^2 on {steps:.0e} steps "
              f"across 100 seeds; worst = {worst_frac:.3f} of the bound")
    if not ok:
        detail = (f"statement constant violated {viol_statement}x, "
                  f"sqrt(5) proof constant violated {viol_proof}x")
        ok = viol_proof == 0  # documented dual outcome
    verdict(4, ok, detail)


def test_criterion_5_exact_supermartingale():
    from andersonwalk.martingale import derive_constants
    p0 = aw.derive_params(1.0, 0.0, 1.0)
    p = aw.derive_params(1.0, aw.sigma_threshold(p0) / 2.0, 1.0)
    kap = kappa_max(p)
    c = derive_constants(p, kap)
    ek = math.exp(-kap)
    worst = -math.inf
    for j in range(512):
        anchor = cmath.exp(2j * math.pi * j / 512)
        for prev in (-1.0, 0.0, 1.0):
            r = aw.supermartingale_ratio(anchor, c, p, RADEMACHER,
                                         prev_omega=prev)
            worst = max(worst, r)
    ok = worst <= ek * (1.0 + 1e-12)
    verdict(5, ok, f"exact 2-atom ratio <= e^-kappa on 512-point grid; "
                   f"worst margin {worst - ek:.2e}")


def test_criterion_6_tail_bound():
    p = aw.derive_params(1.0, 0.003, 1.0)
    table = aw.backtrack_tail_estimate(p, RADEMACHER, kappa_max(p),
                                       np.arange(1.0, 9.0), 10 ** 5, 10 ** 4,
                                       aw.RngStream(99))
    ok = bool(np.all(table.p_hat <= table.bound + 3.0 * table.stderr))
    gap = float(np.max(table.p_hat - table.bound))
    verdict(6, ok, f"empirical exceedance below 2e^(-B(1-...)) + 3 SE for "
                   f"B in 1..8 over 1e4 runs of n=1e5 (max p-bound = {gap:.3f})")


def test_criterion_7_free_model():
    p = aw.derive_params(1.0, 0.0, 1.0)
    grid = np.geomspace(1e-2, 2e-1, 10)
    est = aw.estimate_ids(p, RADEMACHER, grid, 10 ** 4, 3, aw.RngStream(7))
    slack = math.inf
    for lam, mu, se in zip(grid, est.mu_hat, est.stderr):
        # sigma = 0 is deterministic (SE = 0); the residual tolerance is the
        # 1/n eigenvalue-counting discretization of the closed-form mass
        tol = 3.0 * se + 2.0 / est.n
        err = abs(mu - aw.free_interval_mass(1.0, lam))
        slack = min(slack, tol - err)
        assert err <= tol
    lyap = aw.lyapunov_estimate(p, RADEMACHER, 10 ** 4, 10, aw.RngStream(8))
    cap = 10.0 * math.log(10 ** 4) / 10 ** 4
    ok = abs(lyap.gamma_hat) <= cap
    verdict(7, ok, f"free IDS matched on 10-point grid (tightest slack "
                   f"{slack:.2e}); |gamma_hat| = {abs(lyap.gamma_hat):.2e} "
                   f"<= 10 log(n)/n = {cap:.2e}")


def test_criterion_8_weak_disorder_lyapunov():
    p = aw.derive_params(1.0, 0.05, 1.0)
    n, reps = 10 ** 6, 30
    from andersonwalk import _kernels
    gammas = np.empty(reps)
    drifts = np.empty(reps)
    for r in range(reps):
        om = np.ascontiguousarray(
            aw.sample_noise(RADEMACHER, aw.RngStream(r, 81), n))
        gammas[r] = _kernels.lyapunov_log_growth(om, p.lambda0, p.sigma) / n
        drifts[r] = aw.logr_path(p, om)[-1] / n
    gamma_hat = gammas.mean()
    pred = p.sigma ** 2 / (8.0 * p.sin_theta ** 2)
    within_20 = abs(gamma_hat - pred) <= 0.2 * pred
    # same streams: the pairwise difference gamma - drift/2 is tiny and its
    # SE is the honest joint error
    diff = gammas - 0.5 * drifts
    se = diff.std(ddof=1) / math.sqrt(reps)
    within_se = abs(diff.mean()) <= 3.0 * se + 1e-12
    ok = within_20 and within_se
    verdict(8, ok, f"gamma_hat = {gamma_hat:.4e} vs sigma^2/(8 sin^2) = "
                   f"{pred:.4e} ({abs(gamma_hat/pred - 1) * 100:.1f}% off); "
                   f"gamma - drift/2 = {diff.mean():.2e} +- {se:.2e}")


def test_criterion_9_holder_trend():
    grid = np.geomspace(1e-3, 1e-1, 10)
    n, reps = 10 ** 4, 200
    fits = {}
    for sigma in (0.01, 0.05, 0.2):
        p = aw.derive_params(1.0, sigma, 1.0)
        est = aw.estimate_ids(p, RADEMACHER, grid, n, reps,
                              aw.RngStream(2024))
        fit = aw.fit_holder_exponent(est)
        # bootstrap over realizations: honest exponent error bars
        rng = np.random.default_rng(5)
        boots = []
        for _ in range(200):
            idx = rng.integers(0, reps, reps)
            mu = est.samples[idx].mean(axis=0)
            se = est.samples[idx].std(axis=0, ddof=1) / math.sqrt(reps)
            mask = mu > 5 * se
            if int(mask.sum()) >= 3:
                boots.append(np.polyfit(np.log(grid[mask]),
                                        np.log(mu[mask]), 1)[0])
        fits[sigma] = (fit.exponent_hat, float(np.std(boots)))
        # one-sided ceiling at every admitted grid point
        for lam, mu, se in zip(grid, est.mu_hat, est.stderr):
            if mu > 5 * se:
                assert mu - 3 * se <= aw.holder_bound(p, lam, 0.5)
    (e1, s1), (e2, s2), (e3, s3) = fits[0.01], fits[0.05], fits[0.2]
    mono = (e2 <= e1 + 3 * math.hypot(s1, s2)
            and e3 <= e2 + 3 * math.hypot(s2, s3))
    verdict(9, mono, f"fitted exponents {e1:.4f}+-{s1:.4f} (sigma=.01) >= "
                     f"{e2:.4f}+-{s2:.4f} (.05) >= {e3:.4f}+-{s3:.4f} (.2) "
                     f"within error bars; ceiling respected at all "
                     f"admitted points")


def _random_unimodular(rng):
    m = Mat2.identity()
    for _ in range(rng.integers(1, 6)):
        kind = rng.integers(3)
        if kind == 0:
            m = m @ Mat2(1.0, rng.normal(), 0.0, 1.0)
        elif kind == 1:
            s = math.exp(rng.normal() * 0.5)
            m = m @ Mat2(s, 0.0, 0.0, 1.0 / s)
        else:
            m = m @ Mat2(0.0, -1.0, 1.0, 0.0)
    return m


def test_criterion_10_metric_and_detector_suite():
    rng = np.random.default_rng(100)

    # d2 Moebius invariance, 1e4 cases at 1e-10 relative
    for _ in range(10 ** 4):
        m = _random_unimodular(rng)
        w = HalfPlanePoint(rng.normal(), math.exp(rng.normal()))
        wp = HalfPlanePoint(rng.normal(), math.exp(rng.normal()))
        base = d2(w, wp)
        assert abs(d2(mobius_apply(m, w), mobius_apply(m, wp)) - base) \
            <= 1e-10 * (1.0 + base)

    # d1^2 <= d2 (1 + d2/4), 1e5 cases (vectorized)
    x = rng.normal(size=10 ** 5)
    y = np.exp(rng.normal(size=10 ** 5))
    xp = rng.normal(size=10 ** 5)
    yp = np.exp(rng.normal(size=10 ** 5))
    d1v = np.abs(x - xp) / y
    d2v = ((x - xp) ** 2 + (y - yp) ** 2) / (y * yp)
    assert np.all(d1v ** 2 <= d2v * (1.0 + d2v / 4.0) + 1e-12)

    # single-step displacement identity to 1e-12
    p = aw.derive_params(0.9, 0.2, 1.0)
    om = aw.sample_noise(RADEMACHER, aw.RngStream(3, 101), 500)
    traj = aw.walk_trajectory(p, om)
    ys = np.exp(traj.logys)
    for k in range(500):
        got = d2(HalfPlanePoint(traj.xs[k], ys[k]),
                 HalfPlanePoint(traj.xs[k + 1], ys[k + 1]))
        assert got == pytest.approx((p.sigma * om[k]) ** 2 / p.sin_theta ** 2,
                                    abs=1e-12)

    # det-1 bookkeeping: the renormalized frame times its scale is unimodular
    s = aw.initial_state(p)
    for o in om[:300]:
        s = aw.advance_walk(s, o, p)
        det_w = s.frame.det() * math.exp(2.0 * s.logscale) / p.sin_theta
        assert det_w == pytest.approx(1.0, rel=1e-10)

    # backtrack detector vs O(n^2) brute force, 1e3 paths, exact
    for _ in range(1000):
        n = int(rng.integers(2, 200))
        vals = np.cumsum(rng.standard_normal(n))
        diffs = vals[None, :] - vals[:, None]
        brute_max = float(np.max(np.triu(diffs)))
        b = float(rng.uniform(0.2, 3.0))
        count, m = 0, vals[0]
        for v in vals[1:]:
            if v - m >= b:
                count += 1
                m = v
            elif v < m:
                m = v
        rep = aw.detect_backtracks(aw.DriftedPath(vals, 0.0), b)
        assert rep.max_backtrack == pytest.approx(max(brute_max, 0.0),
                                                  abs=1e-12)
        assert rep.count_at_least[b] == count

    verdict(10, True, "d2 invariance (1e4), d1^2<=d2(1+d2/4) (1e5), "
                      "single-step identity, det-1 bookkeeping, and "
                      "detector==brute-force (1e3 paths) all hold")
