import math

import numpy as np
import pytest

from andersonwalk.backtrack import (DriftedPath, backtrack_tail_estimate,
                                    detect_backtracks, eigen_vs_backtracks,
                                    kappa_max, tail_bound)
from andersonwalk.errors import HypothesisViolated, InvalidBeta
from andersonwalk.model import (NoiseDistribution, RngStream, derive_params,
                                sample_noise)

RADEMACHER = NoiseDistribution.rademacher()


def brute_max_backtrack(values):
    best = 0.0
    for j in range(len(values)):
        for k in range(j + 1, len(values)):
            best = max(best, values[k] - values[j])
    return best


def brute_greedy_count(values, b):
    """Independent restatement of the non-overlapping excursion count."""
    count = 0
    m = values[0]
    for v in values[1:]:
        if v - m >= b:
            count += 1
            m = v
        elif v < m:
            m = v
    return count


def test_hand_scan():
    path = DriftedPath(np.array([0.0, -1.0, -0.5, -2.0]), kappa=0.0)
    rep = detect_backtracks(path, 0.4)
    assert rep.max_backtrack == pytest.approx(0.5)
    assert rep.count_at_least[0.4] == 1
    assert rep.excursions == ((1, 2, 0.5),)


def test_monotone_decreasing_path():
    path = DriftedPath(np.linspace(0.0, -5.0, 50), kappa=0.0)
    rep = detect_backtracks(path, 0.1)
    assert rep.max_backtrack == 0.0
    assert rep.count_at_least[0.1] == 0


def test_two_excursions():
    path = DriftedPath(np.array([0.0, -3.0, -1.0, -4.0, -1.0]), kappa=0.0)
    rep = detect_backtracks(path, 2.0)
    sizes = sorted(s for _, _, s in rep.excursions)
    assert sizes == pytest.approx([2.0, 3.0])
    assert rep.max_backtrack == pytest.approx(3.0)


def test_against_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(2, 200))
        vals = np.cumsum(rng.standard_normal(n))
        path = DriftedPath(vals, kappa=0.0)
        b = float(rng.uniform(0.2, 3.0))
        rep = detect_backtracks(path, b)
        assert rep.max_backtrack == pytest.approx(brute_max_backtrack(vals),
                                                  abs=1e-12)
        assert rep.count_at_least[b] == brute_greedy_count(vals, b)


def test_count_monotone_in_threshold():
    rng = np.random.default_rng(1)
    vals = np.cumsum(rng.standard_normal(500))
    path = DriftedPath(vals, kappa=0.0)
    counts = [detect_backtracks(path, b).count_at_least[b]
              for b in (0.5, 1.0, 2.0, 4.0)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_eigen_vs_backtracks_contract():
    p = derive_params(1.0, 0.01, 1.0)
    for seed in range(20):
        om = sample_noise(RADEMACHER, RngStream(seed), 1000)
        res = eigen_vs_backtracks(p, om, lam=1e-8, epsilon=1.0, beta=1e-6)
        assert not res.vacuous  # B = log(1e-6/1e-8) = log(100) > 0
        assert res.satisfied
        assert res.n_eigs <= 1 + res.backtracks


def test_eigen_vs_backtracks_vacuous():
    p = derive_params(1.0, 0.01, 1.0)
    om = sample_noise(RADEMACHER, RngStream(0), 500)
    # lam >= eps*beta makes B = log(eps beta / lam) <= 0
    res = eigen_vs_backtracks(p, om, lam=1e-4, epsilon=1.0, beta=1e-6)
    assert res.vacuous and res.satisfied
    assert res.b <= 0.0


def test_invalid_beta():
    p = derive_params(1.0, 0.1, 1.0)
    from andersonwalk.transferwalk import m_bound
    too_big = 1.0 / (2.0 * m_bound(p)) * 1.01
    om = sample_noise(RADEMACHER, RngStream(0), 100)
    with pytest.raises(InvalidBeta):
        eigen_vs_backtracks(p, om, lam=1e-6, epsilon=1.0, beta=too_big)


def test_kappa_max_value():
    p = derive_params(1.0, 0.003, 1.0)
    expected = 6 * (1 / math.sqrt(3)) ** 3 * 0.003 ** 3 / (math.sqrt(3) / 2)
    assert kappa_max(p) == pytest.approx(expected, rel=1e-12)


def test_tail_bound_value():
    p = derive_params(1.0, 0.003, 1.0)
    assert tail_bound(p, 5.0) == pytest.approx(0.1344110254794995, rel=1e-12)
    assert tail_bound(p, 0.0) == 2.0


def test_tail_estimate_hypotheses():
    p_bad = derive_params(1.0, 0.01, 1.0)  # above threshold 3/920
    with pytest.raises(HypothesisViolated):
        backtrack_tail_estimate(p_bad, RADEMACHER, 1e-9, [1.0], 100, 5,
                                RngStream(0))
    p = derive_params(1.0, 0.003, 1.0)
    with pytest.raises(HypothesisViolated):
        backtrack_tail_estimate(p, RADEMACHER, 2 * kappa_max(p), [1.0],
                                100, 5, RngStream(0))


def test_tail_estimate_small_run():
    p = derive_params(1.0, 0.003, 1.0)
    table = backtrack_tail_estimate(p, RADEMACHER, kappa_max(p),
                                    [1.0, 2.0, 4.0], 20000, 200, RngStream(3))
    assert np.all(np.diff(table.p_hat) <= 0)  # exceedance decreasing in B
    assert np.all(table.p_hat <= table.bound + 3 * table.stderr)
