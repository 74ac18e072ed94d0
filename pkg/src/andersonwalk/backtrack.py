"""Backtrack statistics of drifted log Y paths.

A backtrack of size B is a rise of B from a running minimum.  Excursions
are counted with the greedy non-overlapping convention (reset the
minimum once a rise of B is banked): of the ways to count overlapping
excursions this is the minimal one, which makes the eigenvalue
inequality N_n <= 1 + count the strongest testable reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import HypothesisViolated, InvalidBeta
from .model import ModelParams, NoiseDistribution, RngStream, sample_noise, \
    sigma_threshold
from .spectrum import FiniteHamiltonian, count_in_interval
from .transferwalk import m_bound, walk_trajectory

__all__ = [
    "DriftedPath",
    "BacktrackReport",
    "EigenBacktrackResult",
    "TailTable",
    "detect_backtracks",
    "eigen_vs_backtracks",
    "kappa_max",
    "backtrack_tail_estimate",
]


@dataclass(frozen=True)
class DriftedPath:
    """Values D_k = log Y_k + kappa * k, with the drift recorded."""

    values: np.ndarray
    kappa: float

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.ndim != 1 or v.shape[0] < 1:
            raise ValueError("path must be a nonempty 1-D array")
        object.__setattr__(self, "values", v)

    @staticmethod
    def from_logy(logy: np.ndarray, kappa: float) -> "DriftedPath":
        logy = np.asarray(logy, dtype=np.float64)
        return DriftedPath(values=logy + kappa * np.arange(logy.shape[0]),
                           kappa=kappa)


@dataclass(frozen=True)
class BacktrackReport:
    max_backtrack: float
    count_at_least: dict = field(default_factory=dict)  # threshold B -> count
    excursions: tuple = ()  # (start index, end index, size)


def detect_backtracks(path: DriftedPath, b: float) -> BacktrackReport:
    """Greedy non-overlapping excursion scan at threshold ``b``.

    max_backtrack is max_k (D_k - min_{j<=k} D_j), independent of b.
    """
    if not b > 0.0:
        raise ValueError(f"threshold b={b!r} must be > 0")
    maxbt, starts, ends, sizes = _kernels.greedy_backtracks(path.values, b)
    exc = tuple((int(s), int(e), float(z))
                for s, e, z in zip(starts, ends, sizes))
    return BacktrackReport(max_backtrack=float(maxbt),
                           count_at_least={b: len(exc)},
                           excursions=exc)


@dataclass(frozen=True)
class EigenBacktrackResult:
    n_eigs: int
    backtracks: int
    bound: int          # 1 + backtracks (meaningful only when not vacuous)
    m_used: float
    kappa: float
    b: float
    vacuous: bool
    satisfied: bool


def eigen_vs_backtracks(params: ModelParams, omegas: np.ndarray, lam: float,
                        epsilon: float, beta: float) -> EigenBacktrackResult:
    """Deterministic comparison: eigenvalues of the box operator in
    [lambda0, lambda0 + lam] versus 1 + backtracks of size
    B = log(epsilon * beta / lam) of the path log Y_k + kappa k,
    kappa = (epsilon + lam * beta)/sin(theta) + 2 M beta.

    B <= 0 makes the inequality vacuous; the result says so instead of
    scanning at a nonsensical threshold.
    """
    if not (epsilon > 0.0 and lam > 0.0):
        raise ValueError("epsilon and lam must be > 0")
    m = m_bound(params)
    if not beta > 0.0 or (m > 0.0 and beta > 1.0 / (2.0 * m)):
        raise InvalidBeta(
            f"beta={beta!r} outside (0, 1/(2M)] with M={m!r}")
    omegas = np.asarray(omegas, dtype=np.float64)
    h = FiniteHamiltonian.from_noise(params.sigma, omegas)
    n_eigs = count_in_interval(h, params.lambda0, lam)

    kappa = (epsilon + lam * beta) / params.sin_theta + 2.0 * m * beta
    b = math.log(epsilon * beta / lam)
    if b <= 0.0:
        return EigenBacktrackResult(n_eigs=n_eigs, backtracks=0, bound=0,
                                    m_used=m, kappa=kappa, b=b,
                                    vacuous=True, satisfied=True)
    traj = walk_trajectory(params, omegas)
    path = DriftedPath.from_logy(traj.logys, kappa)
    rep = detect_backtracks(path, b)
    count = rep.count_at_least[b]
    return EigenBacktrackResult(n_eigs=n_eigs, backtracks=count,
                                bound=1 + count, m_used=m, kappa=kappa, b=b,
                                vacuous=False, satisfied=n_eigs <= 1 + count)


def kappa_max(params: ModelParams) -> float:
    """Largest drift covered by the backtrack tail bound:
    6 c0^3 rho^3 sigma^3 / |sin 2 theta|."""
    return (6.0 * params.c0 ** 3 * params.rho ** 3 * params.sigma ** 3
            / abs(params.sin_2theta))


@dataclass(frozen=True)
class TailTable:
    b_grid: np.ndarray
    p_hat: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    reps: int
    n: int


def tail_bound(params: ModelParams, b: float) -> float:
    """Packaged tail bound 2 exp(-B (1 - 230 c0^3 sigma / (2 sin t |sin 2t|)))."""
    rate = 1.0 - 230.0 * params.c0 ** 3 * params.sigma / (
        2.0 * params.sin_theta * abs(params.sin_2theta))
    return 2.0 * math.exp(-b * rate)


def backtrack_tail_estimate(params: ModelParams, dist: NoiseDistribution,
                            kappa: float, b_grid, n: int, reps: int,
                            rng: RngStream) -> TailTable:
    """Empirical exceedance of the largest backtrack (measured from time 1)
    of log Y_k + kappa k, against the packaged exponential bound.

    Hypotheses sigma <= sigma_threshold and kappa <= kappa_max are
    enforced: outside them the comparison is meaningless.
    """
    thr = sigma_threshold(params)
    if params.sigma > thr:
        raise HypothesisViolated(
            f"sigma={params.sigma!r} > threshold {thr!r}")
    kmax = kappa_max(params)
    if kappa > kmax * (1.0 + 1e-12) or kappa < 0.0:
        raise HypothesisViolated(
            f"kappa={kappa!r} outside [0, {kmax!r}]")
    b_grid = np.asarray(b_grid, dtype=np.float64)
    maxima = np.empty(reps)
    for r in range(reps):
        om = np.ascontiguousarray(
            sample_noise(dist, rng.substream(rng.stream_id + r), n))
        maxima[r] = _kernels.max_backtrack_from_one(
            om, params.lambda0, params.sigma, kappa)
    p = np.array([(maxima >= b).mean() for b in b_grid])
    se = np.sqrt(p * (1.0 - p) / reps)
    bounds = np.array([tail_bound(params, b) for b in b_grid])
    return TailTable(b_grid=b_grid, p_hat=p, stderr=se, bound=bounds,
                     reps=reps, n=n)
