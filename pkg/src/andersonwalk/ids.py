"""Monte Carlo estimation of the integrated density of states (IDS) on
an energy window, power-law (Hoelder) exponent fitting, and the closed
forms it is compared against.

The estimator is E N_n / n with N_n the eigenvalue count of the box
operator in [lambda0, lambda0 + lam]; all widths in a grid share one
noise realization (common random numbers) so that grid-wise differences
are low-variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import InsufficientSignal, MarginViolated
from .model import ModelParams, NoiseDistribution, RngStream, sample_noise

__all__ = [
    "IdsEstimate",
    "HolderFit",
    "estimate_ids",
    "free_ids",
    "free_interval_mass",
    "holder_exponent",
    "holder_bound",
    "fit_holder_exponent",
    "simon_taylor_cap",
]


@dataclass(frozen=True)
class IdsEstimate:
    lambda0: float
    lambda_grid: np.ndarray
    mu_hat: np.ndarray
    stderr: np.ndarray
    n: int
    reps: int
    samples: np.ndarray  # (reps, len(grid)) per-realization N_n / n


def estimate_ids(params: ModelParams, dist: NoiseDistribution, lambda_grid,
                 n: int, reps: int, rng: RngStream) -> IdsEstimate:
    """Per-width estimates of E N_n / n, one shared omega stream per
    realization across the whole width grid."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if reps < 2:
        raise ValueError("reps must be >= 2 for a standard error")
    grid = np.asarray(lambda_grid, dtype=np.float64)
    if np.any(grid <= 0.0):
        raise ValueError("all interval widths must be > 0")
    samples = np.empty((reps, grid.shape[0]))
    for r in range(reps):
        om = sample_noise(dist, rng.substream(rng.stream_id + r), n)
        diag = np.ascontiguousarray(params.sigma * om)
        base = _kernels.sturm_count_below(diag, params.lambda0)
        for j, lam in enumerate(grid):
            hi = math.nextafter(params.lambda0 + lam, math.inf)
            samples[r, j] = (_kernels.sturm_count_below(diag, hi) - base) / n
    mu = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / math.sqrt(reps)
    return IdsEstimate(lambda0=params.lambda0, lambda_grid=grid, mu_hat=mu,
                       stderr=se, n=n, reps=reps, samples=samples)


def free_ids(e: float) -> float:
    """Zero-disorder IDS: N0(E) = 1 - arccos(E/2)/pi on [-2, 2]."""
    e = min(2.0, max(-2.0, e))
    return 1.0 - math.acos(e / 2.0) / math.pi


def free_interval_mass(lambda0: float, lam: float) -> float:
    """N0(lambda0 + lam) - N0(lambda0)."""
    return free_ids(lambda0 + lam) - free_ids(lambda0)


def holder_exponent(params: ModelParams, gamma_margin: float) -> float:
    """The proven exponent 1 - 460 c0^3 sigma / gamma."""
    if not gamma_margin > 0.0:
        raise ValueError("gamma_margin must be > 0")
    return 1.0 - 460.0 * params.c0 ** 3 * params.sigma / gamma_margin


def holder_bound(params: ModelParams, lam: float, gamma_margin: float) -> float:
    """(2 / sigma^3) * lam^(1 - 460 c0^3 sigma / gamma).

    Valid for lambda0 at distance >= gamma from {-2, 0, 2}, sigma <= 1,
    lam <= 1.  Far from tight at ordinary parameter scales; consumers
    treat it as a one-sided ceiling.
    """
    g = gamma_margin
    l0 = params.lambda0
    if not ((-2.0 + g < l0 < -g) or (g < l0 < 2.0 - g)):
        raise MarginViolated(
            f"lambda0={l0!r} not in (-2+{g}, -{g}) u ({g}, 2-{g})")
    if not params.sigma > 0.0:
        raise ValueError("holder_bound needs sigma > 0 (2/sigma^3 prefactor)")
    if params.sigma > 1.0 or lam > 1.0:
        raise ValueError("bound stated for sigma <= 1 and lam <= 1")
    # in log space: the exponent can be very negative at large sigma and the
    # plain power would overflow a double long before the bound is meaningful
    log_b = (math.log(2.0) - 3.0 * math.log(params.sigma)
             + holder_exponent(params, g) * math.log(lam))
    return math.exp(log_b) if log_b < 700.0 else math.inf


@dataclass(frozen=True)
class HolderFit:
    exponent_hat: float
    exponent_se: float
    intercept: float
    residual: float
    n_points: int
    paper_exponent: Optional[float] = None


def fit_holder_exponent(est: IdsEstimate, params: Optional[ModelParams] = None,
                        gamma_margin: Optional[float] = None,
                        signal_factor: float = 5.0) -> HolderFit:
    """Least-squares slope of log mu_hat against log lam over the
    signal-dominated points (mu_hat > signal_factor * stderr)."""
    mask = est.mu_hat > signal_factor * est.stderr
    if int(mask.sum()) < 3:
        raise InsufficientSignal(
            f"only {int(mask.sum())} signal-dominated grid points; need >= 3")
    x = np.log(est.lambda_grid[mask])
    y = np.log(est.mu_hat[mask])
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = float(res[0]) if len(res) else 0.0
    m = x.shape[0]
    if m > 2 and np.var(x) > 0:
        se = math.sqrt(resid / (m - 2) / (m * np.var(x)))
    else:
        se = 0.0
    paper = None
    if params is not None and gamma_margin is not None:
        paper = holder_exponent(params, gamma_margin)
    return HolderFit(exponent_hat=slope, exponent_se=se, intercept=intercept,
                     residual=resid, n_points=m, paper_exponent=paper)


def simon_taylor_cap(sigma: float) -> float:
    """2 log 2 / arccosh(1 + sigma): no Bernoulli-noise IDS can be
    Hoelder with a larger exponent."""
    if not sigma > 0.0:
        raise ValueError("sigma must be > 0")
    return 2.0 * math.log(2.0) / math.acosh(1.0 + sigma)
