"""Explicit supermartingale built on the radius/phase increments, with
the full constant ledger, exact one-step conditional expectations for
atomic noise, and tail-bound verification.

The process is

    Pi_k = e^{sigma^2 (1-delta)(F_{k-1} - (1-delta/2) G_{k-1})}
           * prod_{i<=k} (e^{-kappa} (1 + X_i))^{delta-1}

where X_i is the relative radius increment and F, G the compensated
phase sums.  For noise with finitely many atoms the supermartingale
property E[Pi_k / Pi_{k-1} | past] <= e^{-kappa} is checkable exactly
(2-term quadrature for Rademacher), which turns a probabilistic lemma
into a deterministic numerical assertion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import HypothesisViolated
from .model import ModelParams, NoiseDistribution, RngStream, sample_noise
from .prufer import (PruferState, correction_increments, correction_sums,
                     initial_prufer, phase_step, prufer_step, radius_increment)

__all__ = [
    "MartingaleConstants",
    "PiProcess",
    "derive_constants",
    "initial_pi",
    "pi_step",
    "supermartingale_ratio",
    "conditional_mean_increment",
    "conditional_second_moment_bound",
    "verify_tail_bound",
    "TailCheck",
]


@dataclass(frozen=True)
class MartingaleConstants:
    """The c1..c7, c_tilde, c_bar ledger plus (kappa, delta) and the
    delta-window endpoints; everything a report needs to be self-contained."""

    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    c_tilde: float
    c_bar: float
    kappa: float
    delta: float
    delta_lo: float
    delta_hi: float
    aggregate_below_224: bool


def derive_constants(params: ModelParams, kappa: float) -> MartingaleConstants:
    """Evaluate the constant ledger at (params, kappa).

    Requires the running smallness assumption
    sigma <= 2 sin(theta)|sin(2 theta)| / (10 c0^3) and kappa in [0, 1];
    the specific failing inequality is named in the error.
    """
    st = params.sin_theta
    s2t = abs(params.sin_2theta)
    rho = params.rho
    c0 = params.c0
    sigma = params.sigma
    smax = 2.0 * st * s2t / (10.0 * c0 ** 3)
    if sigma > smax:
        raise HypothesisViolated(
            f"sigma={sigma!r} > 2 sin(t)|sin(2t)|/(10 c0^3) = {smax!r}")
    if not 0.0 <= kappa <= 1.0:
        raise HypothesisViolated(f"kappa={kappa!r} not in [0, 1]")

    c1 = (12.0 / 5.0) * c0 * rho
    c2 = 4.0 * rho ** 3
    c3 = 10.0 * c0 * rho ** 4
    c4 = 2.0 * rho ** 2 / s2t
    c5 = 8.0 * c0 * rho ** 3 / s2t
    c6 = 10.0 * c0 ** 3 / (2.0 * st * s2t)
    c7 = 3.0 * c1 ** 3 + (c2 + c4) ** 2 / c6 + 4.0 * c1 * (c2 + c4)
    c_tilde = 2.0 * rho ** 2
    c_bar = 12.0 * rho ** 3 / s2t

    if sigma > 0.0:
        delta = kappa / (sigma ** 2 * rho ** 2) + 224.0 * c0 ** 3 * rho * sigma / s2t
        lo = (2.0 * sigma / c_tilde) * (2.0 * kappa / sigma ** 3 + c3 + c5 + 2.0 * c7)
    else:
        delta = 0.0
        lo = 0.0
    return MartingaleConstants(
        c1=c1, c2=c2, c3=c3, c4=c4, c5=c5, c6=c6, c7=c7,
        c_tilde=c_tilde, c_bar=c_bar, kappa=kappa, delta=delta,
        delta_lo=lo, delta_hi=0.5,
        aggregate_below_224=c7 < 224.0 * c0 ** 3 * rho ** 3 / s2t)


@dataclass(frozen=True)
class PiProcess:
    """Running log of Pi_k together with the carried radius/phase state.

    ``first_phase`` is e^{2 i alpha_1} (set after the first step); the
    boundary sums F_{k-1}, G_{k-1} are recomputed from their closed
    forms each step rather than accumulated, so log_pi satisfies the
    defining identity exactly at every k.
    """

    k: int
    log_pi: float
    prufer: PruferState
    sum_xterm: float  # sum_{i<=k} (-kappa + log(1 + X_i))
    first_phase: Optional[complex] = None


def initial_pi(params: ModelParams) -> PiProcess:
    return PiProcess(k=0, log_pi=0.0, prufer=initial_prufer(params),
                     sum_xterm=0.0)


def pi_step(state: PiProcess, omega: float, consts: MartingaleConstants,
            params: ModelParams) -> PiProcess:
    """Advance Pi one noise step (F_0 = G_0 = 0 convention at k = 1)."""
    pre_phase = state.prufer.phase
    x = radius_increment(pre_phase, omega, params)
    nxt = prufer_step(state.prufer, omega, params)
    sum_xterm = state.sum_xterm + (-consts.kappa + math.log1p(x))
    first = state.first_phase if state.k >= 1 else nxt.phase
    k_new = state.k + 1
    if k_new >= 2:
        cs = correction_sums(np.array([first, pre_phase]), params)
        fg = cs.F - (1.0 - consts.delta / 2.0) * cs.G
    else:
        fg = 0.0
    log_pi = (params.sigma ** 2 * (1.0 - consts.delta) * fg
              + (consts.delta - 1.0) * sum_xterm)
    return PiProcess(k=k_new, log_pi=log_pi, prufer=nxt,
                     sum_xterm=sum_xterm, first_phase=first)


def _check_smgale_hypotheses(consts: MartingaleConstants, params: ModelParams):
    if consts.delta_lo > consts.delta_hi + 1e-15:
        raise HypothesisViolated(
            f"delta window empty: lower end {consts.delta_lo!r} > 1/2")
    if not consts.delta_lo <= consts.delta <= consts.delta_hi + 1e-15:
        raise HypothesisViolated(
            f"delta={consts.delta!r} outside "
            f"[{consts.delta_lo!r}, {consts.delta_hi!r}]")
    cap = 1.0 / max(consts.c1, consts.c6, math.sqrt(consts.c2 + consts.c4))
    if params.sigma > cap:
        raise HypothesisViolated(
            f"sigma={params.sigma!r} > 1/max(c1, c6, sqrt(c2+c4)) = {cap!r}")


def supermartingale_ratio(anchor_phase: complex, consts: MartingaleConstants,
                          params: ModelParams, dist: NoiseDistribution,
                          prev_omega: float = 0.0) -> float:
    """Exact conditional expectation E[Pi_k / Pi_{k-1} | alpha_{k-1}].

    The conditioning phase alpha_{k-1} is generated consistently by
    stepping ``anchor_phase`` (= e^{2 i alpha_{k-2}}) with ``prev_omega``,
    because the ratio's deterministic prefactor involves the increments
    Delta F_{k-1}, Delta G_{k-1} of that move.  The expectation over the
    current step is a finite sum over the noise atoms; the contract is
    ratio <= e^{-kappa} whenever the hypotheses hold.
    """
    if not dist.atoms:
        raise ValueError("exact ratio needs an atomic noise distribution")
    _check_smgale_hypotheses(consts, params)
    phase = phase_step(anchor_phase, prev_omega, params)
    df, dg = correction_increments(anchor_phase, phase, params)
    pref = math.exp(params.sigma ** 2 * (1.0 - consts.delta)
                    * (df - (1.0 - consts.delta / 2.0) * dg))
    acc = 0.0
    for v, p in dist.atoms:
        x = radius_increment(phase, v, params)
        acc += p * (math.exp(-consts.kappa) * (1.0 + x)) ** (consts.delta - 1.0)
    return pref * acc


def conditional_mean_increment(phase: complex, params: ModelParams) -> float:
    """sigma^2 B with B = 2 rho^2 (1 - cos(2 alpha + 2 theta)): the exact
    conditional mean of X for any mean-0 variance-1 noise."""
    u = params.z ** 2 * phase
    return params.sigma ** 2 * 2.0 * params.rho ** 2 * (1.0 - u.real)


def conditional_second_moment_bound(phase: complex, params: ModelParams) -> float:
    """sigma^2 A with A = 16 c0^3 rho^3 sigma (1 + c0 rho)
    + 2 rho^2 (1 - cos(4 alpha + 4 theta)): upper bound for E[X^2 | alpha]."""
    u = (params.z ** 2 * phase) ** 2
    a = (16.0 * params.c0 ** 3 * params.rho ** 3 * params.sigma
         * (1.0 + params.c0 * params.rho)
         + 2.0 * params.rho ** 2 * (1.0 - u.real))
    return params.sigma ** 2 * a


@dataclass(frozen=True)
class TailCheck:
    b: float
    empirical: float
    stderr: float
    refined_bound: float
    packaged_bound: float


def verify_tail_bound(params: ModelParams, dist: NoiseDistribution, b: float,
                      n: int, reps: int, rng: RngStream,
                      kappa: Optional[float] = None) -> TailCheck:
    """Empirical exceedance P(max backtrack from time 1 >= b) of the
    drifted path log Y_k + kappa k, against both the refined bound
    e^{-(b - c_bar sigma^2)(1 - delta)} and the packaged bound
    2 e^{-b (1 - 230 c0^3 sigma / (2 sin t |sin 2t|))}."""
    from .backtrack import kappa_max, tail_bound  # local import, no cycle at load

    if kappa is None:
        kappa = kappa_max(params)
    consts = derive_constants(params, kappa)
    _check_smgale_hypotheses(consts, params)
    maxima = np.empty(reps)
    for r in range(reps):
        om = np.ascontiguousarray(
            sample_noise(dist, rng.substream(rng.stream_id + r), n))
        maxima[r] = _kernels.max_backtrack_from_one(
            om, params.lambda0, params.sigma, kappa)
    p = float((maxima >= b).mean())
    se = math.sqrt(p * (1.0 - p) / reps)
    refined = math.exp(-(b - consts.c_bar * params.sigma ** 2)
                       * (1.0 - consts.delta))
    return TailCheck(b=b, empirical=p, stderr=se, refined_bound=refined,
                     packaged_bound=tail_bound(params, b))
