"""Radius/phase (Figotin-Pastur) coordinates of the transfer cocycle.

The propagated boundary vector (phi_{k+1}, phi_k) is complexified as
c_k = phi_{k+1} - conj(z) phi_k; writing P[c_k] = sqrt(r_k) e^{i alpha_k}
gives overflow-free coordinates with r_k = 1 / Y_k (the imaginary part
of the walk).  One noise step multiplies c by

    z (1 + i sigma omega rho (1 - conj(z)^2 e^{-2 i alpha})),

which yields the closed-form radius increment

    r_{k+1}/r_k = 1 + X,
    X = 2 s^2 w^2 rho^2 - 2 s w rho sin(2a + 2t) - 2 s^2 w^2 rho^2 cos(2a + 2t)

(s = sigma, w = omega, a = alpha_k, t = theta) and the phase map

    e^{2ia'} = u - i s w rho (u - 1)^2 / (1 - i s w rho (1 - u)),  u = z^2 e^{2ia}.

Note the sign of the noise: the commonly quoted recursion with
+sin(2a+2t) describes the chain driven by -omega; the orientation above
is the one for which exp(-log r_k) reproduces Y_k on the SAME omega
stream, which is what every cross-module identity here relies on.
The phase is stored as the unit complex number e^{2 i alpha}, never as
the unwrapped angle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DenominatorNearZero
from .halfplane import Mat2
from .model import ModelParams

__all__ = [
    "PruferState",
    "CorrectionSums",
    "initial_prufer",
    "radius_increment",
    "phase_step",
    "prufer_step",
    "verify_cutetrick",
    "correction_sums",
    "correction_increments",
    "logr_path",
]

_DEN_FLOOR = 0.1


@dataclass(frozen=True)
class PruferState:
    """(k, log r_k, e^{2 i alpha_k}); the phase is kept unit-modulus."""

    k: int
    log_r: float
    phase: complex


def initial_prufer(params: ModelParams) -> PruferState:
    """State at k = 0: c_0 = 1, so alpha_0 = 0 and r_0 = 1/sin(theta)."""
    return PruferState(k=0, log_r=-math.log(params.sin_theta), phase=1.0 + 0.0j)


def radius_increment(phase: complex, omega: float, params: ModelParams) -> float:
    """X with r_{k+1} = r_k (1 + X), given the PRE-step phase e^{2 i alpha}."""
    u = params.z ** 2 * phase
    sr = params.sigma * omega * params.rho
    return 2.0 * sr * sr - 2.0 * sr * u.imag - 2.0 * sr * sr * u.real


def phase_step(phase: complex, omega: float, params: ModelParams) -> complex:
    """One step of the phase map, renormalized to unit modulus."""
    u = params.z ** 2 * phase
    sr = params.sigma * omega * params.rho
    den = 1.0 - 1j * sr * (1.0 - u)
    if abs(den) < _DEN_FLOOR:
        raise DenominatorNearZero(
            f"|denominator| = {abs(den):.3g} < {_DEN_FLOOR}; "
            "sigma*|omega|*rho is far outside the small-coupling regime")
    out = u - 1j * sr * (u - 1.0) ** 2 / den
    return out / abs(out)


def prufer_step(state: PruferState, omega: float, params: ModelParams) -> PruferState:
    x = radius_increment(state.phase, omega, params)
    phase = phase_step(state.phase, omega, params)
    return PruferState(k=state.k + 1, log_r=state.log_r + math.log1p(x),
                       phase=phase)


def verify_cutetrick(m: Mat2) -> tuple[float, float]:
    """Both sides of Im(M^{-1} o i) = 1 / ||M e_1||^2 for det-1 M."""
    inv = m.inv_unimodular()
    w = (inv.a * 1j + inv.b) / (inv.c * 1j + inv.d)
    lhs = w.imag
    rhs = 1.0 / (m.a * m.a + m.c * m.c)
    return lhs, rhs


@dataclass(frozen=True)
class CorrectionSums:
    """Boundary terms of the compensated phase sums.

    F aggregates the e^{2 i alpha} oscillation, G the e^{4 i alpha} one;
    |F| <= 4 rho^3 and |G| <= 2 rho^2 / |sin 2 theta| always.
    """

    F: float
    G: float


def correction_sums(phases: np.ndarray, params: ModelParams) -> CorrectionSums:
    """F_k, G_k from the phase history (array of e^{2 i alpha_j}, j = 1..k).

    Only the first and last entries enter the closed forms
        F_k = -2 rho^2 Re[z^2 (e^{2ia_1} - z^2 e^{2ia_k}) / (1 - z^2)]
        G_k = -2 rho^2 Re[z^4 (e^{4ia_1} - z^4 e^{4ia_k}) / (1 - z^4)];
    the history signature keeps call sites honest about which window the
    sums refer to.
    """
    phases = np.asarray(phases)
    if phases.shape[0] < 1:
        raise ValueError("need at least one phase")
    z2 = params.z ** 2
    z4 = z2 * z2
    e1, ek = phases[0], phases[-1]
    rho2 = 2.0 * params.rho ** 2
    f = -rho2 * (z2 * (e1 - z2 * ek) / (1.0 - z2)).real
    g = -rho2 * (z4 * (e1 ** 2 - z4 * ek ** 2) / (1.0 - z4)).real
    return CorrectionSums(F=f, G=g)


def correction_increments(phase_prev: complex, phase_next: complex,
                          params: ModelParams) -> tuple[float, float]:
    """(Delta F, Delta G) contributed by one phase move alpha_{k-1} -> alpha_k:
        Delta F = -2 rho^2 Re[z^4 (e^{2ia_{k-1}} - e^{2ia_k}) / (1 - z^2)]
        Delta G = -2 rho^2 Re[z^8 (e^{4ia_{k-1}} - e^{4ia_k}) / (1 - z^4)]
    """
    z2 = params.z ** 2
    z4 = z2 * z2
    rho2 = 2.0 * params.rho ** 2
    df = -rho2 * (z4 * (phase_prev - phase_next) / (1.0 - z2)).real
    dg = -rho2 * (z4 * z4 * (phase_prev ** 2 - phase_next ** 2) / (1.0 - z4)).real
    return df, dg


def logr_path(params: ModelParams, omegas: np.ndarray) -> np.ndarray:
    """log r_k for k = 0..n on one noise stream (compiled fast path)."""
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    return _kernels.prufer_logr_path(omegas, params.lambda0, params.sigma)
