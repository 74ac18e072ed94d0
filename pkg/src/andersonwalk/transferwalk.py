"""Transfer-matrix cocycle, the hyperbolic walk, projective eigenvalue
counting, the jump bound, and Lyapunov-exponent estimation.

The walk is the image X_k + i Y_k of z = e^{i theta} under W_k^{-1},
where W_k = T_k ... T_1.  Since ||W_k|| grows exponentially we never
store W_k itself: the state carries U_k = A W_k renormalized to unit
Frobenius norm with the accumulated log scale kept separately, where
A = [[1, -cos theta], [0, sin theta]] maps i to z.  Then

    X_k     = -(a b + c d) / (a^2 + c^2)
    log Y_k = log sin(theta) - 2 log(scale) - log(a^2 + c^2)

for U_k = [[a, b], [c, d]], exactly (the Moebius image of i under
U_k^{-1} equals W_k^{-1} o z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import RefinementLimit
from .halfplane import HalfPlanePoint, Mat2
from .model import ModelParams, NoiseDistribution, RngStream, sample_noise
from .spectrum import FiniteHamiltonian

__all__ = [
    "WalkState",
    "WalkTrajectory",
    "PassCount",
    "LyapunovEstimate",
    "transfer_matrix",
    "initial_state",
    "advance_walk",
    "walk_trajectory",
    "m_bound",
    "max_jump_ratio",
    "count_passes",
    "lyapunov_estimate",
]

_MAX_CELLS = 2 ** 20


def transfer_matrix(params: ModelParams, omega: float, lam: float = 0.0) -> Mat2:
    """One-site transfer matrix [[lambda0 + lam - sigma*omega, -1], [1, 0]]."""
    return Mat2(params.lambda0 + lam - params.sigma * omega, -1.0, 1.0, 0.0)


@dataclass(frozen=True)
class WalkState:
    """Walk position plus the renormalized co-moving frame U_k = A W_k."""

    k: int
    x: float
    logy: float
    frame: Mat2
    logscale: float

    def point(self) -> HalfPlanePoint:
        return HalfPlanePoint(self.x, math.exp(self.logy))


def _observe(frame: Mat2, logscale: float, params: ModelParams):
    col = frame.a * frame.a + frame.c * frame.c
    x = -(frame.a * frame.b + frame.c * frame.d) / col
    logy = math.log(params.sin_theta) - 2.0 * logscale - math.log(col)
    return x, logy


def initial_state(params: ModelParams) -> WalkState:
    ct = math.cos(params.theta)
    frame = Mat2(1.0, -ct, 0.0, params.sin_theta)  # A itself (W_0 = I)
    x, logy = _observe(frame, 0.0, params)
    return WalkState(k=0, x=x, logy=logy, frame=frame, logscale=0.0)


def advance_walk(state: WalkState, omega: float, params: ModelParams) -> WalkState:
    """One step W_{k+1} = T_{k+1} W_k, carried out on the frame U = A W."""
    ct = math.cos(params.theta)
    st = params.sin_theta
    v = params.lambda0 - params.sigma * omega
    # A T A^{-1} applied on the left of U
    t00, t01 = v, (v * ct - 1.0) / st
    t10, t11 = 1.0, ct / st
    g = Mat2(t00 - ct * t10, t01 - ct * t11, st * t10, st * t11)
    u = g @ state.frame
    m = math.sqrt(u.a * u.a + u.b * u.b + u.c * u.c + u.d * u.d)
    u = Mat2(u.a / m, u.b / m, u.c / m, u.d / m)
    logscale = state.logscale + math.log(m)
    x, logy = _observe(u, logscale, params)
    return WalkState(k=state.k + 1, x=x, logy=logy, frame=u, logscale=logscale)


@dataclass(frozen=True)
class WalkTrajectory:
    """Dense per-step record of the joint walk / radius-phase evolution.

    Arrays are indexed k = 0..n.  ``logr`` and ``phase`` come from the
    radius/phase recursion run on the same noise, so ``logr + logy``
    vanishing is a genuine cross-check, not a tautology.
    """

    xs: np.ndarray
    logys: np.ndarray
    logrs: np.ndarray
    phases: np.ndarray  # complex e^{2 i alpha_k}

    @property
    def n(self) -> int:
        return self.xs.shape[0] - 1


def walk_trajectory(params: ModelParams, omegas: np.ndarray) -> WalkTrajectory:
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    xs, logys, logrs, pre, pim = _kernels.walk_prufer_trajectory(
        omegas, params.lambda0, params.sigma)
    return WalkTrajectory(xs=xs, logys=logys, logrs=logrs, phases=pre + 1j * pim)


def m_bound(params: ModelParams) -> float:
    """Deterministic bound on the one-step horizontal jump |dX|/Y.

    (sqrt(5)/2) sigma c0^2 / sin^2(theta); requires sigma <= 1, c0 >= 1.
    """
    st = params.sin_theta
    return (math.sqrt(5.0) / 2.0) * params.sigma * params.c0 ** 2 / (st * st)


def max_jump_ratio(traj: WalkTrajectory) -> float:
    """max over k of |X_{k+1} - X_k| / Y_k (divides by the EARLIER Y)."""
    if traj.xs.shape[0] < 2:
        raise ValueError("trajectory needs at least two points")
    dx = np.abs(np.diff(traj.xs))
    return float(np.max(dx * np.exp(-traj.logys[:-1])))


@dataclass(frozen=True)
class PassCount:
    """Eigenvalue count via sign changes of the boundary value, with the
    grid the adaptive subdivision settled on (diagnostic)."""

    passes: int
    cells: int
    edges: Optional[np.ndarray] = None


def count_passes(params: ModelParams, omegas: np.ndarray, lam: float,
                 initial_cells: int = 8, keep_edges: bool = False) -> PassCount:
    """Count eigenvalues in [lambda0, lambda0 + lam] by sweeping the
    boundary value phi_{n+1}(E).

    The sweep grid over E is refined (cells halved) wherever the Sturm
    counts at the two cell edges differ by 2 or more, so each final cell
    holds at most one eigenvalue and the boundary value has at most one
    sign change per cell; total sign changes (zeros counted once) is the
    eigenvalue count.  Endpoint convention matches count_in_interval:
    the right edge sits one ulp above lambda0 + lam.
    """
    if not lam > 0.0:
        raise ValueError(f"lam={lam!r} must be > 0")
    diag = np.ascontiguousarray(params.sigma * np.asarray(omegas, dtype=np.float64))
    lo = params.lambda0
    hi = math.nextafter(params.lambda0 + lam, math.inf)

    edges = list(np.linspace(lo, hi, initial_cells + 1))
    counts = [int(_kernels.sturm_count_below(diag, e)) for e in edges]

    while True:
        new_edges = [edges[0]]
        new_counts = [counts[0]]
        refined = False
        for i in range(len(edges) - 1):
            if counts[i + 1] - counts[i] >= 2 and edges[i + 1] - edges[i] > 0:
                mid = 0.5 * (edges[i] + edges[i + 1])
                if edges[i] < mid < edges[i + 1]:
                    new_edges.append(mid)
                    new_counts.append(int(_kernels.sturm_count_below(diag, mid)))
                    refined = True
            new_edges.append(edges[i + 1])
            new_counts.append(counts[i + 1])
        edges, counts = new_edges, new_counts
        if len(edges) - 1 > _MAX_CELLS:
            raise RefinementLimit(
                f"subdivision exceeded {_MAX_CELLS} cells; "
                "fall back to Sturm counting")
        if not refined:
            break

    signs = [_kernels.boundary_sign(diag, e) for e in edges]
    passes = 0
    for i in range(len(signs) - 1):
        if signs[i] * signs[i + 1] < 0.0:
            passes += 1
    # an exact zero at an edge is the eigenvalue itself; count it once
    passes += sum(1 for s in signs if s == 0.0)
    return PassCount(passes=passes, cells=len(edges) - 1,
                     edges=np.array(edges) if keep_edges else None)


@dataclass(frozen=True)
class LyapunovEstimate:
    gamma_hat: float
    stderr: float
    samples: np.ndarray  # per-realization (1/n) log ||W_n e_1||


def lyapunov_estimate(params: ModelParams, dist: NoiseDistribution,
                      n: int, reps: int, rng: RngStream) -> LyapunovEstimate:
    """Average of (1/n) log ||W_n e_1|| over independent realizations,
    with the direction vector renormalized every step."""
    if n < 1 or reps < 1:
        raise ValueError("n and reps must be >= 1")
    samples = np.empty(reps)
    for r in range(reps):
        om = sample_noise(dist, rng.substream(rng.stream_id + r), n)
        samples[r] = _kernels.lyapunov_log_growth(
            np.ascontiguousarray(om), params.lambda0, params.sigma) / n
    gamma = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return LyapunovEstimate(gamma_hat=gamma, stderr=se, samples=samples)


def hamiltonian_from(params: ModelParams, omegas) -> FiniteHamiltonian:
    """Convenience: the box operator for this parameter set and noise."""
    return FiniteHamiltonian.from_noise(params.sigma, omegas)
