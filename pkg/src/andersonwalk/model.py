"""Model parameters, noise distributions and reproducible random streams.

Everything downstream is driven by three scalars: the coupling constant
``sigma``, the reference energy ``lambda0`` in (-2, 0) u (0, 2), and the
absolute noise bound ``c0 >= 1``.  From ``lambda0`` we derive

    theta = arccos(lambda0 / 2)          (so lambda0 = 2 cos theta)
    rho   = 1 / sqrt(4 - lambda0^2) = 1 / (2 sin theta)
    z     = exp(i theta)

Random numbers come from counter-based Philox streams keyed by
(seed, stream_id), so parallel realizations are reproducible and
independent of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEnergy, InvalidBound

__all__ = [
    "ModelParams",
    "NoiseDistribution",
    "RngStream",
    "derive_params",
    "sigma_threshold",
    "sample_noise",
]

_ATOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of one model instance (immutable)."""

    sigma: float
    lambda0: float
    c0: float
    theta: float
    rho: float
    z: complex

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    @property
    def sin_2theta(self) -> float:
        return math.sin(2.0 * self.theta)


def derive_params(lambda0: float, sigma: float, c0: float) -> ModelParams:
    """Build :class:`ModelParams` from (lambda0, sigma, c0).

    Rejects lambda0 in {-2, 0, 2}: every result in scope needs
    sin(theta) != 0 and sin(2 theta) != 0.  Rejects c0 < 1: a mean-0,
    variance-1 variable bounded by c0 forces c0 >= 1.
    """
    if not abs(lambda0) < 2.0 or lambda0 == 0.0:
        raise DegenerateEnergy(
            f"lambda0={lambda0!r} must lie in (-2,0) u (0,2); "
            "the walk degenerates at 0 and +/-2"
        )
    if sigma < 0.0:
        raise ValueError(f"sigma={sigma!r} must be >= 0")
    if c0 < 1.0:
        raise InvalidBound(
            f"c0={c0!r} < 1 is impossible for a mean-0 variance-1 bounded law"
        )
    theta = math.acos(lambda0 / 2.0)
    rho = 1.0 / math.sqrt(4.0 - lambda0 * lambda0)
    z = complex(math.cos(theta), math.sin(theta))
    return ModelParams(sigma=float(sigma), lambda0=float(lambda0), c0=float(c0),
                       theta=theta, rho=rho, z=z)


def sigma_threshold(params: ModelParams) -> float:
    """Largest coupling for which the backtrack tail bound applies.

    Returns 2 sin(theta) |sin(2 theta)| / (460 c0^3).
    """
    return (2.0 * params.sin_theta * abs(params.sin_2theta)
            / (460.0 * params.c0 ** 3))


@dataclass(frozen=True)
class NoiseDistribution:
    """Mean-0, variance-1 single-site noise law with bounded support.

    ``kind`` is one of "rademacher", "uniform", "atoms".  For discrete
    kinds the atoms are (value, probability) pairs; sampling is by
    inverse CDF so that two atom lists describing the same law produce
    identical draws from the same stream.
    """

    kind: str
    c0: float
    atoms: tuple[tuple[float, float], ...] = field(default=())

    @staticmethod
    def rademacher() -> "NoiseDistribution":
        return NoiseDistribution(kind="rademacher", c0=1.0,
                                 atoms=((-1.0, 0.5), (1.0, 0.5)))

    @staticmethod
    def uniform_symmetric() -> "NoiseDistribution":
        # uniform on [-sqrt(3), sqrt(3)] has mean 0 and variance 1
        return NoiseDistribution(kind="uniform", c0=math.sqrt(3.0))

    @staticmethod
    def discrete(atoms) -> "NoiseDistribution":
        atoms = tuple((float(v), float(p)) for v, p in atoms)
        ps = np.array([p for _, p in atoms])
        vs = np.array([v for v, _ in atoms])
        if np.any(ps < 0):
            raise ValueError("atom probabilities must be >= 0")
        if abs(ps.sum() - 1.0) > _ATOL:
            raise ValueError(f"atom probabilities sum to {ps.sum()!r}, not 1")
        if abs(float(ps @ vs)) > _ATOL:
            raise ValueError(f"atom mean {float(ps @ vs)!r} is not 0")
        if abs(float(ps @ vs ** 2) - 1.0) > _ATOL:
            raise ValueError(f"atom second moment {float(ps @ vs**2)!r} is not 1")
        return NoiseDistribution(kind="atoms", c0=float(np.max(np.abs(vs))),
                                 atoms=atoms)

    @staticmethod
    def from_config(cfg: dict) -> "NoiseDistribution":
        """Parse the config-file form: {"kind": "rademacher"|"uniform"} or
        {"kind": "atoms", "atoms": [[v, p], ...]}."""
        kind = cfg["kind"]
        if kind == "rademacher":
            return NoiseDistribution.rademacher()
        if kind == "uniform":
            return NoiseDistribution.uniform_symmetric()
        if kind == "atoms":
            return NoiseDistribution.discrete(cfg["atoms"])
        raise ValueError(f"unknown noise kind {kind!r}")

    def to_config(self) -> dict:
        if self.kind == "atoms":
            return {"kind": "atoms", "atoms": [[v, p] for v, p in self.atoms]}
        return {"kind": self.kind}


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by (seed, stream_id).

    The same key always yields the same byte stream, independent of
    platform, thread count or the order streams are consumed in.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed % 2 ** 64, self.stream_id % 2 ** 64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(seed=self.seed, stream_id=stream_id)


def sample_noise(dist: NoiseDistribution, rng: RngStream, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. values of the law, deterministically per stream."""
    if n < 1:
        raise ValueError(f"n={n!r} must be >= 1")
    gen = rng.generator()
    u = gen.random(n)
    if dist.kind == "uniform":
        return (2.0 * u - 1.0) * math.sqrt(3.0)
    # discrete kinds (rademacher is the two-atom special case): inverse CDF
    vs = np.array([v for v, _ in dist.atoms])
    cum = np.cumsum([p for _, p in dist.atoms])
    cum[-1] = 1.0  # guard rounding in the last bin
    idx = np.searchsorted(cum, u, side="right")
    idx = np.minimum(idx, len(vs) - 1)
    return vs[idx]
