"""2x2 real matrices, their Moebius action on the upper half plane, and the
two distance functionals d1, d2 used by the jump bound.

d1(x+iy, x'+iy') = |x - x'| / y            (asymmetric by design)
d2(x+iy, x'+iy') = ((x-x')^2 + (y-y')^2) / (y y')   (Moebius invariant)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LossOfPositivity
from .model import ModelParams

__all__ = [
    "Mat2",
    "HalfPlanePoint",
    "ProjectivePoint",
    "mobius_apply",
    "d1",
    "d2",
    "rotation_matrix",
]


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix, row-major entries."""

    a: float
    b: float
    c: float
    d: float

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv_unimodular(self) -> "Mat2":
        """Inverse assuming det = 1."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def from_array(m) -> "Mat2":
        return Mat2(float(m[0][0]), float(m[0][1]), float(m[1][0]), float(m[1][1]))


@dataclass(frozen=True)
class HalfPlanePoint:
    """Point x + iy with y > 0 strictly."""

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0.0:
            raise LossOfPositivity(f"imaginary part {self.y!r} is not positive")

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class ProjectivePoint:
    """Real projective point as a homogeneous pair, canonicalized to unit
    norm with v2 >= 0 (and v1 > 0 when v2 = 0)."""

    v1: float
    v2: float

    @staticmethod
    def of(v1: float, v2: float) -> "ProjectivePoint":
        n = math.hypot(v1, v2)
        if n == 0.0:
            raise ValueError("projective point needs a nonzero pair")
        v1, v2 = v1 / n, v2 / n
        if v2 < 0.0 or (v2 == 0.0 and v1 < 0.0):
            v1, v2 = -v1, -v2
        return ProjectivePoint(v1, v2)

    def value(self) -> float:
        """v1/v2, or +inf for the point at infinity."""
        if self.v2 == 0.0:
            return math.inf
        return self.v1 / self.v2


def mobius_apply(m: Mat2, w: HalfPlanePoint) -> HalfPlanePoint:
    """Apply the fractional linear map (a w + b) / (c w + d).

    For det = 1 the image stays in the upper half plane; the imaginary
    part is computed as y / |c w + d|^2 so positivity fails only on true
    numerical breakdown, which is raised rather than clamped.
    """
    wz = w.as_complex()
    denom = m.c * wz + m.d
    d2abs = denom.real * denom.real + denom.imag * denom.imag
    num = m.a * wz + m.b
    out = num * denom.conjugate()
    y = w.y * m.det() / d2abs
    if not y > 0.0:
        raise LossOfPositivity(
            f"Moebius image has imaginary part {y!r}; renormalize the product"
        )
    return HalfPlanePoint(out.real / d2abs, y)


def d1(w: HalfPlanePoint, wp: HalfPlanePoint) -> float:
    """|x - x'| / y, dividing by the FIRST argument's imaginary part."""
    return abs(w.x - wp.x) / w.y


def d2(w: HalfPlanePoint, wp: HalfPlanePoint) -> float:
    """((x-x')^2 + (y-y')^2) / (y y'); symmetric and Moebius invariant."""
    dx = w.x - wp.x
    dy = w.y - wp.y
    return (dx * dx + dy * dy) / (w.y * wp.y)


def rotation_matrix(params: ModelParams, lam: float) -> np.ndarray:
    """(lam / sin^2 theta) [[-cos theta, 1], [-1, cos theta]].

    Not unimodular; returned as a plain array.  Its eigenvector
    directions are (z, 1) and (conj(z), 1).
    """
    st = params.sin_theta
    ct = math.cos(params.theta)
    return (lam / (st * st)) * np.array([[-ct, 1.0], [-1.0, ct]])
