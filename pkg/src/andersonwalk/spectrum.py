"""Finite-box Hamiltonian and exact eigenvalue counting.

The box operator is the symmetric tridiagonal matrix with 1 on the
off-diagonals and sigma*omega_i on the diagonal.  Counting is done by
the LDL^T inertia (Sturm) recursion, which is exact for shifts off the
spectrum; a dense eigensolver is kept around as a test oracle only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from . import _kernels
from .errors import SizeLimit

__all__ = [
    "FiniteHamiltonian",
    "count_below",
    "count_in_interval",
    "dense_eigenvalues",
]

_DENSE_CAP = 2000


@dataclass(frozen=True)
class FiniteHamiltonian:
    """Symmetric tridiagonal box operator; off-diagonal entries are 1."""

    diag: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(np.asarray(self.diag, dtype=np.float64))
        if d.ndim != 1 or d.shape[0] < 1:
            raise ValueError("diag must be a nonempty 1-D array")
        object.__setattr__(self, "diag", d)

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    @staticmethod
    def from_noise(sigma: float, omegas) -> "FiniteHamiltonian":
        return FiniteHamiltonian(diag=sigma * np.asarray(omegas, dtype=np.float64))


def count_below(h: FiniteHamiltonian, e: float) -> int:
    """Number of eigenvalues strictly below ``e``.

    Zero pivots in the inertia recursion are replaced by -1e-300, the
    E -> E+0 limit (right-continuous count).
    """
    return int(_kernels.sturm_count_below(h.diag, float(e)))


def count_in_interval(h: FiniteHamiltonian, lambda0: float, lam: float) -> int:
    """Eigenvalues in the closed interval [lambda0, lambda0 + lam].

    Realized as count_below(lambda0 + lam + ulp) - count_below(lambda0),
    so an eigenvalue sitting exactly on the right endpoint is included
    and one on the left endpoint is included as well (count_below is
    strict).  Endpoint hits are measure-zero for continuous noise; the
    convention just makes tests deterministic.
    """
    if not lam > 0.0:
        raise ValueError(f"interval width lam={lam!r} must be > 0")
    hi = float(lambda0) + float(lam)
    hi = math.nextafter(hi, math.inf)
    return count_below(h, hi) - count_below(h, float(lambda0))


def dense_eigenvalues(h: FiniteHamiltonian) -> np.ndarray:
    """All eigenvalues, ascending.  Oracle only; capped at n = 2000."""
    if h.n > _DENSE_CAP:
        raise SizeLimit(f"dense solve refused for n={h.n} > {_DENSE_CAP}")
    if h.n == 1:
        return h.diag.copy()
    off = np.ones(h.n - 1)
    return eigvalsh_tridiagonal(h.diag, off)
