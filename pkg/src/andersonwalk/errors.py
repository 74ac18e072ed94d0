"""Exception types shared across the package."""


class AndersonWalkError(Exception):
    """Base class for all library errors."""


class DegenerateEnergy(AndersonWalkError):
    """Energy lambda0 in {-2, 0, 2}: sin(theta) or sin(2*theta) vanishes."""


class InvalidBound(AndersonWalkError):
    """Noise bound c0 incompatible with a mean-0, variance-1 law (c0 < 1)."""


class LossOfPositivity(AndersonWalkError):
    """Moebius image left the upper half plane after rounding."""


class SizeLimit(AndersonWalkError):
    """Dense eigensolver requested beyond its size cap."""


class RefinementLimit(AndersonWalkError):
    """Adaptive interval subdivision exceeded its cell budget."""


class DenominatorNearZero(AndersonWalkError):
    """Phase-recursion denominator too close to zero (outside the valid regime)."""


class HypothesisViolated(AndersonWalkError):
    """A theorem hypothesis fails for the supplied parameters.

    The message names the specific failing inequality.
    """


class InvalidBeta(AndersonWalkError):
    """beta outside (0, 1/(2M)] in the eigenvalue/backtrack comparison."""


class MarginViolated(AndersonWalkError):
    """lambda0 outside the spectral-window margin required by the IDS bound."""


class InsufficientSignal(AndersonWalkError):
    """Too few signal-dominated grid points to fit a power law."""
