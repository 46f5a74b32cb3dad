"""
Exception hierarchy for the design library.

All library errors derive from DesignError. They deliberately do not derive
from ValueError so that they pass through pydantic validators unchanged.
"""


class DesignError(Exception):
    """Base class for every error raised by the library."""


class InvalidIndex(DesignError):
    """An experiment index lies outside [0, n)."""


class ModeViolation(DesignError):
    """An operation is incompatible with the instance's repetition mode."""


class DimensionError(DesignError):
    """Vector or matrix shapes do not agree."""


class SingularGram(DesignError):
    """The weighted Gram matrix is singular where an inverse is required."""


class InvalidOrder(DesignError):
    """Elementary symmetric polynomial order out of range."""


class DegenerateNodes(DesignError):
    """Interpolation abscissae are not pairwise distinct."""


class InfeasibleRank(DesignError):
    """The experiment vectors do not span R^m."""


class NotRationalized(DesignError):
    """q times a weight is not an integer."""


class UnreachableCondition(DesignError):
    """A conditional expectation conditions on a probability-zero event."""


class InvalidParams(DesignError):
    """Bound parameters violate m <= k <= n or eps ranges."""


class TooLarge(DesignError):
    """An exhaustive enumeration would exceed the configured cap."""
