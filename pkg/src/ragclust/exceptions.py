"""Exception types shared across the package."""


class RagError(Exception):
    """Base class for all package errors."""


class InvalidParams(RagError, ValueError):
    """Model parameters violate 0 <= r2 < r1 <= 0.5 or n >= 1."""


class RegimeViolation(RagError, ValueError):
    """A limit-theorem quantity was requested with 2*r2 >= r1."""


class CapExceeded(RagError):
    """Dense adjacency requested for a graph larger than the configured cap."""


class NonpositiveSigma(RagError, ValueError):
    pass


class EmptySample(RagError, ValueError):
    pass


class TooManyExclusions(RagError):
    """More than 10% of replicates had an undefined clustering coefficient."""
