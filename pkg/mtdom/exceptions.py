"""Custom exceptions for the mtdom package."""

from typing import Optional


class MtdomError(Exception):
    """Base exception for all mtdom errors."""

    pass


class InputError(MtdomError):
    """Base exception for malformed input. The CLI exits with code 1."""

    pass


class LpInputError(InputError):
    """Raised when a linear program is malformed (dimension mismatch, no variables)."""

    pass


class RelationError(InputError):
    """Raised when a relation is not a preorder or references unknown elements."""

    pass


class DeltaRangeError(InputError):
    """Raised when a granularity threshold lies outside [0, 1)."""

    pass


class ProblemFileError(InputError):
    """Raised when a problem file cannot be parsed or validated."""

    pass


class EnumerationTooLargeError(InputError):
    """Raised when exact vertex enumeration exceeds the configured guard."""

    pass


class InconsistencyError(MtdomError):
    """Base exception for infeasible models. The CLI exits with code 2."""

    pass


class InconsistentPreferenceError(InconsistencyError):
    """Raised when a preference system has no representation at the requested delta."""

    def __init__(self, message: str, delta_max: Optional[float] = None):
        super().__init__(message)
        self.delta_max = delta_max


class InfeasibleCredalSetError(InconsistencyError):
    """Raised when the constraints of a credal set admit no probability vector."""

    pass


class SolverError(MtdomError):
    """Raised when the LP backend fails for reasons other than infeasibility."""

    pass
