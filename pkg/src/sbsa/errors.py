"""Exception hierarchy.

Each class carries the CLI exit code for its category, so the command line
layer can map failures without string matching.
"""


class SbsaError(Exception):
    exit_code = 1


class InvalidInputError(SbsaError, ValueError):
    """Malformed signal, file or annotation."""

    exit_code = 2


class DomainError(SbsaError, ValueError):
    """Argument outside the mathematical domain of an operation (chi <= 0, ...)."""

    exit_code = 2


class SegmentationError(InvalidInputError):
    """No usable beats could be delimited in a recording."""


class NumericError(SbsaError, ArithmeticError):
    """Eigensolver or search failure."""

    exit_code = 3


class BracketError(NumericError):
    """Requested component count not reachable inside the chi bracket."""


class NoBoundStateError(NumericError):
    """Signal has no bound states for any chi (identically zero)."""


class InsufficientDataError(SbsaError, ValueError):
    exit_code = 4


class DegenerateInputError(InsufficientDataError):
    """Regression predictor with zero variance."""
