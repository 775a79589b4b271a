"""Exception hierarchy.

Library code raises these; only the command line turns them into exit codes.
"""


class QineqError(Exception):
    """Base class for all library errors."""


class UsageError(QineqError, ValueError):
    """An argument is invalid: wrong dimensions, unknown id, bad configuration."""


class HypothesisError(UsageError):
    """A theorem hypothesis does not hold for the given instance."""

    def __init__(self, hypothesis: str, detail: str = ""):
        message = f"hypothesis violated: {hypothesis}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.hypothesis = hypothesis


class ConvergenceRegionError(UsageError):
    """The resolvent series was requested outside |q| > ||T||."""


class DomainError(QineqError, ValueError):
    """A value lies outside the domain of an operation."""


class StructureError(QineqError, ValueError):
    """A complex matrix is not the image of a quaternionic matrix."""


class SpectralComputationError(QineqError, ArithmeticError):
    """An eigensolver failed or its result did not pass verification."""
