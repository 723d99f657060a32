"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` that the CLI hands back to the shell:
2 for invalid input, 3 for a failed numerical check, 4 for non-convergence.
"""

from typing import Any, Optional


class SptError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(SptError):
    """Input rejected before any numerics ran."""

    exit_code = 2


class NumericalCheckFailure(SptError):
    """A computed quantity failed its tolerance check."""

    exit_code = 3


class ConvergenceError(SptError):
    """An iterative solver did not settle."""

    exit_code = 4


class UnknownGroup(ValidationError):
    pass


class NonUnitaryGenerator(ValidationError):
    pass


class OrderExceeded(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ClassMismatch(ValidationError):
    pass


class MissingCG(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NotScalarOnKernel(ValidationError):
    pass


class MultiplicityTooHigh(ValidationError):
    pass


class InvalidInput(ValidationError):
    pass


class NonIntegerMultiplicity(NumericalCheckFailure):
    pass


class DegenerateSeed(NumericalCheckFailure):
    pass


class NonInjectiveMPS(NumericalCheckFailure):
    pass


class NoSolution(NumericalCheckFailure):
    pass


class NotSymmetricOrAntisymmetric(NumericalCheckFailure):
    pass


class NoIntertwiner(NumericalCheckFailure):
    pass


class ZeroAmplitudeOutcome(NumericalCheckFailure):
    pass


class AttemptsExhausted(NumericalCheckFailure):
    pass


class NonCanonical(NumericalCheckFailure):
    pass


class VerificationFailed(NumericalCheckFailure):
    pass


class DegenerateDominantEigenvalue(NumericalCheckFailure):
    """Raised when the leading transfer eigenvalue is not isolated.

    The value computed anyway is kept on ``value`` so callers can report it.
    """

    def __init__(self, message: str, value: Optional[float] = None):
        super().__init__(message)
        self.value = value


class NoConvergence(ConvergenceError):
    """Imaginary-time schedule ended while the energy was still drifting.

    Args:
        message: Human readable reason
        state: The last state reached, for callers that record it anyway
    """

    def __init__(self, message: str, state: Any = None):
        super().__init__(message)
        self.state = state
