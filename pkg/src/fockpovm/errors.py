"""Exception types shared across the package."""


class FockPovmError(Exception):
    """Base class for every error raised by this package."""


class InvalidState(FockPovmError, ValueError):
    """A density-matrix invariant (shape, finiteness, Hermiticity, trace) is violated."""


class TruncationTooSmall(FockPovmError, ValueError):
    """The truncated basis leaves too much probability outside; carries the tail mass."""

    def __init__(self, message: str, tail_mass: float | None = None):
        super().__init__(message)
        self.tail_mass = tail_mass


class IndexOutOfRange(FockPovmError, IndexError):
    """A number-state index lies outside the truncated basis."""


class InvalidResolution(FockPovmError, ValueError):
    """The measurement resolution must be a positive finite number."""


class NegligibleOutcome(FockPovmError, ArithmeticError):
    """Outcome density below the floor where the conditional update is 0/0 noise."""


class GridInsufficient(FockPovmError, ValueError):
    """The outcome grid fails the normalization precondition for quadrature averages."""
