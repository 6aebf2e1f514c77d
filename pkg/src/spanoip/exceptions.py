"""Exception hierarchy for spanoip."""


class SpanOipError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SpanOipError, ValueError):
    """Malformed candidate sets, bitstrings or trees."""


class BoundViolationError(SpanOipError):
    """An ordering failed the |C_j| * max(2, j) <= |C| check."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PromiseViolationError(SpanOipError):
    """Oracle answers are not consistent with any candidate."""


class ScaleLimitError(SpanOipError, ValueError):
    """Requested problem is beyond the exact solver's size limits."""


class MissingWeightError(SpanOipError, KeyError):
    pass


class WitnessError(SpanOipError):
    """A witness failed its numerical check; indicates a construction bug."""
