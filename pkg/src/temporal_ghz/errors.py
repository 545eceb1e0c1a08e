"""
Exception hierarchy for temporal-ghz.
"""


class TemporalGHZError(Exception):
    """Base class for every error raised by this package"""


class PreconditionError(TemporalGHZError, ValueError):
    """An operation was called outside its documented preconditions"""


class DimensionMismatchError(PreconditionError):
    """Two objects living in different dimensions (or shapes) were combined"""


class InvalidTimelineError(PreconditionError):
    """A timeline or distribution violates the product constraint or the simplex"""


class EnumerationTooLargeError(PreconditionError):
    """The requested timeline set is larger than the enumeration cap"""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"too large to enumerate: {count} timelines exceeds the cap of {cap}")


class OptimizationError(TemporalGHZError):
    """The optimizer produced no acceptable candidate"""
