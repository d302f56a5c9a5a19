"""Exception types shared across the package."""


class InvalidMeasureError(ValueError):
    """The measure specification is malformed or has infinite mass."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(ValueError):
    """A documented precondition of the operation does not hold."""


class NoPredictionError(ValueError):
    """No theorem covers the requested parameter range."""


class NumericError(RuntimeError):
    """A numerical procedure failed to reach its tolerance.

    ``partial`` carries the best estimate available when the procedure gave up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TruncationError(NumericError):
    """The truncated operator residual exceeds the requested tolerance."""

    def __init__(self, message, partial=None, suggested_k_in=None):
        super().__init__(message, partial)
        self.suggested_k_in = suggested_k_in
