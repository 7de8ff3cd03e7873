"""Exception types shared across the package."""


class SigmaError(Exception):
    """Base class for all errors raised by sigmap."""


class MalformedInputError(SigmaError, ValueError):
    pass


class DomainError(SigmaError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceLimitError(SigmaError, RuntimeError):
    """A search exceeded its node-expansion budget."""


class ConvergenceError(SigmaError, RuntimeError):
    pass


class TheoremViolation(SigmaError, AssertionError):
    """A theorem-backed check failed on concrete data."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class PartialResultError(SigmaError, RuntimeError):
    """The requested object could only be built partially; ``partial`` holds it."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SchemaError(SigmaError, ValueError):
    pass
