"""Exception hierarchy. The CLI maps each family onto an exit code."""


class OmegaTriangleError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(OmegaTriangleError, ValueError):
    """Bad argument from the caller (out-of-range offset, unknown format, ...)."""


class DomainError(UsageError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(UsageError):
    """Inputs that are individually valid but inconsistent with each other."""


class IntegrityError(OmegaTriangleError):
    """Data violates a triangle invariant (row sum, endpoints, monotone growth)."""


class ParseError(IntegrityError):
    """Serialized triangle text could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ResourceExhaustedError(OmegaTriangleError):
    """Ran out of memory while building a row."""

    def __init__(self, exponent: int):
        super().__init__(f"resource exhaustion while building row 2^{exponent}")
        self.exponent = exponent
