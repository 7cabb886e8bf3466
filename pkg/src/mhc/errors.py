"""Error types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition.

    The CLI maps this to exit code 1; genuine I/O failures (OSError)
    map to exit code 2.
    """
