"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Argument violates a documented precondition."""


class UnsupportedSizeError(InvalidInputError):
    """Input is well formed but exceeds an enumeration or quadrature bound."""


class ResourceLimitError(InvalidInputError):
    """Requested enumeration would exceed the configured work budget."""
