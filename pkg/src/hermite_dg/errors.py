"""Shared exception types."""


class NumericalFailure(RuntimeError):
    """Raised when the solver produces non-finite values."""


class ConfigError(ValueError):
    """Raised for invalid or unknown run-configuration input."""
