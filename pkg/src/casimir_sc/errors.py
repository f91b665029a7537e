class DomainError(ValueError):
    """Argument outside the physical domain of an operation."""


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


class ConvergenceError(RuntimeError):
    """A quadrature or series failed to reach the requested tolerance.

    Carries the achieved error estimate so callers can report diagnostics.
    """

    def __init__(self, message: str, error_estimate: float = float("nan")):
        super().__init__(message)
        self.error_estimate = error_estimate


class PfaAccuracyWarning(UserWarning):
    """Gap/radius ratio large enough that the PFA error bound is poor."""
