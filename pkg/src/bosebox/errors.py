"""Shared exception types."""


class DivergenceError(RuntimeError):
    """An integral or series was detected to diverge (or refinement failed to settle)."""


class ToleranceError(RuntimeError):
    """A quadrature or summation could not reach the requested tolerance."""


class TruncationError(RuntimeError):
    """A certified truncation could not be achieved within the configured term cap."""


class NonCondensedError(ValueError):
    """A condensed-regime operation was invoked on a non-condensed state."""
