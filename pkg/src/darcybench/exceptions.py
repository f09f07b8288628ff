"""Exception types shared across the benchmark modules."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """A run configuration violates a scheme constraint (e.g. jump-parameter caps)."""


class CoefficientError(ValueError):
    """A sampled coefficient is unusable (nonpositive or non-finite conductivity)."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


class SingularMatrixError(RuntimeError):
    """Direct factorization hit a zero (or below-threshold) pivot."""


class ConvergenceError(RuntimeError):
    """Iterative solve failed to reach the requested tolerance.

    Carries the relative-residual history so callers can diagnose stagnation
    versus divergence.
    """

    def __init__(self, message: str, residual_history=None):
        super().__init__(message)
        self.residual_history = list(residual_history) if residual_history is not None else []


class ModeFileError(ValueError):
    """A mode file could not be parsed; ``line`` is the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
