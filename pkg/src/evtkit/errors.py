"""Exception hierarchy shared by every evtkit module."""

from __future__ import annotations


class EVTError(Exception):
    """Base class for all evtkit errors."""


class DomainError(EVTError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class InvalidModelError(DomainError):
    """A distribution parameterization failed validation at construction."""


class SingularityError(EVTError, ArithmeticError):
    """An estimator formula hit a division by zero or a degenerate configuration."""


class EstimatorOverflowError(EVTError, OverflowError):
    """An intermediate quantity became non-finite."""


class EstimationError(EVTError):
    """A data-driven estimation procedure could not produce a valid result."""


class NoExceedanceError(DomainError):
    """No observation exceeds the requested threshold."""


class SelectionError(EVTError):
    """Threshold (sample fraction) selection failed.

    The ``diagnostics`` attribute carries whatever curves were computed before
    the failure, so callers can inspect them.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConvergenceError(EVTError):
    """A numerical optimizer did not converge."""
