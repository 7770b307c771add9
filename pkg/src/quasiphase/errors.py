"""Exception hierarchy.

Validation problems (bad input, inadequate truncation) derive from
``ValueError``; numerical-tolerance failures derive from ``ArithmeticError``.
The CLI maps the first family to exit code 1 and the second to exit code 2.
"""


class QuasiphaseError(Exception):
    """Base class for all package errors."""


class ValidationError(QuasiphaseError, ValueError):
    """Input rejected before any numerics ran."""


class TruncationError(ValidationError):
    """The Fock cutoff is too small for the requested amplitude or state."""

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class ToleranceError(QuasiphaseError, ArithmeticError):
    """A numerical check failed (imaginary residue, lost unitarity, overflow)."""
