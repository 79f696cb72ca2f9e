"""Exception and warning types raised across the package."""


class FockbenchError(Exception):
    """Base class for all package errors."""


class ConfigurationError(FockbenchError, ValueError):
    """Inputs are structurally inconsistent (shapes, labels, cutoffs)."""


class DomainError(FockbenchError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class TruncationError(FockbenchError, RuntimeError):
    """The Fock cutoff is too small for the requested accuracy."""


class DegenerateStateError(FockbenchError, ArithmeticError):
    """A conditional state vanished identically and cannot be normalized."""


class TruncationWarning(UserWarning):
    """Probability mass at the Fock cutoff boundary exceeds the guard threshold."""
