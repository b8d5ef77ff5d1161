"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class PaulizError(Exception):
    """Base class for all library errors."""


class SchemaError(PaulizError, ValueError):
    """Input file or text does not match the expected format."""


class InfeasibleError(PaulizError):
    """A budget or plan cannot be met with addressable resources.

    ``required`` carries the offending magnitude (shot count, Trotter steps,
    or its natural log when it does not fit in a float).
    """

    def __init__(self, message: str, required: float | None = None):
        super().__init__(message)
        self.required = required


class RoundCapError(InfeasibleError):
    """Additive-to-multiplicative halving ran out of rounds."""


class CapacityError(PaulizError):
    """Problem too large for a dense or statevector backend."""
