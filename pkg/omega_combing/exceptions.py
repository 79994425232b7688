"""Errors raised by omega-combing."""

from __future__ import annotations


class OmegaError(Exception):
    """Base class for every error raised by the library."""


class InvalidPointError(OmegaError, ValueError):
    """A point of the half-plane with y <= 0 or a non-finite coordinate."""


class DegenerateInputError(OmegaError, ValueError):
    """Coincident points where two distinct points are required."""


class ParameterRangeError(OmegaError, ValueError):
    """A parameter outside the range an operation is defined on."""


class PreconditionError(OmegaError, ValueError):
    """Inputs violate an operation's precondition."""


class InvalidBasepointError(OmegaError):
    """The combing basepoint lies inside a removed horoball."""


class InvalidTargetError(OmegaError):
    """A combing target lies inside a removed horoball."""


class NonTrivialWordError(OmegaError, ValueError):
    """A word expected to be a loop does not represent the identity."""


class PairGenerationError(OmegaError):
    """Random target generation gave up after its retry budget."""


class TrialFailed(OmegaError):
    """A worker trial raised; the original error is chained."""
