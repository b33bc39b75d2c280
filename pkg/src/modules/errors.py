"""
Exception hierarchy for the blockfade toolkit.

Every error raised on purpose by the numerical modules derives from
BlockfadeError, itself a ValueError, so callers can catch either.
"""

from typing import Optional


class BlockfadeError(ValueError):
    """Base class for toolkit errors."""


class InvalidParameterError(BlockfadeError):
    """A parameter is outside the domain of the requested operation."""


class InvalidModelError(BlockfadeError):
    """A channel model violates normalization, Hermitian or PSD structure."""


class DomainError(BlockfadeError):
    """A closed-form expression was evaluated outside its domain."""


class RegularityError(BlockfadeError):
    """The fading process is not regular (det Sigma(inf) = 0)."""


class ConditionViolationError(BlockfadeError):
    """A structural hypothesis of a bound or asymptote does not hold."""


class ToleranceNotMetError(BlockfadeError):
    """Numerical integration stopped before reaching the requested tolerance."""

    def __init__(self, message: str, estimate: float, achieved: float, requested: Optional[float] = None):
        super().__init__(f"{message} (estimate={estimate!r}, achieved={achieved:.3e}, requested={requested})")
        self.estimate = estimate
        self.achieved = achieved
        self.requested = requested


class ModelParseError(BlockfadeError):
    """A model description could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        position = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{position}")
        self.line = line
        self.column = column
