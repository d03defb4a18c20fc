"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DrivenJCError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(DrivenJCError, ValueError):
    """A parameter or configuration value is invalid.

    The offending field name is kept on ``field`` so that callers (the CLI in
    particular) can report it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class InvalidCutoffError(ConfigError):
    pass


class DimensionMismatchError(DrivenJCError, ValueError):
    pass


class UndefinedRevivalError(DrivenJCError, ValueError):
    pass


class NonuniformSamplingError(DrivenJCError, ValueError):
    pass


class NumericalGuardError(DrivenJCError, ArithmeticError):
    """A runtime numerical guard tripped; carries a remediation hint."""

    def __init__(self, message: str, hint: str = ""):
        self.hint = hint
        super().__init__(message if not hint else f"{message} ({hint})")


class TruncationOverflowError(NumericalGuardError):
    pass


class PositivityViolationError(NumericalGuardError):
    pass
