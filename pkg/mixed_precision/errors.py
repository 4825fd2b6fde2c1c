"""
Exception hierarchy for the mixed-precision engine.

Every failure raised by the package derives from MixedPrecisionError so the
CLI can map families of errors onto exit codes.
"""

from typing import Any, Optional


class MixedPrecisionError(Exception):
    """Base class for all errors raised by the engine."""


class ContractError(MixedPrecisionError):
    """A precondition of an operation was violated by the caller."""


class DimensionError(ContractError):
    """Operand shapes do not conform for an operation."""

    def __init__(self, op: str, left_shape: tuple, right_shape: tuple):
        self.op = op
        self.left_shape = tuple(left_shape)
        self.right_shape = tuple(right_shape)
        super().__init__(
            f"{op}: shapes {self.left_shape} and {self.right_shape} do not conform"
        )


class NumericError(MixedPrecisionError):
    """Non-finite values or a solver that failed to converge."""


class ConstraintError(MixedPrecisionError):
    """A resource constraint cannot be satisfied."""


class GuardError(MixedPrecisionError):
    """An exhaustive search was refused because the space is too large."""


class ConfigError(MixedPrecisionError):
    """Invalid run configuration; key_path names the offending key(s)."""

    def __init__(self, message: str, key_path: str = ""):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}" if key_path else message)


class FormatError(MixedPrecisionError):
    """Malformed input file; offset is the byte position of the problem."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        suffix = f" (at byte offset {offset})" if offset is not None else ""
        super().__init__(f"{message}{suffix}")


class TrainingAborted(NumericError):
    """A training run diverged; report holds everything recorded so far."""

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message)
