"""Exception types shared across the package."""


class ContrastGanError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ContrastGanError, ValueError):
    """A configuration object violates its invariants."""


class RangeViolationError(ContrastGanError, ValueError):
    """A condition value lies outside the configured space.

    Carries the name of the offending field so callers (CLI, service)
    can point at it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


class EncodingError(ContrastGanError, ValueError):
    """An encoded condition does not satisfy its invariants (e.g. bad one-hot)."""


class SchemaError(ContrastGanError, ValueError):
    """A manifest is missing required columns."""


class ManifestParseError(ContrastGanError, ValueError):
    """A manifest row could not be parsed; carries the 1-based row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DegenerateInputError(ContrastGanError, ValueError):
    """An image has zero dynamic range and cannot be normalized."""


class DomainError(ContrastGanError, ValueError):
    """A physical parameter is outside its valid domain (e.g. T1 <= 0)."""


class InsufficientDataError(ContrastGanError, ValueError):
    """Not enough data to satisfy a split quota or evaluation request."""


class ShapeError(ContrastGanError, ValueError):
    """Tensor/array shapes are inconsistent with the requested operation."""


class NumericError(ContrastGanError, RuntimeError):
    """A numeric computation produced non-finite values."""


class DivergenceError(ContrastGanError, RuntimeError):
    """Training losses stayed non-finite for several consecutive steps."""

    def __init__(self, message: str, telemetry_tail=None):
        super().__init__(message)
        self.telemetry_tail = telemetry_tail or []


class CheckpointVersionError(ContrastGanError, RuntimeError):
    """A checkpoint was written with an incompatible format version."""
