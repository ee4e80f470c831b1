"""
This module defines the error hierarchy for tickwork.

Every failure the toolkit can report carries a short machine-readable `kind`
so that the CLI can emit `{"error_kind", "detail"}` without inspecting messages.
"""

from __future__ import annotations


class TickworkError(Exception):
    """
    Base class for all tickwork failures.

    Attributes:
        kind: Machine-readable category, emitted as `error_kind` by the CLI.
        violations: Individual findings when a check collected more than one.
    """
    kind: str = "internal"

    def __init__(self, detail: str, violations: list[str] | None = None) -> None:
        super().__init__(detail)
        self.detail = detail
        self.violations: list[str] = list(violations or [])

    def to_dict(self) -> dict[str, str | list[str]]:
        """Returns the error as the JSON object printed on standard error."""
        payload: dict[str, str | list[str]] = {
            "error_kind": self.kind,
            "detail": self.detail,
        }
        if self.violations:
            payload["violations"] = self.violations
        return payload


class DimensionError(TickworkError):
    kind = "dimension"


class ConditioningError(TickworkError):
    kind = "conditioning"


class DegeneracyError(TickworkError):
    """Raised when a generator has no unique leading eigenvalue or steady state."""
    kind = "degeneracy"


class ClockValidationError(TickworkError):
    kind = "validation"

    @classmethod
    def from_violations(cls, what: str, violations: list[str]) -> ClockValidationError:
        return cls(f"{what} failed validation: {'; '.join(violations)}", violations)


class ConfigError(TickworkError):
    """Raised when a `TICKWORK_*` environment variable holds an unusable value."""
    kind = "validation"


class StructureError(TickworkError):
    kind = "structure"


class SpecParseError(TickworkError):
    kind = "parse"


class IntegrationError(TickworkError):
    kind = "integration"


class TruncationError(TickworkError):
    """Raised when too much probability has collected in the top register bin."""
    kind = "truncation"

    def __init__(self, detail: str, suggested_n_max: int) -> None:
        super().__init__(detail)
        self.suggested_n_max = suggested_n_max


class PreconditionError(TickworkError):
    kind = "precondition"


class DarkStateError(TickworkError):
    kind = "dark-state"


class ConsistencyError(TickworkError):
    kind = "consistency"


class IdentityError(TickworkError):
    kind = "identity"


class RecordLengthError(TickworkError):
    kind = "length"


class DataError(TickworkError):
    kind = "data"


class HorizonError(TickworkError):
    kind = "horizon"


class StabilityError(TickworkError):
    kind = "stability"


class UnsupportedError(TickworkError):
    kind = "unsupported"


class ShapeError(TickworkError):
    kind = "shape"


class NumericalRankError(TickworkError):
    kind = "numerical-rank"
