"""
This module holds the run-wide configuration for tickwork.

Numerical tolerances live in a single `ToleranceConfig`. Defaults can be
overridden from the environment (or a `.env` file) through `TICKWORK_TOL_<NAME>`
variables, and temporarily from code or the CLI through `use_tolerances`.
"""

from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Iterator, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from utils.errors import ConfigError

load_dotenv()

logger = logging.getLogger(__name__)

OutputFormat = Literal["csv", "json", "jsonl"]

# Formats each subcommand knows how to emit.
SUBCOMMAND_FORMATS: dict[str, tuple[str, ...]] = {
    "validate": ("json",),
    "evolve": ("csv", "json"),
    "fcs": ("json",),
    "waiting-time": ("csv", "json"),
    "allan": ("json", "csv"),
    "sample": ("jsonl", "json"),
    "pair": ("jsonl", "json"),
    "relative-counts": ("json", "csv"),
    "discrete": ("csv", "json"),
    "ki": ("json",),
    "zeno": ("json", "csv"),
    "swp": ("json",),
}


class ToleranceConfig(BaseModel):
    """
    Numerical tolerances shared by every module.

    Attributes:
        hermitian: Max-norm tolerance for Hermiticity checks.
        psd: Smallest eigenvalue accepted as non-negative (negated).
        trace: Tolerance for unit-trace checks.
        eigen_gap: Minimum spectral gap below the leading eigenvalue.
        nullspace: Relative singular-value cut-off for null spaces.
        integrator: Absolute error per unit time accepted by the integrator.
        structure: Tolerance for block-structure and fixed-point residuals.
    """
    model_config = ConfigDict(frozen=True)

    hermitian: float = Field(1e-12, gt=0)
    psd: float = Field(1e-12, gt=0)
    trace: float = Field(1e-12, gt=0)
    eigen_gap: float = Field(1e-10, gt=0)
    nullspace: float = Field(1e-10, gt=0)
    integrator: float = Field(1e-9, gt=0)
    structure: float = Field(1e-10, gt=0)

    @classmethod
    def from_env(cls) -> ToleranceConfig:
        """
        Builds the configuration from `TICKWORK_TOL_*` environment variables.

        Raises:
            ConfigError: If a variable is not a positive number.
        """
        values: dict[str, float] = {}
        for name in cls.model_fields:
            variable = f"TICKWORK_TOL_{name.upper()}"
            raw = os.getenv(variable)
            if raw is None:
                continue
            try:
                values[name] = float(raw)
            except ValueError:
                raise ConfigError(f"{variable} must be a number, got '{raw}'") from None
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid TICKWORK_TOL_* value: {e.errors()[0].get('msg', 'invalid')}") from None


_env_tolerances: ToleranceConfig | None = None
# Overrides are scoped to the current context.
_active_tolerances: ContextVar[ToleranceConfig | None] = ContextVar("tickwork_tolerances", default=None)


def get_tolerances() -> ToleranceConfig:
    """Returns the tolerances of the current context, falling back to the environment defaults."""
    global _env_tolerances
    active = _active_tolerances.get()
    if active is not None:
        return active
    if _env_tolerances is None:
        _env_tolerances = ToleranceConfig.from_env()
    return _env_tolerances


@contextmanager
def use_tolerances(**overrides: float) -> Iterator[ToleranceConfig]:
    """
    Temporarily replaces selected tolerances in the current context.

    Threads started inside the block do not inherit the overrides unless the
    work is run through `contextvars.copy_context()`.

    Args:
        **overrides: Tolerance names mapped to their new values.

    Yields:
        The active configuration.
    """
    unknown = set(overrides) - set(ToleranceConfig.model_fields)
    if unknown:
        raise ValueError(f"Unknown tolerance(s): {', '.join(sorted(unknown))}")
    active = ToleranceConfig(**{**get_tolerances().model_dump(), **overrides})
    token = _active_tolerances.set(active)
    logger.debug(f"Tolerances overridden: {overrides}")
    try:
        yield active
    finally:
        _active_tolerances.reset(token)


def default_seed() -> int:
    """
    Returns the seed from `TICKWORK_SEED`, or 0 when unset.

    Raises:
        ConfigError: If the variable is not an integer.
    """
    raw = os.getenv("TICKWORK_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"TICKWORK_SEED must be an integer, got '{raw}'") from None


def default_log_level() -> str:
    return os.getenv("TICKWORK_LOG_LEVEL", "WARNING").upper()


class RunConfig(BaseModel):
    """
    Everything a single CLI invocation needs beyond its numerical parameters.

    Attributes:
        subcommand: Name of the subcommand being run.
        spec_paths: Clock or channel files consumed by the run.
        output: Destination file; None means standard output.
        output_format: One of the formats the subcommand declares.
        seed: Master seed for every random stream of the run.
        threads: Worker threads for trajectory sampling.
        tolerance_overrides: Tolerance names mapped to replacement values.
    """
    subcommand: str
    spec_paths: list[Path] = Field(default_factory=list)
    output: Path | None = None
    output_format: OutputFormat = "json"
    seed: int = Field(default_factory=default_seed)
    threads: int = Field(1, ge=1)
    tolerance_overrides: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _format_matches_subcommand(self) -> RunConfig:
        allowed = SUBCOMMAND_FORMATS.get(self.subcommand)
        if allowed is None:
            raise ValueError(f"Unknown subcommand: {self.subcommand}")
        if self.output_format not in allowed:
            raise ValueError(
                f"Subcommand '{self.subcommand}' cannot emit '{self.output_format}' "
                f"(supported: {', '.join(allowed)})"
            )
        unknown = set(self.tolerance_overrides) - set(ToleranceConfig.model_fields)
        if unknown:
            raise ValueError(f"Unknown tolerance(s): {', '.join(sorted(unknown))}")
        return self
