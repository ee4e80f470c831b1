"""
This module defines the building blocks of the tickwork `Task` system.

Every CLI subcommand is a `Task`: a name, a pydantic schema for its
parameters, the output formats it can emit and an `execute` method that
returns a `TaskResult`. The click layer in `main.py` only parses flags and
prints; everything numerical happens behind this contract.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
import sys
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ValidationError

from clock.io import load_spec
from clock.model import ClockSpec, GeneralClockSpec
from clock.validate import general_to_clock_spec, validate_elementary, validate_general
from config import RunConfig
from utils.errors import PreconditionError

if sys.version_info >= (3, 11):
    from enum import StrEnum
else:
    class StrEnum(str, Enum):
        """Backport of `enum.StrEnum` for Python 3.10."""

        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return format(str(self.value), format_spec)


class TaskKind(StrEnum):
    """
    Categorizes tasks by what they compute.

    The kind picks the accent colour of the summary table on standard error.
    """
    MODEL = "model"
    EVOLUTION = "evolution"
    STATISTICS = "statistics"
    SAMPLING = "sampling"
    STRUCTURE = "structure"


@dataclass
class TaskResult:
    """
    Encapsulates the outcome of a task.

    Attributes:
        success: Whether the task finished without error.
        payload: The JSON document printed for `--out json`.
        rows: Flat records for `--out csv` and `--out jsonl`.
        columns: Column order for CSV; defaults to the keys of the first row.
        error: Human-readable failure detail if success is False.
        error_kind: Machine-readable failure category.
        summary: A few headline numbers for the summary table.
    """
    success: bool
    payload: Any = None
    rows: list[Any] = field(default_factory=list)
    columns: list[str] | None = None
    error: str | None = None
    error_kind: str | None = None
    summary: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def error_result(cls, error: str, error_kind: str = "internal", **kwargs) -> TaskResult:
        return cls(success=False, error=error, error_kind=error_kind, **kwargs)

    @classmethod
    def success_result(cls, payload: Any = None, **kwargs) -> TaskResult:
        return cls(success=True, payload=payload, **kwargs)

    def error_document(self) -> dict[str, str]:
        """The `{error_kind, detail}` object printed on standard error."""
        return {"error_kind": self.error_kind or "internal", "detail": self.error or ""}


@dataclass
class Invocation:
    """
    A request to run a task.

    Attributes:
        params: Validated task parameters.
        run: The run-wide configuration (spec paths, seed, threads, format).
    """
    params: dict[str, Any]
    run: RunConfig

    @property
    def cwd(self) -> Path:
        return Path.cwd()

    def spec(self, index: int = 0) -> ClockSpec | GeneralClockSpec:
        """
        Loads and validates the `index`-th spec file of the run.

        Raises:
            PreconditionError: If the run has fewer spec files.
            SpecParseError: If the file does not match the schema.
            ClockValidationError: If the model is malformed.
            StructureError: If a block-clock jump touches more than one block pair.
        """
        paths = self.run.spec_paths
        if index >= len(paths):
            raise PreconditionError(f"Subcommand '{self.run.subcommand}' needs {index + 1} spec file(s)")
        spec = load_spec(paths[index])
        if isinstance(spec, GeneralClockSpec):
            validate_general(spec)
        else:
            validate_elementary(spec)
        return spec

    def elementary_spec(self, index: int = 0) -> ClockSpec:
        """Loads a spec file as a `ClockSpec`; single-block general specs are converted."""
        spec = self.spec(index)
        if isinstance(spec, GeneralClockSpec):
            return general_to_clock_spec(spec)
        return spec


class Task(abc.ABC):
    """
    The abstract base class for all tickwork subcommands.

    Attributes:
        name: Subcommand name.
        description: One-line help text.
        kind: What the task computes.
    """
    name: str = "base_task"
    description: str = "Base task"
    kind: TaskKind = TaskKind.MODEL

    @property
    def schema(self) -> type[BaseModel]:
        """The pydantic model the task's parameters must satisfy."""
        raise NotImplementedError("The task must define a schema property.")

    @abc.abstractmethod
    def execute(self, invocation: Invocation) -> TaskResult:
        """
        Runs the computation.

        Args:
            invocation: Validated parameters and run configuration.

        Returns:
            The result; failures are raised as `TickworkError` and turned into
            error results by the registry.
        """

    def parse_params(self, params: dict[str, Any]) -> BaseModel:
        return self.schema(**params)

    def validate_params(self, params: dict[str, Any]) -> list[str]:
        """
        Validates the provided parameters against the task's schema.

        Returns:
            A list of error messages. If empty, validation passed.
        """
        try:
            self.parse_params(params)
        except ValidationError as e:
            errors = []
            for error in e.errors():
                name = ".".join(str(x) for x in error.get("loc", []))
                msg = error.get("msg", "Validation Error")
                errors.append(f"Parameter '{name}': {msg}")
            return errors
        except Exception as e:
            return [str(e)]
        return []
