from __future__ import annotations

import logging

from pydantic import BaseModel, ConfigDict

from clock.model import ClockSpec
from clock.validate import validate_elementary, validate_general
from tasks.base import Invocation, Task, TaskKind, TaskResult

logger = logging.getLogger(__name__)


class ValidateParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ValidateTask(Task):
    """Checks a clock file and reports its structural properties."""
    name = "validate"
    description = "Validate a clock spec and report its property flags."
    kind = TaskKind.MODEL

    @property
    def schema(self) -> type[ValidateParams]:
        return ValidateParams

    def execute(self, invocation: Invocation) -> TaskResult:
        spec = invocation.spec()
        if isinstance(spec, ClockSpec):
            flags = validate_elementary(spec)
            payload = {"kind": "elementary", "dim": spec.dim, "flags": flags.to_dict()}
        else:
            report = validate_general(spec)
            payload = {"kind": "general", "dim": spec.total_dim, **report.to_dict()}
        logger.info(f"Validated {invocation.run.spec_paths[0]}")
        summary = {name: value for name, value in payload["flags"].items()}
        return TaskResult.success_result(payload, summary=summary)
