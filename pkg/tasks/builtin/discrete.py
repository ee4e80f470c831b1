from __future__ import annotations

import logging
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from discrete.maps import binned_waiting_time, bitstring_distribution, build_step, total_variation
from tasks.base import Invocation, Task, TaskKind, TaskResult

logger = logging.getLogger(__name__)


class DiscreteParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delta: float = Field(gt=0, allow_inf_nan=False)
    steps: int = Field(ge=1)
    order: Literal["first", "exact"] = "exact"


class DiscreteTask(Task):
    """First-tick law of the tick/no-tick bit register next to the binned continuous law."""
    name = "discrete"
    description = "First-tick pmf of the discrete maps picture and its distance to the continuous clock."
    kind = TaskKind.STATISTICS

    @property
    def schema(self) -> type[DiscreteParams]:
        return DiscreteParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        spec = invocation.elementary_spec()
        reset = spec.initial_clockwork
        step = build_step(spec, params.delta, params.order)
        discrete = bitstring_distribution(step, reset, params.steps)
        continuous = binned_waiting_time(spec, reset, params.delta, params.steps)
        tv = total_variation(discrete.pmf, continuous)
        rows = [
            {"j": j + 1, "t": (j + 1) * params.delta, "p_discrete": float(p), "p_continuous": float(q)}
            for j, (p, q) in enumerate(zip(discrete.pmf, continuous))
        ]
        payload = {
            "delta": params.delta,
            "steps": params.steps,
            "order": params.order,
            "remainder": discrete.remainder,
            "tv": tv,
            "pmf": discrete.pmf.tolist(),
        }
        logger.info(f"Discrete first-tick law: TV distance {tv:.3e}")
        return TaskResult.success_result(
            payload,
            rows=rows,
            columns=["j", "t", "p_discrete", "p_continuous"],
            summary={"tv": tv, "remainder": discrete.remainder},
        )
