"""
Structural subcommands: channel decomposition, the Zeno experiment and the
equally spaced clock demo.
"""

from __future__ import annotations

import logging

from pydantic import BaseModel, ConfigDict, Field, field_validator

from structure.channels import load_channel
from structure.ki import ki_decompose, verify_decomposition
from structure.swp import SWPConfig, swp_demo
from structure.zeno import ZenoConfig, zeno_experiment
from tasks.base import Invocation, Task, TaskKind, TaskResult
from utils.errors import PreconditionError

logger = logging.getLogger(__name__)


class KIParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class KITask(Task):
    name = "ki"
    description = "Decompose the invariant states of a channel into C_n (x) F_n blocks."
    kind = TaskKind.STRUCTURE

    @property
    def schema(self) -> type[KIParams]:
        return KIParams

    def execute(self, invocation: Invocation) -> TaskResult:
        if not invocation.run.spec_paths:
            raise PreconditionError("Subcommand 'ki' needs a channel file")
        channel = load_channel(invocation.run.spec_paths[0])
        decomp = ki_decompose(channel, seed=invocation.run.seed)
        payload = decomp.to_dict()
        payload["check"] = verify_decomposition(channel, decomp).to_dict()
        blocks = ", ".join(f"({c},{f})" for c, f in decomp.blocks)
        return TaskResult.success_result(payload, summary={"dim": decomp.dim, "blocks": blocks})


class ZenoParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega: float = Field(gt=0, allow_inf_nan=False)
    time: float = Field(gt=0, allow_inf_nan=False)
    counts: list[int] = Field(min_length=1)
    schedule: str = "fixed"

    @field_validator("schedule")
    @classmethod
    def _known_schedule(cls, schedule: str) -> str:
        ZenoConfig.parse_schedule(schedule)
        return schedule


class ZenoTask(Task):
    name = "zeno"
    description = "Survival of a Rabi-driven register under m projective readings."
    kind = TaskKind.STRUCTURE

    @property
    def schema(self) -> type[ZenoParams]:
        return ZenoParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        schedule, width = ZenoConfig.parse_schedule(params.schedule)
        cfg = ZenoConfig(
            rabi_frequency=params.omega,
            total_time=params.time,
            measurement_counts=params.counts,
            schedule=schedule,
            jitter_width=width,
            seed=invocation.run.seed,
        )
        rows = [point.to_dict() for point in zeno_experiment(cfg)]
        return TaskResult.success_result(
            {"config": cfg.model_dump(), "points": rows},
            rows=rows,
            columns=["m", "survival", "closed_form", "final_population", "mean_register"],
            summary={f"m={row['m']}": row["survival"] for row in rows[:6]},
        )


class SWPParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=2)
    omega: float = Field(1.0, gt=0, allow_inf_nan=False)
    alphas: list[float] = Field(default_factory=lambda: [0.5])
    time_points: int = Field(16, ge=1)


class SWPTask(Task):
    name = "swp"
    description = "Angle-state clock with equally spaced levels and its shifted readout basis."
    kind = TaskKind.STRUCTURE

    @property
    def schema(self) -> type[SWPParams]:
        return SWPParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        cfg = SWPConfig(d=params.dim, omega=params.omega, alphas=params.alphas, time_points=params.time_points)
        report = swp_demo(cfg)
        worst = max(abs(1.0 - x) for x in report.overlaps)
        return TaskResult.success_result(
            report.to_dict(),
            rows=report.table,
            summary={
                "overlap_defect": worst,
                "gram_residual": max(report.gram_residuals.values(), default=0.0),
                "povm_residual": max(report.povm_residuals.values(), default=0.0),
            },
        )
