"""
Tick statistics subcommands: counting rates, waiting times and Allan variance.
"""

from __future__ import annotations

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from stats.allan import allan_variance_formula, allan_variance_trajectory
from stats.fcs import cross_validated_rates, fcs_rates
from stats.waiting import check_precision_identity, waiting_time
from tasks.base import Invocation, Task, TaskKind, TaskResult
from trajectories.jumps import sample_trajectory
from utils.errors import PreconditionError

logger = logging.getLogger(__name__)


class FcsParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: Literal["eig-derivative", "slope-fit", "cross"] = "eig-derivative"


class FcsTask(Task):
    """Asymptotic mean and variance rates of the tick count."""
    name = "fcs"
    description = "Compute the tick rate nu, variance rate Sigma and precision R1."
    kind = TaskKind.STATISTICS

    @property
    def schema(self) -> type[FcsParams]:
        return FcsParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        spec = invocation.elementary_spec()
        if params.method == "cross":
            rates = cross_validated_rates(spec)
        else:
            rates = fcs_rates(spec, params.method)
        payload = rates.to_dict()
        return TaskResult.success_result(payload, rows=[payload], summary=payload)


class WaitingTimeParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t_max: float | None = Field(None, gt=0)
    points: int = Field(2001, ge=2)
    identity: bool = False
    plot_data: bool = False


class WaitingTimeTask(Task):
    """The delay function omega(t) of an elementary clock."""
    name = "waiting-time"
    description = "Tabulate the waiting-time density with its mean, variance and R2."
    kind = TaskKind.STATISTICS

    @property
    def schema(self) -> type[WaitingTimeParams]:
        return WaitingTimeParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        spec = invocation.elementary_spec()
        grid = None if params.t_max is None else np.linspace(0.0, params.t_max, params.points)
        distribution = waiting_time(spec, grid=grid)
        payload = distribution.to_dict()
        if params.identity:
            payload["identity"] = check_precision_identity(spec).to_dict()
        rows = [
            {"t": float(t), "density": float(w), "survival": float(s)}
            for t, w, s in zip(distribution.grid, distribution.density, distribution.survival)
        ]
        if params.plot_data:
            long_rows = [
                {"t": row["t"], "series": series, "value": row[series]}
                for row in rows for series in ("density", "survival")
            ]
            return TaskResult.success_result(payload, rows=long_rows, columns=["t", "series", "value"])
        return TaskResult.success_result(
            payload, rows=rows, columns=["t", "density", "survival"], summary=distribution.to_dict()
        )


class AllanParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    taus: list[float] = Field(min_length=1)
    mode: Literal["formula", "trajectory"] = "formula"
    horizon: float | None = Field(None, gt=0)
    bins: int | None = Field(None, ge=1)


class AllanTask(Task):
    """Allan variance of the tick count, in closed form or from one sampled record."""
    name = "allan"
    description = "Allan variance Sigma/tau, or its estimate from a sampled trajectory."
    kind = TaskKind.STATISTICS

    @property
    def schema(self) -> type[AllanParams]:
        return AllanParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        spec = invocation.elementary_spec()
        if params.mode == "formula":
            rates = fcs_rates(spec)
            estimates = [allan_variance_formula(rates, tau) for tau in params.taus]
        else:
            longest = max(params.taus)
            if params.horizon is None and params.bins is None:
                raise PreconditionError("Trajectory mode needs --horizon or --bins")
            horizon = params.horizon or (params.bins + 1) * longest
            record = sample_trajectory(spec, horizon, invocation.run.seed)
            logger.info(f"Sampled {len(record)} ticks up to t={horizon:.6g}")
            estimates = []
            for tau in params.taus:
                bins = params.bins or max(1, math.floor(horizon / tau) - 1)
                estimates.append(allan_variance_trajectory(record, tau, bins))
        rows = [e.to_dict() for e in estimates]
        return TaskResult.success_result(
            {"mode": params.mode, "estimates": rows},
            rows=rows,
            columns=["tau", "value", "stderr", "bins"],
            summary={f"A({e.tau:g})": e.value for e in estimates},
        )
