from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from clock.model import ClockSpec
from evolution.register import (
    TRUNCATION_MASS,
    ClockState,
    evolve_general,
    evolve_to_times,
    suggested_n_max,
    tick_number_distribution,
)
from tasks.base import Invocation, Task, TaskKind, TaskResult
from utils.errors import TruncationError

logger = logging.getLogger(__name__)


class EvolveParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    times: list[float] = Field(min_length=1)
    n_max: int = Field(64, ge=0)
    plot_data: bool = False

    @field_validator("times")
    @classmethod
    def _sorted_non_negative(cls, times: list[float]) -> list[float]:
        if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("times must be non-negative and sorted")
        return times


class EvolveTask(Task):
    """Tabulates the tick-number distribution p_{n|t} on a time grid."""
    name = "evolve"
    description = "Evolve a clock and print p_{n|t} with its mean and variance."
    kind = TaskKind.EVOLUTION

    @property
    def schema(self) -> type[EvolveParams]:
        return EvolveParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        spec = invocation.spec()
        if isinstance(spec, ClockSpec):
            state0 = ClockState.from_spec(spec, params.n_max)
            distributions = [tick_number_distribution(s) for s in evolve_to_times(spec, state0, np.array(params.times))]
            final = distributions[-1]
            if final.top_mass >= TRUNCATION_MASS:
                suggestion = suggested_n_max(final, params.n_max)
                raise TruncationError(
                    f"Top register bin n_max={params.n_max} holds {final.top_mass:.3e} at t={final.time:.6g}; "
                    f"rerun with --n-max {suggestion}",
                    suggestion,
                )
            table = [(d.time, d.probabilities) for d in distributions]
        else:
            projectors = spec.projectors()
            states = evolve_general(spec, np.array(params.times))
            table = [
                (t, np.array([np.trace(p @ rho).real for p in projectors]))
                for t, rho in zip(params.times, states)
            ]

        size = table[0][1].size
        columns = ["t", *(f"p_{n}" for n in range(size)), "mean", "var"]
        rows, long_rows, payload = [], [], []
        for t, probabilities in table:
            n = np.arange(size)
            mean = float(n @ probabilities)
            var = float(n**2 @ probabilities - mean * mean)
            row = {"t": float(t), "mean": mean, "var": var}
            row.update({f"p_{k}": float(p) for k, p in enumerate(probabilities)})
            rows.append(row)
            long_rows.extend({"t": float(t), "n": k, "p": float(p)} for k, p in enumerate(probabilities))
            payload.append({"t": float(t), "probabilities": probabilities.tolist(), "mean": mean, "var": var})
        logger.info(f"Evolved over {len(table)} times with {size} register bins")
        if params.plot_data:
            return TaskResult.success_result({"points": long_rows}, rows=long_rows, columns=["t", "n", "p"])
        return TaskResult.success_result(
            {"times": payload},
            rows=rows,
            columns=columns,
            summary={"t_final": rows[-1]["t"], "mean": rows[-1]["mean"], "var": rows[-1]["var"]},
        )
