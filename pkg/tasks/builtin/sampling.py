"""
Trajectory subcommands: single-clock records, two-clock tick sequences and
the relative count of one clock at the ticks of the other.
"""

from __future__ import annotations

import logging

from pydantic import BaseModel, ConfigDict, Field

from tasks.base import Invocation, Task, TaskKind, TaskResult
from trajectories.jumps import sample_trajectories
from trajectories.pairs import relative_counts, sample_pairs

logger = logging.getLogger(__name__)


class SampleParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    horizon: float = Field(gt=0, allow_inf_nan=False)
    n_traj: int = Field(1, ge=1)


class SampleTask(Task):
    name = "sample"
    description = "Sample tick records of one clock by quantum-jump unraveling."
    kind = TaskKind.SAMPLING

    @property
    def schema(self) -> type[SampleParams]:
        return SampleParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        run = invocation.run
        records = sample_trajectories(
            invocation.elementary_spec(), params.horizon, params.n_traj, run.seed, run.threads
        )
        rows = [record.to_dict() for record in records]
        ticks = sum(len(r) for r in records)
        logger.info(f"Sampled {len(records)} trajectories with {ticks} ticks")
        return TaskResult.success_result(
            {"records": rows},
            rows=rows,
            summary={"trajectories": len(records), "mean_ticks": ticks / len(records)},
        )


class PairParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    horizon: float = Field(gt=0, allow_inf_nan=False)
    n_seq: int = Field(1, ge=1)


class PairTask(Task):
    name = "pair"
    description = "Sample shared-register tick sequences of two independent clocks."
    kind = TaskKind.SAMPLING

    @property
    def schema(self) -> type[PairParams]:
        return PairParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        run = invocation.run
        sequences = sample_pairs(
            invocation.elementary_spec(0), invocation.elementary_spec(1),
            params.horizon, params.n_seq, run.seed, run.threads,
        )
        rows = [seq.to_list() for seq in sequences]
        return TaskResult.success_result(
            {"horizon": params.horizon, "sequences": rows},
            rows=rows,
            summary={"sequences": len(rows)},
        )


class RelativeCountsParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    horizon: float = Field(gt=0, allow_inf_nan=False)
    n_seq: int = Field(1000, ge=1)
    n: int = Field(1, ge=1)
    confidence: float = Field(0.95, gt=0, lt=1)


class RelativeCountsTask(Task):
    name = "relative-counts"
    description = "Distribution of B's tick count at the n-th tick of A, with Wilson intervals."
    kind = TaskKind.SAMPLING

    @property
    def schema(self) -> type[RelativeCountsParams]:
        return RelativeCountsParams

    def execute(self, invocation: Invocation) -> TaskResult:
        params = self.parse_params(invocation.params)
        run = invocation.run
        sequences = sample_pairs(
            invocation.elementary_spec(0), invocation.elementary_spec(1),
            params.horizon, params.n_seq, run.seed, run.threads,
        )
        distribution = relative_counts(sequences, params.n, params.confidence)
        rows = [
            {"m": m, "p": float(p), "lower": float(lo), "upper": float(hi)}
            for m, (p, lo, hi) in enumerate(zip(distribution.pmf, distribution.lower, distribution.upper))
        ]
        return TaskResult.success_result(
            distribution.to_dict(),
            rows=rows,
            columns=["m", "p", "lower", "upper"],
            summary={"n": params.n, "samples": distribution.samples},
        )
