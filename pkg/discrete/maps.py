"""
The maps picture of a ticking clock.

Time is cut into steps of length delta and after each step a bit records
whether the clock ticked. One step is a two-outcome instrument (m0, m1):
m0 evolves the clockwork when no tick happened and m1 when at least one tick
happened. Several ticks within one step are lumped into m1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from clock.model import ClockSpec
from clock.validate import require_elementary
from evolution.generator import TruncatedRegister, generator_parts, routed_generator, tick_generator
from numerics.linalg import CMatrix, matrix_exponential
from numerics.superop import SuperOperator, vec
from stats.waiting import delay_function_on
from utils.errors import HorizonError, StabilityError

logger = logging.getLogger(__name__)

StepOrder = Literal["first", "exact"]

STABILITY_LIMIT = 0.5
COVERAGE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DiscreteStep:
    """
    A tick/no-tick instrument for one step.

    Attributes:
        delta: Step length.
        m0: No-tick map.
        m1: Tick map (one or more ticks).
        order: "first" for the linear expansion, "exact" for the true instrument.
    """
    delta: float
    m0: SuperOperator
    m1: SuperOperator
    order: StepOrder = "exact"

    @property
    def dim(self) -> int:
        return self.m0.dim

    def outcome(self, bit: int) -> SuperOperator:
        return self.m1 if bit else self.m0


@dataclass(frozen=True)
class BitString:
    """
    A record R_1 R_2 ... R_k of tick bits.

    Attributes:
        bits: One entry per step, 1 if the clock ticked during that step.
        delta: Step length.
    """
    bits: tuple[int, ...]
    delta: float

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"Bits must be 0 or 1, got {self.bits}")

    def first_tick(self) -> int | None:
        """1-based slot of the first tick, None if no tick was recorded."""
        for index, bit in enumerate(self.bits, start=1):
            if bit:
                return index
        return None

    def probability(self, step: DiscreteStep, rho: CMatrix) -> float:
        """Tr[M_{R_k} ... M_{R_1}[rho]]."""
        if step.delta != self.delta:
            raise ValueError(f"Bit string step {self.delta} does not match instrument step {step.delta}")
        v = vec(rho)
        for bit in self.bits:
            v = step.outcome(bit).matrix @ v
        return float(np.real(vec(np.eye(step.dim)) @ v))


def build_step(spec: ClockSpec, delta: float, order: StepOrder = "exact") -> DiscreteStep:
    """
    Builds the instrument of one step of length `delta`.

    Args:
        spec: An elementary clock.
        delta: Step length, positive.
        order: "first" returns (1 + delta L_0, delta L_+); "exact" splits
            exp(G delta) on the clockwork and a two-bin register window into
            its no-tick and tick blocks.

    Raises:
        StabilityError: If delta * max_rate >= 0.5 for the first-order step.
    """
    require_elementary(spec, "Discrete maps")
    if not np.isfinite(delta) or delta <= 0:
        raise ValueError(f"Step length must be positive, got {delta}")
    d = spec.dim
    if order == "first":
        product = delta * spec.max_rate()
        if product >= STABILITY_LIMIT:
            raise StabilityError(
                f"delta * max_rate = {product:.3g} is not below {STABILITY_LIMIT}; reduce delta"
            )
        no_tick = generator_parts(spec)[0]
        m0 = SuperOperator.identity(d) + no_tick * delta
        m1 = tick_generator(spec) * delta
        return DiscreteStep(float(delta), m0, m1, "first")
    if order == "exact":
        window = routed_generator(spec, TruncatedRegister(1))
        propagator = matrix_exponential(window, delta)
        block = d * d
        m0 = SuperOperator(d, propagator[:block, :block])
        m1 = SuperOperator(d, propagator[block:, :block])
        return DiscreteStep(float(delta), m0, m1, "exact")
    raise ValueError(f"Unknown step order: {order}")


@dataclass(frozen=True, eq=False)
class FirstTickDistribution:
    """
    Law of the first tick slot.

    Attributes:
        delta: Step length.
        pmf: pmf[j - 1] = P(first 1 at slot j) for j = 1..k.
        remainder: Probability of no tick within k steps.
    """
    delta: float
    pmf: np.ndarray
    remainder: float

    @property
    def total(self) -> float:
        return float(self.pmf.sum() + self.remainder)


def bitstring_distribution(
    step: DiscreteStep, reset_state: CMatrix, k: int, coverage_tol: float | None = COVERAGE_TOL
) -> FirstTickDistribution:
    """
    First-tick pmf P(j) = Tr[m1 m0^(j-1) [rho_reset]] for j = 1..k.

    Args:
        step: The instrument.
        reset_state: Clockwork state at the start.
        k: Number of steps.
        coverage_tol: Maximum probability allowed beyond k steps; None skips the check.

    Raises:
        HorizonError: If more than `coverage_tol` of the mass lies beyond k steps.
    """
    if k < 1:
        raise ValueError(f"Need at least one step, got {k}")
    identity = vec(np.eye(step.dim))
    tick_row = identity @ step.m1.matrix
    v = vec(reset_state)
    pmf = np.empty(k)
    for j in range(k):
        pmf[j] = float(np.real(tick_row @ v))
        v = step.m0.matrix @ v
    remainder = float(np.real(identity @ v))
    if coverage_tol is not None and remainder > coverage_tol:
        raise HorizonError(
            f"{k} steps of {step.delta:.6g} leave {remainder:.3e} of the first-tick mass uncovered"
        )
    logger.debug(f"First-tick pmf over {k} steps, remainder {remainder:.3e}")
    return FirstTickDistribution(step.delta, pmf, remainder)


def binned_waiting_time(spec: ClockSpec, reset_state: CMatrix, delta: float, k: int) -> np.ndarray:
    """Probability that the continuous waiting time lands in ((j-1) delta, j delta], j = 1..k."""
    grid = delta * np.arange(k + 1)
    _, survival = delay_function_on(spec, reset_state, grid)
    return survival[:-1] - survival[1:]


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """Half the l1 distance, padding the shorter pmf with zeros."""
    size = max(len(p), len(q))
    a = np.zeros(size)
    b = np.zeros(size)
    a[: len(p)] = p
    b[: len(q)] = q
    return 0.5 * float(np.abs(a - b).sum())


def convergence_table(
    spec: ClockSpec, reset_state: CMatrix, deltas: list[float], horizon: float, order: StepOrder = "first"
) -> list[dict[str, float]]:
    """TV distance between the discrete first-tick pmf and the binned waiting time per step length."""
    rows = []
    for delta in deltas:
        k = int(np.ceil(horizon / delta))
        discrete = bitstring_distribution(build_step(spec, delta, order), reset_state, k)
        continuous = binned_waiting_time(spec, reset_state, delta, k)
        rows.append({"delta": float(delta), "steps": k, "tv": total_variation(discrete.pmf, continuous)})
    return rows
