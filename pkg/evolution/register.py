"""
Evolution of clock states on the clockwork (x) truncated register.

A `ClockState` stores the sub-normalized clockwork matrices p_{n|t} rho_{n|t}
for each register value n. Coherences between register values are never
represented, so block-diagonality in n holds by construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from clock.model import ClockSpec, GeneralClockSpec
from clock.validate import validate_elementary
from config import get_tolerances
from evolution.generator import TruncatedRegister, general_lindbladian, routed_generator
from numerics.linalg import CMatrix, long_time_exponential, matrix_exponential
from numerics.superop import unvec, vec
from utils.errors import IntegrationError, PreconditionError, TruncationError

logger = logging.getLogger(__name__)

MAX_HALVINGS = 40
# Upper bound on ||G||_1 * h for a single exponential step.
STEP_NORM_CAP = 1e3
TRUNCATION_MASS = 1e-8
# Step-doubling differences below this (relative to ||v||_1) are rounding noise.
ROUNDING_FLOOR = 1e-13


@dataclass(frozen=True, eq=False)
class ClockState:
    """
    A clock state at time `time`.

    Attributes:
        components: Array of shape (n_max + 1, d, d); entry n is p_{n|t} rho_{n|t}.
        time: The time t.
    """
    components: np.ndarray
    time: float = 0.0

    @classmethod
    def from_reset(cls, rho: CMatrix, n_max: int, n0: int = 0, time: float = 0.0) -> ClockState:
        """Places the clockwork state `rho` in register bin `n0`."""
        rho = np.asarray(rho, dtype=np.complex128)
        if not 0 <= n0 <= n_max:
            raise ValueError(f"Register value {n0} outside 0..{n_max}")
        components = np.zeros((n_max + 1, *rho.shape), dtype=np.complex128)
        components[n0] = rho
        return cls(components, float(time))

    @classmethod
    def from_spec(cls, spec: ClockSpec, n_max: int) -> ClockState:
        return cls.from_reset(spec.initial_clockwork, n_max)

    @classmethod
    def from_vector(cls, v: np.ndarray, dim: int, time: float) -> ClockState:
        block = dim * dim
        size = v.size // block
        components = np.stack([unvec(v[n * block:(n + 1) * block], dim) for n in range(size)])
        return cls(components, float(time))

    @property
    def n_max(self) -> int:
        return self.components.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.components.shape[1]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([vec(c) for c in self.components])

    def probabilities(self) -> np.ndarray:
        """p_{n|t} for n = 0..n_max."""
        return np.real(np.einsum("nii->n", self.components))

    def total_trace(self) -> float:
        return float(self.probabilities().sum())

    def clockwork_state(self) -> CMatrix:
        """The register-averaged clockwork state sum_n p_{n|t} rho_{n|t}."""
        return self.components.sum(axis=0)

    def resized(self, n_max: int) -> ClockState:
        """Pads with empty bins, or lumps everything above `n_max` into the new top bin."""
        if n_max >= self.n_max:
            extra = np.zeros((n_max - self.n_max, self.dim, self.dim), dtype=np.complex128)
            return replace(self, components=np.concatenate([self.components, extra]))
        lumped = self.components[: n_max + 1].copy()
        lumped[n_max] = self.components[n_max:].sum(axis=0)
        return replace(self, components=lumped)

    def to_full_density(self) -> CMatrix:
        """The block-diagonal density operator sum_n rho_n (x) |n><n| in kron ordering."""
        size = self.n_max + 1
        full = np.zeros((self.dim * size, self.dim * size), dtype=np.complex128)
        for n, component in enumerate(self.components):
            p = np.zeros((size, size))
            p[n, n] = 1.0
            full += np.kron(component, p)
        return full


@dataclass(frozen=True)
class TickNumberDistribution:
    """The tick-number distribution p_{n|t} at one time."""
    time: float
    probabilities: np.ndarray

    @property
    def mean(self) -> float:
        n = np.arange(self.probabilities.size)
        return float(n @ self.probabilities)

    @property
    def variance(self) -> float:
        n = np.arange(self.probabilities.size)
        return float(n**2 @ self.probabilities - self.mean**2)

    @property
    def top_mass(self) -> float:
        return float(self.probabilities[-1])


class RegisterPropagator:
    """
    Propagates stacked clock-state vectors under the routed generator.

    Exponentials are cached by step size, so repeated evolution on a uniform
    time grid costs two exponentials in total.
    """

    def __init__(self, spec: ClockSpec, n_max: int) -> None:
        self.spec = spec
        self.register = TruncatedRegister(n_max)
        self.generator = routed_generator(spec, self.register)
        self.norm = float(np.linalg.norm(self.generator, 1))
        self._cache: dict[float, np.ndarray] = {}

    def propagator(self, h: float) -> np.ndarray:
        # Grid spacings that differ only by rounding share one exponential.
        h = float(f"{h:.12g}")
        cached = self._cache.get(h)
        if cached is None:
            cached = matrix_exponential(self.generator, h)
            if len(self._cache) > 64:
                self._cache.clear()
            self._cache[h] = cached
        else:
            logger.debug(f"Propagator cache hit for h={h:.6g}")
        return cached

    def max_step(self) -> float:
        return math.inf if self.norm == 0 else STEP_NORM_CAP / self.norm

    def advance(self, v: np.ndarray, dt: float) -> np.ndarray:
        """
        Advances `v` by `dt` with adaptive step doubling.

        Raises:
            IntegrationError: When a step cannot meet the tolerance after
                `MAX_HALVINGS` halvings.
        """
        if dt < 0:
            raise ValueError(f"dt must be non-negative, got {dt}")
        tol = get_tolerances().integrator
        remaining = float(dt)
        h = min(remaining, self.max_step())
        halvings = 0
        while remaining > 0:
            h = min(h, remaining)
            full = self.propagator(h) @ v
            half = self.propagator(0.5 * h)
            refined = half @ (half @ v)
            error = float(np.abs(full - refined).sum())
            if error > tol * h + ROUNDING_FLOOR * float(np.abs(v).sum()):
                halvings += 1
                if halvings > MAX_HALVINGS:
                    raise IntegrationError(
                        f"Step size fell below {h:.3e} without meeting tolerance {tol:.1e}"
                    )
                h *= 0.5
                continue
            v = refined
            remaining -= h
            logger.debug(f"Accepted step h={h:.6g}, error={error:.3e}")
            if error < 0.25 * tol * h:
                h = min(2 * h, self.max_step())
        return v


@lru_cache(maxsize=16)
def _propagator(spec: ClockSpec, n_max: int) -> RegisterPropagator:
    return RegisterPropagator(spec, n_max)


def evolve(spec: ClockSpec, state: ClockState, dt: float) -> ClockState:
    """
    Evolves a clock state by `dt`.

    Args:
        spec: The clock.
        state: The state at time t; its n_max fixes the register window.
        dt: Non-negative time step.

    Returns:
        The state at t + dt.

    Raises:
        IntegrationError: If the integrator cannot meet its tolerance.
    """
    if dt == 0:
        return state
    propagator = _propagator(spec, state.n_max)
    v = propagator.advance(state.to_vector(), dt)
    result = ClockState.from_vector(v, spec.dim, state.time + dt)
    drift = abs(result.total_trace() - state.total_trace())
    if drift > get_tolerances().integrator * max(dt, 1.0):
        logger.warning(f"Trace drifted by {drift:.3e} over dt={dt:.6g}")
    return result


def evolve_to_times(spec: ClockSpec, state0: ClockState, times: np.ndarray) -> list[ClockState]:
    """Evolves `state0` through sorted `times`, all at or after `state0.time`."""
    times = np.asarray(times, dtype=np.float64)
    if times.size and (np.any(np.diff(times) < 0) or times[0] < state0.time):
        raise ValueError("times must be sorted and start at or after the initial state time")
    states = []
    current = state0
    for t in times:
        current = evolve(spec, current, float(t) - current.time)
        states.append(current)
    return states


def tick_number_distribution(state: ClockState) -> TickNumberDistribution:
    return TickNumberDistribution(state.time, state.probabilities())


def suggested_n_max(distribution: TickNumberDistribution, n_max: int) -> int:
    spread = math.sqrt(max(distribution.variance, 0.0) + 1.0)
    return max(2 * n_max, int(math.ceil(distribution.mean + 12 * spread + 20)))


@dataclass(frozen=True)
class TickMoments:
    time: float
    mean: float
    variance: float


def tick_number_moments(spec: ClockSpec, state0: ClockState, times: list[float]) -> list[TickMoments]:
    """
    Mean and variance of the tick count at each requested time.

    Args:
        spec: The clock.
        state0: Initial state; its n_max fixes the register window.
        times: Evaluation times at or after `state0.time`, in any order.

    Returns:
        One `TickMoments` per time, in the order given.

    Raises:
        TruncationError: If the top register bin holds 1e-8 or more probability
            at the final time. The error suggests a larger n_max.
    """
    order = np.argsort(times, kind="stable")
    states = evolve_to_times(spec, state0, np.asarray(times, dtype=np.float64)[order])
    final = tick_number_distribution(states[-1]) if states else None
    if final is not None and final.top_mass >= TRUNCATION_MASS:
        suggestion = suggested_n_max(final, state0.n_max)
        raise TruncationError(
            f"Top register bin n_max={state0.n_max} holds {final.top_mass:.3e} "
            f"at t={final.time:.6g}; increase n_max to about {suggestion}",
            suggestion,
        )
    results: list[TickMoments | None] = [None] * len(states)
    for index, state in zip(order, states):
        dist = tick_number_distribution(state)
        results[index] = TickMoments(state.time, dist.mean, dist.variance)
    return results  # type: ignore[return-value]


def time_of_arrival_density(
    spec: ClockSpec, state0: ClockState, n: int, grid: np.ndarray
) -> np.ndarray:
    """
    Density of the arrival time T_n of the n-th tick on a time grid.

    The density -d/dt sum_{m<n} p_{m|t} is evaluated as the analytic
    derivative -sum_{m<n} Tr[(G v_t)_m], with G the routed generator.

    Args:
        spec: An irreversible clock.
        state0: Initial state.
        n: Tick index, n >= 1.
        grid: Sorted evaluation times at or after `state0.time`.

    Returns:
        Density values on the grid.

    Raises:
        PreconditionError: If the clock has reversible (Delta < 0) ticks.
    """
    flags = validate_elementary(spec)
    if not flags.irreversible_ticks:
        raise PreconditionError("Time-of-arrival densities require irreversible ticks")
    if n < 1:
        raise ValueError(f"Tick index must be at least 1, got {n}")
    state0 = state0.resized(max(state0.n_max, n))
    propagator = _propagator(spec, state0.n_max)
    d2 = spec.dim * spec.dim
    trace_row = np.zeros(propagator.generator.shape[0], dtype=np.complex128)
    identity = vec(np.eye(spec.dim))
    for m in range(n):
        trace_row[m * d2:(m + 1) * d2] = identity
    weights = -(trace_row @ propagator.generator)
    states = evolve_to_times(spec, state0, np.asarray(grid, dtype=np.float64))
    return np.array([float(np.real(weights @ s.to_vector())) for s in states])


def evolve_general(spec: GeneralClockSpec, times: np.ndarray, rho0: CMatrix | None = None) -> list[CMatrix]:
    """
    Evolves a block clock's full density operator to each of `times`.

    Args:
        spec: The block clock.
        times: Sorted non-negative times.
        rho0: Initial state; defaults to the spec's initial state.

    Returns:
        The density operators at each time.
    """
    generator = general_lindbladian(spec)
    rho = spec.initial_state() if rho0 is None else np.asarray(rho0, dtype=np.complex128)
    v = vec(rho)
    results = []
    previous = 0.0
    for t in np.asarray(times, dtype=np.float64):
        v = long_time_exponential(generator.matrix, float(t) - previous) @ v
        previous = float(t)
        results.append(unvec(v, spec.total_dim))
    return results
