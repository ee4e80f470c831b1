"""
Measurement disturbance and the Zeno effect.

Reading the register projectively removes coherence between register
blocks. Dynamics that build such coherence (a unitary rotating |0> into |1>)
are slowed down and in the limit frozen. Clocks whose states stay
block-diagonal do not notice the readings at all.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from clock.model import ClockSpec
from evolution.generator import register_lindbladian, register_projectors
from numerics.linalg import CMatrix, dagger, is_hermitian, long_time_exponential, matrix_exponential
from numerics.rng import RandomStream, seeded_rng
from numerics.superop import unvec, vec
from utils.errors import DimensionError, UnsupportedError

logger = logging.getLogger(__name__)

MAX_ZENO_DIM = 16

Schedule = Literal["fixed", "jittered"]


class ZenoConfig(BaseModel):
    """
    Parameters of the qubit Zeno experiment.

    Attributes:
        rabi_frequency: Omega in H = (Omega / 2) sigma_x.
        total_time: Final readout time T.
        measurement_counts: Numbers m of register readings to compare.
        schedule: "fixed" for readings at j T / m, "jittered" to perturb them.
        jitter_width: Width of the uniform jitter on each reading time.
        seed: Seed of the jitter draws.
    """
    model_config = ConfigDict(extra="forbid")

    rabi_frequency: float = Field(gt=0, allow_inf_nan=False)
    total_time: float = Field(gt=0, allow_inf_nan=False)
    measurement_counts: list[int] = Field(default_factory=lambda: [0, 1, 2, 4, 8, 16, 32, 64])
    schedule: Schedule = "fixed"
    jitter_width: float = Field(0.0, ge=0, allow_inf_nan=False)
    seed: int = 0

    @field_validator("measurement_counts")
    @classmethod
    def _non_negative(cls, counts: list[int]) -> list[int]:
        if any(m < 0 for m in counts):
            raise ValueError("measurement counts must be non-negative")
        return counts

    @classmethod
    def parse_schedule(cls, text: str) -> tuple[Schedule, float]:
        """Parses "fixed" or "jitter:<width>"."""
        if text == "fixed":
            return "fixed", 0.0
        if text.startswith("jitter:"):
            width = float(text.split(":", 1)[1])
            if width < 0:
                raise ValueError(f"Jitter width must be non-negative, got {width}")
            return "jittered", width
        raise ValueError(f"Unknown schedule '{text}'; use 'fixed' or 'jitter:<width>'")


def reading_times(
    total_time: float, m: int, schedule: Schedule = "fixed", width: float = 0.0, rng: RandomStream | None = None
) -> np.ndarray:
    """
    Times of the m register readings in [0, T].

    The fixed schedule reads at j T / m for j = 1..m. The jittered schedule
    moves each reading by a uniform offset in [-width/2, width/2], clips it
    to [0, T] and sorts the result.
    """
    times = total_time * np.arange(1, m + 1) / max(m, 1)
    if schedule == "jittered" and m:
        rng = rng or seeded_rng(0)
        times = np.sort(np.clip(times + rng.uniform(-0.5 * width, 0.5 * width, size=m), 0.0, total_time))
    return times


@dataclass(frozen=True)
class ZenoPoint:
    """
    Outcome of one measurement count.

    Attributes:
        m: Number of readings.
        survival: Probability that every reading and the final readout found n = 0.
        final_population: Unconditional probability of n = 0 at T.
        mean_register: Unconditional <n> at T.
        closed_form: cos^(2m)(Omega T / 2m) for the fixed qubit schedule, else None.
    """
    m: int
    survival: float
    final_population: float
    mean_register: float
    closed_form: float | None = None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "survival": self.survival,
            "final_population": self.final_population,
            "mean_register": self.mean_register,
            "closed_form": self.closed_form,
        }


def _dephase(rho: CMatrix, projectors: list[CMatrix]) -> CMatrix:
    return sum(p @ rho @ p for p in projectors)


def zeno_general(
    hamiltonian: CMatrix,
    projectors: list[CMatrix],
    rho0: CMatrix,
    total_time: float,
    measurement_counts: list[int],
    schedule: Schedule = "fixed",
    width: float = 0.0,
    seed: int = 0,
) -> list[ZenoPoint]:
    """
    Runs the Zeno experiment for an arbitrary Hamiltonian.

    Between readings the state evolves unitarily under `hamiltonian`; each
    reading applies the register projectors. Projectors acting on a system
    factor of a product space are passed as P (x) 1_E.

    Args:
        hamiltonian: Hermitian H on a space of dimension at most 16.
        projectors: Register projectors, summing to the identity.
        rho0: Initial state.
        total_time: Readout time T.
        measurement_counts: Values of m.
        schedule: "fixed" or "jittered".
        width: Jitter width for the jittered schedule.
        seed: Seed of the jitter draws; each m uses its own stream.

    Raises:
        UnsupportedError: If the dimension exceeds 16.
        DimensionError: If shapes disagree or the projectors do not resolve the identity.
    """
    h = np.asarray(hamiltonian, dtype=np.complex128)
    dim = h.shape[0]
    if dim > MAX_ZENO_DIM:
        raise UnsupportedError(f"Zeno experiments are limited to dimension {MAX_ZENO_DIM}, got {dim}")
    if not is_hermitian(h):
        raise DimensionError("Hamiltonian must be Hermitian")
    projectors = [np.asarray(p, dtype=np.complex128) for p in projectors]
    if any(p.shape != (dim, dim) for p in projectors) or np.asarray(rho0).shape != (dim, dim):
        raise DimensionError(f"Projectors and initial state must be {dim}x{dim}")
    if np.max(np.abs(sum(projectors) - np.eye(dim))) > 1e-12:
        raise DimensionError("Register projectors do not sum to the identity")

    generator = -1j * h
    first = projectors[0]
    results = []
    for index, m in enumerate(measurement_counts):
        times = reading_times(total_time, m, schedule, width, seeded_rng(seed + index))
        conditional = np.asarray(rho0, dtype=np.complex128)
        unconditional = conditional
        clock = 0.0
        for t in list(times) + [total_time]:
            u = matrix_exponential(generator, t - clock)
            conditional = u @ conditional @ dagger(u)
            unconditional = u @ unconditional @ dagger(u)
            conditional = first @ conditional @ first
            unconditional = _dephase(unconditional, projectors)
            clock = t
        populations = [float(np.trace(p @ unconditional).real) for p in projectors]
        results.append(
            ZenoPoint(
                m=m,
                survival=float(np.trace(conditional).real),
                final_population=populations[0],
                mean_register=float(np.dot(np.arange(len(populations)), populations)),
            )
        )
    logger.debug(f"Zeno run over m={list(measurement_counts)} with {schedule} schedule")
    return results


def zeno_experiment(cfg: ZenoConfig) -> list[ZenoPoint]:
    """
    The qubit Zeno experiment: register values n = 0, 1, each a one-dimensional
    clockwork, driven by H = (Omega / 2) sigma_x from |0>.
    """
    sigma_x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    hamiltonian = 0.5 * cfg.rabi_frequency * sigma_x
    projectors = [np.diag([1.0, 0.0]).astype(np.complex128), np.diag([0.0, 1.0]).astype(np.complex128)]
    rho0 = projectors[0].copy()
    points = zeno_general(
        hamiltonian, projectors, rho0, cfg.total_time, cfg.measurement_counts,
        cfg.schedule, cfg.jitter_width, cfg.seed,
    )
    if cfg.schedule != "fixed":
        return points
    angle = cfg.rabi_frequency * cfg.total_time
    return [
        ZenoPoint(
            p.m, p.survival, p.final_population, p.mean_register,
            float(np.cos(angle / (2 * max(p.m, 1))) ** (2 * max(p.m, 1))),
        )
        for p in points
    ]


def measurement_disturbance(
    spec: ClockSpec,
    n_max: int,
    times: np.ndarray,
    readings: np.ndarray,
) -> float:
    """
    How much register readings change p_{n|t} of a Lindblad clock.

    The clock evolves on clockwork (x) register under `register_lindbladian`,
    once undisturbed and once dephased in the register basis at each reading
    time. The result is the largest difference of any p_{n|t} on `times`.

    Args:
        spec: The clock, started at register value 0.
        n_max: Top register bin.
        times: Observation times, non-negative.
        readings: Reading times, non-negative.
    """
    generator = register_lindbladian(spec, n_max).matrix
    size = spec.dim * (n_max + 1)
    projectors = register_projectors(spec.dim, n_max)
    start = np.zeros((n_max + 1, n_max + 1), dtype=np.complex128)
    start[0, 0] = 1.0
    rho0 = np.kron(spec.initial_clockwork, start)

    times = np.sort(np.asarray(times, dtype=float))
    readings = np.sort(np.asarray(readings, dtype=float))
    events = sorted({*times.tolist(), *readings.tolist()})
    observed = set(times.tolist())
    read = set(readings.tolist())

    plain, measured = vec(rho0), vec(rho0)
    clock = 0.0
    residual = 0.0
    for t in events:
        step = long_time_exponential(generator, t - clock)
        plain, measured = step @ plain, step @ measured
        clock = t
        if t in read:
            measured = vec(_dephase(unvec(measured, size), projectors))
        if t in observed:
            a, b = unvec(plain, size), unvec(measured, size)
            diff = max(abs(float(np.trace(p @ (a - b)).real)) for p in projectors)
            residual = max(residual, diff)
    logger.debug(f"Measurement disturbance over {len(readings)} readings: {residual:.3e}")
    return residual
