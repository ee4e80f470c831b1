"""
Two clocks writing to one shared register.

Non-interacting clocks are sampled independently and their records merged in
time order, which is the path taken through the register tree. A direct
unraveling on the joint clockwork space is kept as a reference for tiny
dimensions.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from contextvars import copy_context
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from clock.model import ClockSpec
from clock.validate import require_elementary
from numerics.linalg import CMatrix
from numerics.rng import RandomStream, child_rng, seeded_rng
from trajectories.jumps import JumpChannel, Unraveler, clock_unraveler, sample_with
from trajectories.records import TickSequence
from utils.errors import DataError, UnsupportedError

logger = logging.getLogger(__name__)

MAX_JOINT_DIM = 64


def _check_coupling(spec_a: ClockSpec, spec_b: ClockSpec, coupling: CMatrix | None) -> None:
    if coupling is None:
        return
    coupling = np.asarray(coupling, dtype=np.complex128)
    joint = spec_a.dim * spec_b.dim
    if coupling.shape != (joint, joint):
        raise UnsupportedError(f"Coupling must be a {joint}x{joint} operator, got {coupling.shape}")
    if np.any(np.abs(coupling) > 0):
        raise UnsupportedError("Interacting clocks are not supported; the coupling must vanish")


def _pair_from(
    unraveler_a: Unraveler, unraveler_b: Unraveler, horizon: float, rng_a: RandomStream, rng_b: RandomStream
) -> TickSequence:
    record_a = sample_with(unraveler_a, horizon, rng_a, "A")
    record_b = sample_with(unraveler_b, horizon, rng_b, "B")
    return TickSequence.merge(record_a, record_b)


def sample_pair(
    spec_a: ClockSpec,
    spec_b: ClockSpec,
    horizon: float,
    seed: int,
    coupling: CMatrix | None = None,
) -> TickSequence:
    """
    Samples the shared-register tick sequence of two independent clocks.

    Clock A draws from `child_rng(seed, 0)` and clock B from `child_rng(seed, 1)`.

    Args:
        spec_a: First clock, written as "A".
        spec_b: Second clock, written as "B".
        horizon: End of the simulated window.
        seed: Master seed.
        coupling: Optional interaction Hamiltonian on the joint clockwork; any
            nonzero entry is rejected.

    Raises:
        UnsupportedError: If the clocks interact.
    """
    _check_coupling(spec_a, spec_b, coupling)
    return _pair_from(
        clock_unraveler(spec_a), clock_unraveler(spec_b), horizon, child_rng(seed, 0), child_rng(seed, 1)
    )


def sample_pairs(
    spec_a: ClockSpec, spec_b: ClockSpec, horizon: float, n_seq: int, seed: int, threads: int = 1
) -> list[TickSequence]:
    """
    Samples `n_seq` tick sequences; sequence i uses streams (seed, i, 0) and (seed, i, 1).
    """
    unraveler_a, unraveler_b = clock_unraveler(spec_a), clock_unraveler(spec_b)

    def one(index: int) -> TickSequence:
        return _pair_from(unraveler_a, unraveler_b, horizon, child_rng(seed, index, 0), child_rng(seed, index, 1))

    if threads <= 1:
        return [one(i) for i in range(n_seq)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(copy_context().run, one, i) for i in range(n_seq)]
        return [future.result() for future in futures]


def joint_unraveler(spec_a: ClockSpec, spec_b: ClockSpec) -> Unraveler:
    """Unraveler of both clocks on the joint clockwork space C_A (x) C_B."""
    require_elementary(spec_a, "Joint sampling")
    require_elementary(spec_b, "Joint sampling")
    if spec_a.dim * spec_b.dim > MAX_JOINT_DIM:
        raise UnsupportedError(f"Joint space of dimension {spec_a.dim * spec_b.dim} is too large")
    eye_a, eye_b = np.eye(spec_a.dim), np.eye(spec_b.dim)
    hamiltonian = np.kron(spec_a.hamiltonian, eye_b) + np.kron(eye_a, spec_b.hamiltonian)
    channels = [
        JumpChannel(j.rate, np.kron(j.op, eye_b), "A" if j.delta == 1 else None)
        for j in spec_a.jumps if j.rate > 0
    ] + [
        JumpChannel(j.rate, np.kron(eye_a, j.op), "B" if j.delta == 1 else None)
        for j in spec_b.jumps if j.rate > 0
    ]
    initial = np.kron(spec_a.initial_clockwork, spec_b.initial_clockwork)
    scale = 1.0 / max(spec_a.max_rate(), spec_b.max_rate(), 1e-300)
    return Unraveler(hamiltonian, channels, initial, scale)


def sample_joint(spec_a: ClockSpec, spec_b: ClockSpec, horizon: float, seed: int) -> TickSequence:
    """Samples a tick sequence by unraveling the joint Lindbladian directly."""
    ticks = joint_unraveler(spec_a, spec_b).run(seeded_rng(seed), horizon)
    return TickSequence(tuple((label, t) for label, t in ticks), horizon)


@dataclass(frozen=True, eq=False)
class RelativeCountDistribution:
    """
    Empirical law of N_B at the n-th tick of A.

    Attributes:
        n: Tick index of clock A.
        pmf: pmf[m] = P(B has ticked m times when A ticks the n-th time).
        lower: Lower 95% Wilson bound per bin.
        upper: Upper 95% Wilson bound per bin.
        samples: Number of sequences used.
    """
    n: int
    pmf: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    samples: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "samples": self.samples,
            "pmf": self.pmf.tolist(),
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }


def relative_counts(seqs: list[TickSequence], n: int, confidence: float = 0.95) -> RelativeCountDistribution:
    """
    Tabulates how many B ticks precede the n-th A tick.

    Args:
        seqs: Tick sequences, each with at least n ticks of A.
        n: Tick index of A, n >= 1.
        confidence: Confidence level of the Wilson intervals.

    Raises:
        DataError: If any sequence has fewer than n A ticks; the message lists them.
    """
    if n < 1:
        raise ValueError(f"Tick index must be at least 1, got {n}")
    if not seqs:
        raise DataError("No tick sequences given")
    counts = [seq.count_before_nth(n) for seq in seqs]
    deficient = [index for index, c in enumerate(counts) if c is None]
    if deficient:
        shown = ", ".join(str(i) for i in deficient[:20])
        more = f" and {len(deficient) - 20} more" if len(deficient) > 20 else ""
        raise DataError(
            f"{len(deficient)} sequence(s) have fewer than {n} ticks of A: {shown}{more}",
            [str(i) for i in deficient],
        )
    histogram = np.bincount(np.asarray(counts, dtype=np.int64))
    total = len(seqs)
    lower, upper = [], []
    for k in histogram:
        interval = binomtest(int(k), total).proportion_ci(confidence_level=confidence, method="wilson")
        lower.append(interval.low)
        upper.append(interval.high)
    logger.debug(f"Relative counts over {total} sequences, n={n}")
    return RelativeCountDistribution(n, histogram / total, np.array(lower), np.array(upper), total)
