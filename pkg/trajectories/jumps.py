"""
Quantum-jump unraveling of clock master equations.

Between jumps the unnormalized pure state follows exp(-i H_eff t) with
H_eff = H - (i/2) sum_j rate_j L_j^dagger L_j, and its squared norm is the
probability that no jump has happened yet. The next jump time is drawn by
inverse transform on that survival function and the channel is chosen with
weight rate_j ||L_j psi||^2.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from contextvars import copy_context
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.optimize import brentq

from clock.model import ClockSpec
from clock.validate import require_elementary
from numerics.linalg import CMatrix
from numerics.rng import RandomStream, child_rng, seeded_rng
from trajectories.records import TickRecord

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-10
# Eigenvector matrices worse conditioned than this fall back to expm.
MAX_EIGEN_CONDITION = 1e8


@dataclass(frozen=True, eq=False)
class JumpChannel:
    """
    One jump channel of an unraveling.

    Attributes:
        rate: Channel rate.
        op: Jump operator on the unraveled space.
        tick_label: Label written on a tick, None for internal jumps.
    """
    rate: float
    op: CMatrix
    tick_label: str | None = None


class NoJumpEvolution:
    """Propagates pure states under exp(-i H_eff t)."""

    def __init__(self, effective_hamiltonian: CMatrix) -> None:
        self.h_eff = np.asarray(effective_hamiltonian, dtype=np.complex128)
        eigenvalues, vectors = la.eig(self.h_eff)
        condition = np.linalg.cond(vectors)
        if np.isfinite(condition) and condition < MAX_EIGEN_CONDITION:
            self._eigenvalues = eigenvalues
            self._vectors = vectors
            self._inverse = la.inv(vectors)
        else:
            logger.debug(f"Effective Hamiltonian eigenbasis has condition {condition:.3e}; using expm")
            self._eigenvalues = None

    def propagate(self, psi: np.ndarray, t: float) -> np.ndarray:
        if self._eigenvalues is None:
            return la.expm(-1j * t * self.h_eff) @ psi
        coefficients = self._inverse @ psi
        return self._vectors @ (np.exp(-1j * self._eigenvalues * t) * coefficients)

    def survival(self, psi: np.ndarray, t: float) -> float:
        phi = self.propagate(psi, t)
        return float(np.real(np.vdot(phi, phi)))


class Unraveler:
    """
    Samples jump records of a Lindbladian given as H plus jump channels.

    Args:
        hamiltonian: Hermitian H.
        channels: The jump channels.
        initial: Initial density operator; a pure state is drawn from its
            eigen-decomposition at the start of every run.
        time_scale: Characteristic time used to start the root bracket.
    """

    def __init__(
        self,
        hamiltonian: CMatrix,
        channels: list[JumpChannel],
        initial: CMatrix,
        time_scale: float = 1.0,
    ) -> None:
        self.channels = channels
        h_eff = np.asarray(hamiltonian, dtype=np.complex128).copy()
        for channel in channels:
            h_eff = h_eff - 0.5j * channel.rate * (channel.op.conj().T @ channel.op)
        self.no_jump = NoJumpEvolution(h_eff)
        weights, vectors = la.eigh(0.5 * (initial + initial.conj().T))
        weights = np.clip(weights.real, 0.0, None)
        self._initial_weights = weights / weights.sum()
        self._initial_vectors = vectors
        self.time_scale = time_scale

    def _initial_state(self, rng: RandomStream) -> np.ndarray:
        index = int(rng.choice(self._initial_weights.size, p=self._initial_weights))
        return self._initial_vectors[:, index].astype(np.complex128)

    def _next_jump_time(self, psi: np.ndarray, r: float, remaining: float) -> float | None:
        """Time until the survival drops to r, or None if that is beyond `remaining`."""
        if self.no_jump.survival(psi, remaining) > r:
            return None
        lo, hi = 0.0, min(self.time_scale, remaining)
        while self.no_jump.survival(psi, hi) > r:
            lo, hi = hi, min(2.0 * hi, remaining)
        return float(brentq(lambda t: self.no_jump.survival(psi, t) - r, lo, hi, xtol=ROOT_XTOL))

    def run(self, rng: RandomStream, horizon: float) -> list[tuple[str, float]]:
        """
        Samples one trajectory on [0, horizon].

        Returns:
            (tick_label, time) for every tick jump, in time order.
        """
        psi = self._initial_state(rng)
        now = 0.0
        ticks: list[tuple[str, float]] = []
        while now < horizon:
            r = float(rng.random())
            wait = self._next_jump_time(psi, r, horizon - now)
            if wait is None:
                break
            psi = self.no_jump.propagate(psi, wait)
            now += wait
            weights = np.array(
                [c.rate * float(np.real(np.vdot(c.op @ psi, c.op @ psi))) for c in self.channels]
            )
            total = weights.sum()
            if total <= 0:
                break
            channel = self.channels[int(rng.choice(len(self.channels), p=weights / total))]
            psi = channel.op @ psi
            psi = psi / np.linalg.norm(psi)
            if channel.tick_label is not None:
                if ticks and now <= ticks[-1][1]:
                    now = float(np.nextafter(ticks[-1][1], np.inf))
                ticks.append((channel.tick_label, now))
        return ticks


def clock_channels(spec: ClockSpec, label: str = "A") -> list[JumpChannel]:
    """Channels of an elementary clock; Delta = +1 jumps write `label`."""
    return [
        JumpChannel(jump.rate, jump.op, label if jump.delta == 1 else None)
        for jump in spec.jumps
        if jump.rate > 0
    ]


def _time_scale(spec: ClockSpec) -> float:
    rate = spec.max_rate()
    return 1.0 / rate if rate > 0 else 1.0


def clock_unraveler(spec: ClockSpec) -> Unraveler:
    require_elementary(spec, "Trajectory sampling")
    return Unraveler(spec.hamiltonian, clock_channels(spec), spec.initial_clockwork, _time_scale(spec))


def sample_trajectory(
    spec: ClockSpec,
    horizon: float,
    seed: int,
    clock_id: str = "A",
    rng: RandomStream | None = None,
) -> TickRecord:
    """
    Samples the tick record of one clock up to `horizon`.

    Args:
        spec: An elementary clock.
        horizon: End of the simulated window.
        seed: Seed of the random stream (ignored when `rng` is given).
        clock_id: Identifier stored in the record.
        rng: Explicit random stream.

    Returns:
        The record; deterministic given (spec, horizon, seed).
    """
    return sample_with(clock_unraveler(spec), horizon, rng or seeded_rng(seed), clock_id)


def sample_with(unraveler: Unraveler, horizon: float, rng: RandomStream, clock_id: str) -> TickRecord:
    ticks = unraveler.run(rng, horizon)
    return TickRecord(clock_id, tuple(t for _, t in ticks), horizon)


def sample_trajectories(
    spec: ClockSpec, horizon: float, n_traj: int, seed: int, threads: int = 1
) -> list[TickRecord]:
    """
    Samples `n_traj` independent records.

    Trajectory i draws from the stream `child_rng(seed, i)`, so the result is
    identical for any thread count.
    """
    unraveler = clock_unraveler(spec)

    def one(index: int) -> TickRecord:
        return sample_with(unraveler, horizon, child_rng(seed, index), f"traj-{index}")

    if threads <= 1:
        return [one(i) for i in range(n_traj)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # Workers run in copies of the caller's context, tolerance overrides included.
        futures = [pool.submit(copy_context().run, one, i) for i in range(n_traj)]
        records = [future.result() for future in futures]
    logger.debug(f"Sampled {n_traj} trajectories on {threads} threads")
    return records
