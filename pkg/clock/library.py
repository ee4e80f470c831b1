"""
Canonical clocks used as fixtures and in the documentation.
"""

from __future__ import annotations

import numpy as np

from clock.model import ClockSpec, JumpTerm
from numerics.linalg import projector, transition


def poisson_clock(rate: float = 1.0) -> ClockSpec:
    """A one-dimensional clockwork that ticks at a constant rate."""
    one = np.ones((1, 1), dtype=np.complex128)
    return ClockSpec(
        dim=1,
        hamiltonian=np.zeros((1, 1)),
        jumps=(JumpTerm(1, rate, one),),
        initial_clockwork=one,
        labels=("idle",),
    )


def erlang_clock(d: int, rate: float = 1.0) -> ClockSpec:
    """
    A classical ladder of `d` levels climbed at `rate`; the last rung ticks.

    Args:
        d: Number of ladder levels (d >= 1).
        rate: Rate of every rung, including the ticking one.

    Returns:
        A reset clock whose waiting time is Erlang(d, rate) distributed.
    """
    if d < 1:
        raise ValueError(f"Erlang clock needs d >= 1, got {d}")
    jumps = [JumpTerm(0, rate, transition(d, k + 1, k)) for k in range(d - 1)]
    jumps.append(JumpTerm(1, rate, transition(d, 0, d - 1)))
    return ClockSpec(
        dim=d,
        hamiltonian=np.zeros((d, d)),
        jumps=tuple(jumps),
        initial_clockwork=projector(d, 0),
        labels=tuple(f"rung{k}" for k in range(d)),
    )


def coherent_two_level_clock(omega: float = 1.0, rate: float = 1.0) -> ClockSpec:
    """
    Rabi drive H = omega * sigma_x with a ticking decay from the excited level.

    The decay lands in the ground state, so every tick resets the clockwork.
    """
    sigma_x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    return ClockSpec(
        dim=2,
        hamiltonian=omega * sigma_x,
        jumps=(JumpTerm(1, rate, transition(2, 0, 1)),),
        initial_clockwork=projector(2, 0),
        labels=("ground", "excited"),
    )


def branching_clock(rate: float = 1.0, to_slow: float = 0.5, from_slow: float = 1.0) -> ClockSpec:
    """
    Two-lane clock: level 0 ticks at `rate` or falls into a slow lane (level 1).

    Args:
        rate: Tick rate out of the fast lane.
        to_slow: Rate of the internal jump 0 -> 1.
        from_slow: Rate of the internal jump 1 -> 0.
    """
    return ClockSpec(
        dim=2,
        hamiltonian=np.zeros((2, 2)),
        jumps=(
            JumpTerm(1, rate, projector(2, 0)),
            JumpTerm(0, to_slow, transition(2, 1, 0)),
            JumpTerm(0, from_slow, transition(2, 0, 1)),
        ),
        initial_clockwork=projector(2, 0),
        labels=("fast", "slow"),
    )


def dephasing_qubit(rate: float = 1.0) -> ClockSpec:
    """A qubit under pure dephasing; it never ticks and has no unique steady state."""
    sigma_z = np.diag([1.0, -1.0]).astype(np.complex128)
    return ClockSpec(
        dim=2,
        hamiltonian=np.zeros((2, 2)),
        jumps=(JumpTerm(0, rate, sigma_z),),
        initial_clockwork=projector(2, 0),
    )


LIBRARY = {
    "poisson": poisson_clock,
    "erlang": erlang_clock,
    "coherent": coherent_two_level_clock,
    "branching": branching_clock,
    "dephasing": dephasing_qubit,
}
