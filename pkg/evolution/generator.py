"""
Lindbladian generators of ticking clocks.

The clockwork generator is split by register shift, L = sum_Delta L_Delta, where
L_0 holds the Hamiltonian commutator, every anticommutator term and the
completely positive parts of the internal (Delta = 0) jumps, and each
L_{Delta != 0} is the completely positive part of the jumps with that shift.
Counting-field tilting weights each part by exp(i Delta chi).

On a truncated register {0..n_max} a shift that leaves the range lands in the
nearest end bin, and the top bin keeps the whole L(0): it is absorbing and
trace-preserving.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from clock.model import ClockSpec, GeneralClockSpec
from numerics.linalg import CMatrix
from numerics.superop import (
    SuperOperator,
    anticommutator_part,
    commutator_generator,
    jump_part,
    lindbladian,
)

logger = logging.getLogger(__name__)


def generator_parts(spec: ClockSpec) -> dict[int, SuperOperator]:
    """
    Splits the clockwork generator by register shift.

    Args:
        spec: An elementary (or at least well-formed) clock.

    Returns:
        Mapping Delta -> L_Delta. The key 0 is always present.
    """
    parts: dict[int, SuperOperator] = {0: commutator_generator(spec.hamiltonian)}
    for jump in spec.jumps:
        parts[0] = parts[0] + anticommutator_part(jump.op, jump.rate)
        cp = jump_part(jump.op, jump.rate)
        parts[jump.delta] = parts[jump.delta] + cp if jump.delta in parts else cp
    return parts


def build_generator(spec: ClockSpec, chi: float = 0.0) -> SuperOperator:
    """
    Returns the tilted clockwork generator L(chi) = sum_Delta exp(i Delta chi) L_Delta.

    Args:
        spec: The clock.
        chi: Counting field; at chi = 0 the result is the trace-annihilating
            reduced clockwork generator.
    """
    parts = generator_parts(spec)
    total = SuperOperator.zero(spec.dim)
    for delta, part in parts.items():
        total = total + part * np.exp(1j * delta * chi)
    return total


def tick_generator(spec: ClockSpec) -> SuperOperator:
    """The tick superoperator J_+ = L_{+1}, zero when the clock never ticks."""
    return generator_parts(spec).get(1, SuperOperator.zero(spec.dim))


@dataclass(frozen=True)
class TruncatedRegister:
    """
    A register window {0..n_max} with an absorbing top bin.

    Attributes:
        n_max: Largest representable tick count.
        overflow_policy: Always "absorbing".
    """
    n_max: int
    overflow_policy: Literal["absorbing"] = "absorbing"

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ValueError(f"n_max must be non-negative, got {self.n_max}")

    @property
    def size(self) -> int:
        return self.n_max + 1

    def target(self, source: int, delta: int) -> int:
        """Bin reached from `source` by a shift of `delta`."""
        if source == self.n_max:
            return self.n_max
        return int(min(max(source + delta, 0), self.n_max))


def routed_generator(spec: ClockSpec, register: TruncatedRegister) -> np.ndarray:
    """
    Assembles the generator on stacked components [vec(rho_0), ..., vec(rho_n_max)].

    Args:
        spec: The clock.
        register: The register window.

    Returns:
        A dense matrix of size (n_max + 1) d^2.
    """
    parts = generator_parts(spec)
    block = spec.dim * spec.dim
    size = register.size * block
    matrix = np.zeros((size, size), dtype=np.complex128)
    for source in range(register.size):
        columns = slice(source * block, (source + 1) * block)
        for delta, part in parts.items():
            target = register.target(source, delta)
            rows = slice(target * block, (target + 1) * block)
            matrix[rows, columns] += part.matrix
    logger.debug(f"Routed generator assembled: n_max={register.n_max}, size={size}")
    return matrix


def register_lindbladian(spec: ClockSpec, n_max: int) -> SuperOperator:
    """
    Builds the Lindbladian on clockwork (x) register, register truncated at n_max.

    The Hamiltonian is H (x) 1 and every jump L with shift Delta acts as
    L (x) |target(n)><n| for each register value n, with the same routing as
    `routed_generator`. Basis ordering follows `numpy.kron(clockwork, register)`.

    Args:
        spec: The clock.
        n_max: Top register bin.

    Returns:
        A superoperator on the d (n_max + 1)-dimensional joint space.
    """
    register = TruncatedRegister(n_max)
    eye_t = np.eye(register.size)
    hamiltonian = np.kron(spec.hamiltonian, eye_t)
    jumps: list[tuple[float, CMatrix]] = []
    for jump in spec.jumps:
        for source in range(register.size):
            shift = np.zeros((register.size, register.size), dtype=np.complex128)
            shift[register.target(source, jump.delta), source] = 1.0
            jumps.append((jump.rate, np.kron(jump.op, shift)))
    return lindbladian(hamiltonian, jumps)


def register_projectors(dim: int, n_max: int) -> list[CMatrix]:
    """Projectors 1_C (x) |n><n| on the joint space, in `numpy.kron` ordering."""
    result = []
    for n in range(n_max + 1):
        p = np.zeros((n_max + 1, n_max + 1), dtype=np.complex128)
        p[n, n] = 1.0
        result.append(np.kron(np.eye(dim), p))
    return result


def general_lindbladian(spec: GeneralClockSpec) -> SuperOperator:
    """The Lindbladian of a block clock on its full direct-sum space."""
    return lindbladian(spec.hamiltonian(), [(jump.rate, jump.op) for jump in spec.jumps])
