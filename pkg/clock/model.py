"""
This module defines the value types that describe a ticking clock.

A `ClockSpec` is an elementary clock: a clockwork Hamiltonian plus Lindblad
jump terms, each tagged with the register shift it causes. A `GeneralClockSpec`
is the block form of a general ticking clock, where each jump connects a
single clockwork block to a single other one.

Rates are kept separate from operators in the public types; internally the
dissipator uses the folded operator sqrt(rate) * L.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as la

from numerics.linalg import CMatrix, projector


@dataclass(frozen=True, eq=False)
class JumpTerm:
    """
    One Lindblad jump channel of an elementary clock.

    Attributes:
        delta: Register shift caused by the jump (0 for an internal jump).
        rate: Non-negative rate gamma, in inverse time units.
        op: Jump operator L on the clockwork space.
    """
    delta: int
    rate: float
    op: CMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", int(self.delta))
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "op", np.asarray(self.op, dtype=np.complex128))

    def folded(self) -> CMatrix:
        """Returns sqrt(rate) * L."""
        return np.sqrt(self.rate) * self.op

    def scaled(self, factor: float) -> JumpTerm:
        return replace(self, rate=self.rate * factor)


@dataclass(frozen=True)
class PropertyFlags:
    """
    The four structural properties of a ticking clock.

    A clock is elementary exactly when all four hold.
    """
    self_timed: bool
    clockwork_independent: bool
    serial_registers: bool
    irreversible_ticks: bool

    @property
    def elementary(self) -> bool:
        return (
            self.self_timed
            and self.clockwork_independent
            and self.serial_registers
            and self.irreversible_ticks
        )

    def to_dict(self) -> dict[str, bool]:
        return {
            "self_timed": self.self_timed,
            "clockwork_independent": self.clockwork_independent,
            "serial_registers": self.serial_registers,
            "irreversible_ticks": self.irreversible_ticks,
            "elementary": self.elementary,
        }


@dataclass(frozen=True, eq=False)
class ClockSpec:
    """
    An elementary clock description.

    Attributes:
        dim: Clockwork dimension d.
        hamiltonian: Hermitian clockwork Hamiltonian H_C.
        jumps: Shift-tagged jump terms.
        initial_clockwork: Initial clockwork density operator.
        labels: Optional names of the clockwork basis states.
    """
    dim: int
    hamiltonian: CMatrix
    jumps: tuple[JumpTerm, ...]
    initial_clockwork: CMatrix
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "hamiltonian", np.asarray(self.hamiltonian, dtype=np.complex128))
        object.__setattr__(self, "jumps", tuple(self.jumps))
        object.__setattr__(
            self, "initial_clockwork", np.asarray(self.initial_clockwork, dtype=np.complex128)
        )
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def deltas(self) -> tuple[int, ...]:
        """Sorted distinct register shifts present in the jump terms."""
        return tuple(sorted({jump.delta for jump in self.jumps}))

    def jumps_with_delta(self, delta: int) -> tuple[JumpTerm, ...]:
        return tuple(jump for jump in self.jumps if jump.delta == delta)

    def effective_hamiltonian(self) -> CMatrix:
        """H - (i/2) sum_j rate_j L_j^dagger L_j, the no-jump generator of pure states."""
        decay = sum(
            (jump.rate * (jump.op.conj().T @ jump.op) for jump in self.jumps),
            np.zeros((self.dim, self.dim), dtype=np.complex128),
        )
        return self.hamiltonian - 0.5j * decay

    def max_rate(self) -> float:
        """Largest characteristic frequency: max of ||H|| and rate * ||L||^2 over jumps."""
        rates = [jump.rate * la.norm(jump.op, 2) ** 2 for jump in self.jumps]
        if self.dim:
            rates.append(float(la.norm(self.hamiltonian, 2)))
        return float(max(rates, default=0.0))

    def scaled(self, factor: float) -> ClockSpec:
        """Multiplies H and every rate by `factor` (a change of time unit)."""
        return replace(
            self,
            hamiltonian=self.hamiltonian * factor,
            jumps=tuple(jump.scaled(factor) for jump in self.jumps),
        )

    def with_initial(self, rho: CMatrix) -> ClockSpec:
        return replace(self, initial_clockwork=np.asarray(rho, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class GeneralJump:
    """
    A jump of a general clock that maps block `source` into block `target`.

    Attributes:
        source: Index n of the block the jump acts on.
        target: Index m of the block it lands in.
        rate: Non-negative rate.
        op: Jump operator on the full (direct-sum) space.
    """
    source: int
    target: int
    rate: float
    op: CMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", int(self.source))
        object.__setattr__(self, "target", int(self.target))
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "op", np.asarray(self.op, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class GeneralClockSpec:
    """
    A ticking clock in block form, H = direct sum of C_n.

    Attributes:
        blocks: Clockwork dimensions dim C_n, one per register value.
        hamiltonian_blocks: One Hermitian matrix per block.
        jumps: Block-to-block jump terms.
        initial: Initial state on the full space; defaults to the first basis state.
    """
    blocks: tuple[int, ...]
    hamiltonian_blocks: tuple[CMatrix, ...]
    jumps: tuple[GeneralJump, ...]
    initial: CMatrix | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        object.__setattr__(
            self,
            "hamiltonian_blocks",
            tuple(np.asarray(h, dtype=np.complex128) for h in self.hamiltonian_blocks),
        )
        object.__setattr__(self, "jumps", tuple(self.jumps))
        if self.initial is not None:
            object.__setattr__(self, "initial", np.asarray(self.initial, dtype=np.complex128))

    @property
    def total_dim(self) -> int:
        return int(sum(self.blocks))

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.concatenate(([0], np.cumsum(self.blocks)[:-1])))

    def block_slice(self, n: int) -> slice:
        start = self.offsets[n]
        return slice(start, start + self.blocks[n])

    def projectors(self) -> list[CMatrix]:
        """Register projectors Pi_n, the identity on block n and zero elsewhere."""
        result = []
        for n in range(len(self.blocks)):
            p = np.zeros((self.total_dim, self.total_dim), dtype=np.complex128)
            s = self.block_slice(n)
            p[s, s] = np.eye(self.blocks[n])
            result.append(p)
        return result

    def hamiltonian(self) -> CMatrix:
        return la.block_diag(*self.hamiltonian_blocks).astype(np.complex128)

    def initial_state(self) -> CMatrix:
        if self.initial is not None:
            return self.initial
        return projector(self.total_dim, 0)

    def embed(self, op: CMatrix, source: int, target: int) -> CMatrix:
        """Places a dim C_target x dim C_source matrix into the full space."""
        full = np.zeros((self.total_dim, self.total_dim), dtype=np.complex128)
        full[self.block_slice(target), self.block_slice(source)] = op
        return full

    def support_pairs(self, op: CMatrix, tol: float) -> list[tuple[int, int]]:
        """Block pairs (target, source) on which Pi_target L Pi_source is non-zero."""
        pairs = []
        for m in range(len(self.blocks)):
            for n in range(len(self.blocks)):
                block = op[self.block_slice(m), self.block_slice(n)]
                if block.size and np.max(np.abs(block)) > tol:
                    pairs.append((m, n))
        return pairs
