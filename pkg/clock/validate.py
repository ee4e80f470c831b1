"""
Structural validation of clock specifications.

Both validators collect every violation they find before raising, so a single
run reports everything that is wrong with a model file.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from clock.model import ClockSpec, GeneralClockSpec, JumpTerm, PropertyFlags
from config import get_tolerances
from numerics.linalg import is_hermitian, is_psd
from utils.errors import (
    ClockValidationError,
    PreconditionError,
    StructureError,
    UnsupportedError,
)

logger = logging.getLogger(__name__)


def _state_violations(name: str, rho: np.ndarray, dim: int) -> list[str]:
    tol = get_tolerances()
    if rho.shape != (dim, dim):
        return [f"{name} has shape {rho.shape}, expected {(dim, dim)}"]
    errors = []
    if not is_hermitian(rho, tol.hermitian):
        errors.append(f"{name} is not Hermitian")
    elif not is_psd(rho, tol.psd):
        errors.append(f"{name} is not positive semidefinite")
    if abs(np.trace(rho) - 1.0) > tol.trace:
        errors.append(f"{name} has trace {np.trace(rho).real:.6g}, expected 1")
    return errors


def _rate_violations(name: str, rate: float) -> list[str]:
    if not np.isfinite(rate) or rate < 0:
        return [f"{name} has invalid rate {rate}; rates must be finite and >= 0"]
    return []


def spec_violations(spec: ClockSpec) -> list[str]:
    """
    Lists every way in which a ClockSpec is malformed.

    Args:
        spec: The clock to check.

    Returns:
        Human-readable violations; empty when the spec is well-formed.
    """
    tol = get_tolerances()
    errors: list[str] = []
    d = spec.dim
    if d < 1:
        return [f"dim must be positive, got {d}"]
    if spec.hamiltonian.shape != (d, d):
        errors.append(f"hamiltonian has shape {spec.hamiltonian.shape}, expected {(d, d)}")
    elif not is_hermitian(spec.hamiltonian, tol.hermitian):
        errors.append("hamiltonian is not Hermitian")
    for index, jump in enumerate(spec.jumps):
        name = f"jumps[{index}]"
        errors.extend(_rate_violations(name, jump.rate))
        if jump.op.shape != (d, d):
            errors.append(f"{name}.op has shape {jump.op.shape}, expected {(d, d)}")
        elif not np.any(np.abs(jump.op) > 0):
            errors.append(f"{name}.op is the zero operator")
    errors.extend(_state_violations("initial", spec.initial_clockwork, d))
    if spec.labels is not None and len(spec.labels) != d:
        errors.append(f"labels has {len(spec.labels)} entries, expected {d}")
    return errors


def validate_elementary(spec: ClockSpec) -> PropertyFlags:
    """
    Validates a ClockSpec and reports its structural properties.

    Args:
        spec: The clock to check.

    Returns:
        The four property flags.

    Raises:
        ClockValidationError: Listing every malformed field.
    """
    errors = spec_violations(spec)
    if errors:
        raise ClockValidationError.from_violations("clock spec", errors)

    deltas = [jump.delta for jump in spec.jumps]
    flags = PropertyFlags(
        self_timed=True,
        clockwork_independent=True,
        serial_registers=all(abs(delta) <= 1 for delta in deltas),
        irreversible_ticks=all(delta >= 0 for delta in deltas),
    )
    logger.debug(f"Validated elementary spec: {flags}")
    return flags


def require_elementary(spec: ClockSpec, what: str) -> PropertyFlags:
    """Validates `spec` and raises a precondition error unless it is elementary."""
    flags = validate_elementary(spec)
    if not flags.elementary:
        failing = [name for name, value in flags.to_dict().items() if not value and name != "elementary"]
        raise PreconditionError(f"{what} requires an elementary clock; failing: {', '.join(failing)}")
    return flags


@dataclass(frozen=True)
class GeneralReport:
    """
    Outcome of validating a GeneralClockSpec.

    Attributes:
        flags: Structural properties of the block clock.
        edges: Register graph as sorted (source, target) pairs between distinct blocks.
        diagnostics: Informational notes about the structure.
    """
    flags: PropertyFlags
    edges: tuple[tuple[int, int], ...]
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "flags": self.flags.to_dict(),
            "edges": [list(edge) for edge in self.edges],
            "diagnostics": list(self.diagnostics),
        }


def _is_acyclic(nodes: int, edges: tuple[tuple[int, int], ...]) -> bool:
    indegree = [0] * nodes
    children: dict[int, list[int]] = {n: [] for n in range(nodes)}
    for source, target in edges:
        children[source].append(target)
        indegree[target] += 1
    frontier = [n for n in range(nodes) if indegree[n] == 0]
    visited = 0
    while frontier:
        node = frontier.pop()
        visited += 1
        for child in children[node]:
            indegree[child] -= 1
            if indegree[child] == 0:
                frontier.append(child)
    return visited == nodes


def validate_general(spec: GeneralClockSpec) -> GeneralReport:
    """
    Validates the block structure of a general ticking clock.

    Each jump must satisfy L = Pi_m L Pi_n for exactly its declared pair, the
    Hamiltonian blocks must be Hermitian, and the initial state must carry no
    coherence between blocks.

    Args:
        spec: The block clock.

    Returns:
        Flags, register graph and diagnostics.

    Raises:
        StructureError: If a jump touches more than one block pair, or a
            different pair than declared.
        ClockValidationError: For any other malformed field.
    """
    tol = get_tolerances()
    errors: list[str] = []
    structure: list[str] = []

    if not spec.blocks or any(b < 1 for b in spec.blocks):
        raise ClockValidationError.from_violations(
            "general clock spec", ["blocks must be a non-empty list of positive dimensions"]
        )
    nblocks = len(spec.blocks)
    total = spec.total_dim

    if len(spec.hamiltonian_blocks) != nblocks:
        errors.append(f"{len(spec.hamiltonian_blocks)} hamiltonian blocks for {nblocks} blocks")
    for n, (h, dim) in enumerate(zip(spec.hamiltonian_blocks, spec.blocks)):
        if h.shape != (dim, dim):
            errors.append(f"hamiltonian_blocks[{n}] has shape {h.shape}, expected {(dim, dim)}")
        elif not is_hermitian(h, tol.hermitian):
            errors.append(f"hamiltonian_blocks[{n}] is not Hermitian")

    for index, jump in enumerate(spec.jumps):
        name = f"jumps[{index}]"
        errors.extend(_rate_violations(name, jump.rate))
        if not (0 <= jump.source < nblocks and 0 <= jump.target < nblocks):
            errors.append(f"{name} connects unknown blocks {jump.source} -> {jump.target}")
            continue
        if jump.op.shape != (total, total):
            errors.append(f"{name}.op has shape {jump.op.shape}, expected {(total, total)}")
            continue
        pairs = spec.support_pairs(jump.op, tol.structure)
        if not pairs:
            errors.append(f"{name}.op is the zero operator")
        elif pairs != [(jump.target, jump.source)]:
            described = ", ".join(f"{n}->{m}" for m, n in pairs)
            structure.append(
                f"{name} must map block {jump.source} into block {jump.target} only, "
                f"but has support on {described}"
            )

    rho = spec.initial_state()
    errors.extend(_state_violations("initial", rho, total))
    if rho.shape == (total, total):
        projectors = spec.projectors()
        dephased = sum(p @ rho @ p for p in projectors)
        if np.max(np.abs(dephased - rho)) > tol.structure:
            errors.append("initial state has coherence between register blocks")

    if structure:
        raise StructureError(
            f"general clock spec violates the single-block-pair jump structure: {'; '.join(structure)}",
            structure,
        )
    if errors:
        raise ClockValidationError.from_violations("general clock spec", errors)

    edges = tuple(sorted({(j.source, j.target) for j in spec.jumps if j.source != j.target}))
    single = nblocks == 1
    flags = PropertyFlags(
        self_timed=True,
        clockwork_independent=single,
        serial_registers=single,
        irreversible_ticks=_is_acyclic(nblocks, edges),
    )
    diagnostics = [f"{nblocks} block(s) with dimensions {list(spec.blocks)}"]
    diagnostics.append(f"register graph has {len(edges)} edge(s)")
    if not single:
        diagnostics.append("block clockworks differ per register value; not a serial register")
    return GeneralReport(flags=flags, edges=edges, diagnostics=tuple(diagnostics))


def general_to_clock_spec(spec: GeneralClockSpec) -> ClockSpec:
    """
    Converts a single-block general clock to the equivalent ClockSpec.

    All jumps become internal (delta = 0) jump terms.
    """
    validate_general(spec)
    if len(spec.blocks) != 1:
        raise UnsupportedError("Only single-block general clocks convert to a ClockSpec")
    return ClockSpec(
        dim=spec.blocks[0],
        hamiltonian=spec.hamiltonian_blocks[0],
        jumps=tuple(JumpTerm(0, jump.rate, jump.op) for jump in spec.jumps),
        initial_clockwork=spec.initial_state(),
    )
