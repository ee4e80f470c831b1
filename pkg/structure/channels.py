"""
Quantum channels in Kraus form and the non-disturbance check.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from clock.io import MatrixData, decode_matrix, encode_matrix
from config import get_tolerances
from numerics.linalg import CMatrix, dagger, projector
from numerics.superop import SuperOperator, kraus_superoperator, sprepost
from utils.errors import ClockValidationError, DimensionError, SpecParseError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """
    A channel rho -> sum_k A_k rho A_k^dagger.

    Attributes:
        dim: Hilbert-space dimension.
        kraus_ops: Kraus operators with sum_k A_k^dagger A_k = 1.
    """
    dim: int
    kraus_ops: tuple[CMatrix, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(a, dtype=np.complex128) for a in self.kraus_ops)
        object.__setattr__(self, "kraus_ops", ops)
        if not ops:
            raise ClockValidationError.from_violations("channel", ["at least one Kraus operator is required"])
        bad = [i for i, a in enumerate(ops) if a.shape != (self.dim, self.dim)]
        if bad:
            raise DimensionError(f"Kraus operators {bad} are not {self.dim}x{self.dim}")
        completeness = sum(dagger(a) @ a for a in ops)
        residual = float(np.max(np.abs(completeness - np.eye(self.dim))))
        if residual > get_tolerances().trace:
            raise ClockValidationError.from_violations(
                "channel", [f"sum of A_k^dagger A_k differs from identity by {residual:.3e}"]
            )

    @classmethod
    def identity(cls, dim: int) -> QuantumChannel:
        return cls(dim, (np.eye(dim, dtype=np.complex128),))

    @classmethod
    def dephasing(cls, dim: int) -> QuantumChannel:
        """Complete dephasing in the computational basis."""
        return cls(dim, tuple(projector(dim, i) for i in range(dim)))

    @classmethod
    def block_measurement(cls, blocks: list[int]) -> QuantumChannel:
        """The non-selective measurement of which block of a direct sum a state is in."""
        total = int(sum(blocks))
        ops = []
        start = 0
        for size in blocks:
            p = np.zeros((total, total), dtype=np.complex128)
            p[start:start + size, start:start + size] = np.eye(size)
            ops.append(p)
            start += size
        return cls(total, tuple(ops))

    def apply(self, rho: CMatrix) -> CMatrix:
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (self.dim, self.dim):
            raise DimensionError(f"State of shape {rho.shape} does not match channel dim {self.dim}")
        return sum(a @ rho @ dagger(a) for a in self.kraus_ops)

    __call__ = apply

    def superoperator(self) -> SuperOperator:
        return kraus_superoperator(self.kraus_ops)

    def dual_superoperator(self) -> SuperOperator:
        """The Heisenberg-picture map X -> sum_k A_k^dagger X A_k."""
        total = SuperOperator.zero(self.dim)
        for a in self.kraus_ops:
            total = total + sprepost(dagger(a), a)
        return total

    def conjugated(self, unitary: CMatrix) -> QuantumChannel:
        """The channel with every Kraus operator replaced by V A_k V^dagger."""
        v = np.asarray(unitary, dtype=np.complex128)
        return QuantumChannel(self.dim, tuple(v @ a @ dagger(v) for a in self.kraus_ops))


def verify_nondisturbance(channel: QuantumChannel, states: list[CMatrix]) -> float:
    """
    Largest Frobenius distance ||E(rho) - rho|| over the given states.

    Raises:
        DimensionError: If a state does not match the channel dimension.
    """
    residual = 0.0
    for rho in states:
        residual = max(residual, float(np.linalg.norm(channel.apply(rho) - rho)))
    logger.debug(f"Non-disturbance residual over {len(states)} states: {residual:.3e}")
    return residual


class ChannelModel(BaseModel):
    """Schema of a channel file: {"dim": d, "kraus": [matrix, ...]}."""
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=1)
    kraus: list[MatrixData] = Field(min_length=1)


def load_channel(path: str | Path) -> QuantumChannel:
    """
    Reads a channel file with complex entries as [re, im] pairs.

    Raises:
        SpecParseError: On unreadable or malformed files.
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        model = ChannelModel.model_validate(document)
    except OSError as e:
        raise SpecParseError(f"Cannot read {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise SpecParseError(f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    except ValidationError as e:
        violations = [
            f"Field '{'.'.join(str(x) for x in err.get('loc', []))}': {err.get('msg')}" for err in e.errors()
        ]
        raise SpecParseError(f"Schema violation: {'; '.join(violations)}", violations) from e
    ops = tuple(decode_matrix(m, f"kraus.{i}") for i, m in enumerate(model.kraus))
    return QuantumChannel(model.dim, ops)


def dumps_channel(channel: QuantumChannel) -> str:
    document = {"dim": channel.dim, "kraus": [encode_matrix(a) for a in channel.kraus_ops]}
    return json.dumps(document, sort_keys=True, indent=2) + "\n"
