"""
JSON model files for clocks.

Complex numbers are written as `[re, im]` pairs and matrices as nested arrays of
such pairs. A file with a `blocks` key describes a `GeneralClockSpec`; any other
file describes an elementary `ClockSpec`:

    {"dim": 1,
     "hamiltonian": [[[0.0, 0.0]]],
     "jumps": [{"delta": 1, "rate": 1.0, "op": [[[1.0, 0.0]]]}],
     "initial": [[[1.0, 0.0]]]}

`save_spec` writes the canonical form (sorted keys, two-space indent, `repr`
floats), so loading and saving a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from clock.model import ClockSpec, GeneralClockSpec, GeneralJump, JumpTerm
from numerics.linalg import CMatrix
from utils.errors import SpecParseError

logger = logging.getLogger(__name__)

ComplexPair = tuple[float, float]
MatrixData = list[list[ComplexPair]]


class JumpModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delta: int
    rate: float = Field(ge=0, allow_inf_nan=False)
    op: MatrixData


class ClockSpecModel(BaseModel):
    """Schema of an elementary clock file."""
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=1)
    hamiltonian: MatrixData
    jumps: list[JumpModel] = Field(default_factory=list)
    initial: MatrixData
    labels: list[str] | None = None


class GeneralJumpModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: int = Field(ge=0)
    target: int = Field(ge=0)
    rate: float = Field(ge=0, allow_inf_nan=False)
    op: MatrixData


class GeneralClockSpecModel(BaseModel):
    """Schema of a block (general) clock file."""
    model_config = ConfigDict(extra="forbid")

    blocks: list[int] = Field(min_length=1)
    hamiltonian_blocks: list[MatrixData]
    jumps: list[GeneralJumpModel] = Field(default_factory=list)
    initial: MatrixData | None = None


def decode_matrix(data: MatrixData, field: str) -> CMatrix:
    """
    Converts nested `[re, im]` pairs into a complex matrix.

    Raises:
        SpecParseError: If the rows are ragged.
    """
    widths = {len(row) for row in data}
    if len(widths) > 1:
        raise SpecParseError(f"Field '{field}': rows have differing lengths {sorted(widths)}")
    if not data:
        return np.zeros((0, 0), dtype=np.complex128)
    pairs = np.asarray(data, dtype=np.float64).reshape(len(data), widths.pop(), 2)
    return pairs[..., 0] + 1j * pairs[..., 1]


def encode_matrix(m: CMatrix) -> list[list[list[float]]]:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _line_of(text: str, key: str) -> int | None:
    """Best-effort line number of the first occurrence of a JSON key."""
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return None


def _schema_error(error: ValidationError, text: str) -> SpecParseError:
    violations = []
    for detail in error.errors():
        loc = [str(x) for x in detail.get("loc", [])]
        field = ".".join(loc) or "<root>"
        named = [part for part in loc if not part.isdigit()]
        line = _line_of(text, named[-1]) if named else None
        where = f" (line {line})" if line else ""
        violations.append(f"Field '{field}'{where}: {detail.get('msg', 'invalid value')}")
    return SpecParseError(f"Schema violation: {'; '.join(violations)}", violations)


def _to_clock_spec(model: ClockSpecModel) -> ClockSpec:
    return ClockSpec(
        dim=model.dim,
        hamiltonian=decode_matrix(model.hamiltonian, "hamiltonian"),
        jumps=tuple(
            JumpTerm(jump.delta, jump.rate, decode_matrix(jump.op, f"jumps.{i}.op"))
            for i, jump in enumerate(model.jumps)
        ),
        initial_clockwork=decode_matrix(model.initial, "initial"),
        labels=tuple(model.labels) if model.labels is not None else None,
    )


def _to_general_spec(model: GeneralClockSpecModel) -> GeneralClockSpec:
    return GeneralClockSpec(
        blocks=tuple(model.blocks),
        hamiltonian_blocks=tuple(
            decode_matrix(h, f"hamiltonian_blocks.{i}") for i, h in enumerate(model.hamiltonian_blocks)
        ),
        jumps=tuple(
            GeneralJump(jump.source, jump.target, jump.rate, decode_matrix(jump.op, f"jumps.{i}.op"))
            for i, jump in enumerate(model.jumps)
        ),
        initial=decode_matrix(model.initial, "initial") if model.initial is not None else None,
    )


def parse_spec(text: str) -> ClockSpec | GeneralClockSpec:
    """
    Parses the JSON text of a clock file.

    Args:
        text: File contents.

    Returns:
        A ClockSpec, or a GeneralClockSpec when the document has `blocks`.

    Raises:
        SpecParseError: On malformed JSON or a schema violation.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(document, dict):
        raise SpecParseError("A clock file must contain a JSON object")

    try:
        if "blocks" in document:
            return _to_general_spec(GeneralClockSpecModel.model_validate(document))
        return _to_clock_spec(ClockSpecModel.model_validate(document))
    except ValidationError as e:
        raise _schema_error(e, text) from e


def load_spec(path: str | Path) -> ClockSpec | GeneralClockSpec:
    """
    Reads a clock file.

    Args:
        path: Location of the JSON file.

    Returns:
        The parsed specification (not yet validated).

    Raises:
        SpecParseError: If the file is missing, unreadable or malformed.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecParseError(f"Cannot read {path}: {e.strerror or e}") from e
    logger.debug(f"Loaded clock file {path}")
    return parse_spec(text)


def spec_to_document(spec: ClockSpec | GeneralClockSpec) -> dict[str, Any]:
    if isinstance(spec, GeneralClockSpec):
        document: dict[str, Any] = {
            "blocks": list(spec.blocks),
            "hamiltonian_blocks": [encode_matrix(h) for h in spec.hamiltonian_blocks],
            "jumps": [
                {
                    "source": jump.source,
                    "target": jump.target,
                    "rate": float(jump.rate),
                    "op": encode_matrix(jump.op),
                }
                for jump in spec.jumps
            ],
        }
        if spec.initial is not None:
            document["initial"] = encode_matrix(spec.initial)
        return document

    document = {
        "dim": spec.dim,
        "hamiltonian": encode_matrix(spec.hamiltonian),
        "jumps": [
            {"delta": jump.delta, "rate": float(jump.rate), "op": encode_matrix(jump.op)}
            for jump in spec.jumps
        ],
        "initial": encode_matrix(spec.initial_clockwork),
    }
    if spec.labels is not None:
        document["labels"] = list(spec.labels)
    return document


def dumps_spec(spec: ClockSpec | GeneralClockSpec) -> str:
    """Returns the canonical JSON text of a spec, newline-terminated."""
    return json.dumps(spec_to_document(spec), sort_keys=True, indent=2) + "\n"


def save_spec(spec: ClockSpec | GeneralClockSpec, path: str | Path) -> Path:
    """
    Writes a spec in canonical form.

    Args:
        spec: The clock to write.
        path: Destination file; parent directories are created.

    Returns:
        The path written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_spec(spec), encoding="utf-8")
    logger.debug(f"Saved clock file {path}")
    return path
