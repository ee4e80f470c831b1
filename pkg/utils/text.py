"""
This module renders task results as text: JSON documents, JSON lines and CSV.

Floats are printed with 17 significant digits so that every number read back
from an output file is bit-identical to the one computed.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def to_plain(value: Any) -> Any:
    """Converts numpy scalars and arrays (nested in dicts, lists, tuples) to JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def render_json(payload: Any) -> str:
    return json.dumps(to_plain(payload), indent=2, sort_keys=True) + "\n"


def render_jsonl(rows: list[Any]) -> str:
    return "".join(json.dumps(to_plain(row), sort_keys=True) + "\n" for row in rows)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def render_csv(rows: list[dict[str, Any]], columns: list[str] | None = None) -> str:
    """
    Renders flat records as CSV with a header line.

    Args:
        rows: One dict per line.
        columns: Column order; defaults to the keys of the first row.
    """
    columns = columns or (list(rows[0].keys()) if rows else [])
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def render(fmt: str, payload: Any, rows: list[Any], columns: list[str] | None = None) -> str:
    if fmt == "json":
        return render_json(payload)
    if fmt == "jsonl":
        return render_jsonl(rows)
    if fmt == "csv":
        return render_csv(rows, columns)
    raise ValueError(f"Unknown output format: {fmt}")


def parse_float_list(text: str) -> list[float]:
    """Parses "1,2.5,4" into floats."""
    return [float(part) for part in text.split(",") if part.strip()]


def parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def parse_time_range(text: str) -> list[float]:
    """
    Parses "a:b:step" into the grid a, a + step, ..., up to and including b.

    A single number is a one-point grid.
    """
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"Time range must be 'a:b:step', got '{text}'")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"Time range '{text}' needs step > 0 and b >= a")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]
