"""CSV ingestion and deterministic JSON/CSV report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = ["InputError", "read_values", "format_float", "dumps_json", "dumps_csv", "load_schema"]


class InputError(ValueError):
    """Unreadable or malformed input file."""


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_values(path: str | Path, column: str | int | None = None) -> np.ndarray:
    """Read one numeric column from a CSV file (``-`` reads stdin).

    A header is recognised by a non-numeric first token in the first
    non-empty row. ``column`` selects a column by header name or 0-based
    index; the first column is used by default. Blank lines are ignored.

    Raises
    ------
    InputError
        With the offending line number for any malformed or non-finite value.
    """
    try:
        if str(path) == "-":
            text = sys.stdin.read()
        else:
            text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None

    rows = [(ln, row) for ln, row in enumerate(csv.reader(io.StringIO(text)), start=1) if any(c.strip() for c in row)]
    if not rows:
        raise InputError(f"{path}: no data")

    col = 0
    first_ln, first = rows[0]
    if not _is_number(first[0].strip()):
        header = [h.strip() for h in first]
        rows = rows[1:]
        if isinstance(column, str) and not column.isdigit():
            if column not in header:
                raise InputError(f"{path}:{first_ln}: no column named {column!r}")
            col = header.index(column)
        elif column is not None:
            col = int(column)
    elif column is not None:
        if isinstance(column, str) and not column.isdigit():
            raise InputError(f"{path}: file has no header, cannot select column {column!r}")
        col = int(column)

    values = []
    for ln, row in rows:
        if col >= len(row):
            raise InputError(f"{path}:{ln}: missing column {col}")
        token = row[col].strip()
        try:
            v = float(token)
        except ValueError:
            raise InputError(f"{path}:{ln}: not a number: {token!r}") from None
        if not math.isfinite(v):
            raise InputError(f"{path}:{ln}: non-finite value {token!r}")
        values.append(v)
    if not values:
        raise InputError(f"{path}: no data")
    return np.asarray(values, dtype=np.float64)


def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating, Fraction)):
        x = float(obj)
        return format_float(x) if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON; floats use :func:`format_float`, non-finite become null."""
    return _emit(obj, indent, 0) + "\n"


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating, Fraction)):
        x = float(v)
        return format_float(x) if math.isfinite(x) else ""
    return str(v)


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def load_schema(command: str) -> dict:
    """JSON schema of the report emitted by CLI ``command``."""
    from importlib import resources

    text = resources.files("tailstat").joinpath("schemas", f"{command}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
