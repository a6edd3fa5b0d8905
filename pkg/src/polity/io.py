"""Matrix files: CSV (one row per line) or JSON ``{"n": ..., "rows": [...]}``."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import NonFinite, ValidationError


def _reject_constant(name):
    raise NonFinite(f"non-finite value {name} in JSON matrix")


def guess_format(path) -> str:
    return "json" if str(path).lower().endswith(".json") else "csv"


def parse_matrix(text: str, fmt: str = "csv") -> np.ndarray:
    if fmt == "json":
        try:
            doc = json.loads(text, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON matrix: {exc}") from exc
        if not isinstance(doc, dict) or "rows" not in doc:
            raise ValidationError('JSON matrix must be an object with a "rows" field')
        rows = doc["rows"]
        if "n" in doc and doc["n"] != len(rows):
            raise ValidationError(f'"n" is {doc["n"]} but {len(rows)} rows were given')
    elif fmt == "csv":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")

    if not rows:
        raise ValidationError("matrix file is empty")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError(f"row {i + 1} has {len(row)} entries, expected {width}")
        for j, cell in enumerate(row):
            try:
                value = float(cell.strip() if isinstance(cell, str) else cell)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"entry ({i + 1}, {j + 1}) is not a number: {cell!r}") from exc
            if not math.isfinite(value):
                raise NonFinite(f"entry ({i + 1}, {j + 1}) is not finite")
            out[i, j] = value
    return out


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    return parse_matrix(Path(path).read_text(), fmt or guess_format(path))


def format_matrix(m, fmt: str = "csv") -> str:
    m = np.asarray(m, dtype=float)
    if fmt == "json":
        return json.dumps({"n": m.shape[0], "rows": m.tolist()}, allow_nan=False) + "\n"
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in m)


def write_matrix(m, path, fmt: str | None = None) -> None:
    Path(path).write_text(format_matrix(m, fmt or guess_format(path)))


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
