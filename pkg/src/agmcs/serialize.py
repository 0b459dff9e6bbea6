"""JSON (de)serialization for matrices, instances, and result records.

Matrix schema (shared by every command and fixture):

    {"rows": n, "cols": m, "field": "real"|"complex", "data": [...]}

``data`` is row-major; real entries are plain numbers, complex entries
are two-element [re, im] arrays.  Serialization uses repr-exact floats
(json keeps full double precision), so a round-trip reproduces the
stored matrix bit for bit and re-checks land within 1e-12 of recorded
margins.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .linalg import ComplexMatrix, HermitianMatrix, LinalgError, PsdMatrix


def matrix_to_dict(m: ComplexMatrix | np.ndarray, field: str | None = None) -> dict:
    arr = m.array if isinstance(m, ComplexMatrix) else np.asarray(m)
    if field is None:
        field = "complex" if np.iscomplexobj(arr) else "real"
    rows, cols = arr.shape
    if field == "complex":
        carr = arr.astype(np.complex128, copy=False)
        data = [[float(z.real), float(z.imag)] for z in carr.ravel()]
    else:
        data = [float(v) for v in np.real(arr).ravel()]
    return {"rows": int(rows), "cols": int(cols), "field": field, "data": data}


def matrix_from_dict(d: dict, kind: str = "any") -> ComplexMatrix:
    """Parse the matrix schema; ``kind`` picks the validated wrapper:
    "any" -> ComplexMatrix, "hermitian", "psd"."""
    try:
        rows, cols, field = int(d["rows"]), int(d["cols"]), d["field"]
        data = d["data"]
    except (KeyError, TypeError) as exc:
        raise LinalgError(f"matrix object missing required key: {exc}") from exc
    if field not in ("real", "complex"):
        raise LinalgError(f"field must be 'real' or 'complex', got {field!r}")
    if len(data) != rows * cols:
        raise LinalgError(f"data length {len(data)} != rows*cols = {rows * cols}")
    if field == "complex":
        flat = np.array(
            [complex(entry[0], entry[1]) for entry in data], dtype=np.complex128
        )
    else:
        flat = np.array([float(entry) for entry in data], dtype=np.float64)
    arr = flat.reshape(rows, cols)
    if kind == "any":
        return ComplexMatrix(arr, field=field)
    if kind == "hermitian":
        return HermitianMatrix(arr, field=field)
    if kind == "psd":
        return PsdMatrix(arr, field=field)
    raise LinalgError(f"unknown matrix kind {kind!r}")


def instance_to_dict(meta: dict | None = None, **matrices) -> dict:
    """Bundle named matrices plus scalar metadata into one instance object."""
    out: dict[str, Any] = {name: matrix_to_dict(m) for name, m in matrices.items()}
    if meta:
        out.update(meta)
    return out


def dumps_canonical(obj) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def dumps_line(obj) -> str:
    """Deterministic single-line JSON (for jsonl streams)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
