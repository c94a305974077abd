"""Canonical JSON output and [re, im] pair encoding.

Every complex number crosses the wire as a [re, im] pair.  The canonical
writer prints floats with 17 significant digits (round-trip-exact for
doubles) and preserves key insertion order, so equal values always produce
identical bytes.  Non-finite numbers are rejected outright.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import DimensionMismatch


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    return format(x, ".17g")


def canonical_json(obj) -> str:
    parts: list[str] = []
    _write(obj, parts)
    return "".join(parts)


def _write(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):  # before int: bool subclasses int
        out.append("true" if obj else "false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _write(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON keys must be strings, got {key!r}")
            if i:
                out.append(", ")
            out.append(json.dumps(key))
            out.append(": ")
            _write(value, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_to_pairs(m) -> list[list[float]]:
    """Flatten a d x d complex matrix to row-major [re, im] pairs."""
    flat = np.asarray(m, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def pairs_to_matrix(pairs, dim: int) -> np.ndarray:
    a = pairs_to_vector(pairs)
    if a.size != dim * dim:
        raise DimensionMismatch(f"expected {dim * dim} entries for a {dim}x{dim} matrix, got {a.size}")
    return a.reshape(dim, dim)


def vector_to_pairs(v) -> list[list[float]]:
    flat = np.asarray(v, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def pairs_to_vector(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise DimensionMismatch(f"expected a list of [re, im] pairs, got shape {a.shape}")
    return a[:, 0] + 1j * a[:, 1]
