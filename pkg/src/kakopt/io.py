"""JSON (de)serialization for matrices and small vectors.

Matrix files use {"n": <int>, "re": [[...]], "im": [[...]]} with row-major
n x n entries, all finite doubles.
"""

from __future__ import annotations

import json

import numpy as np


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return {
        "n": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(d: dict) -> np.ndarray:
    try:
        n = int(d["n"])
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"matrix entries do not match declared size {n}")
    m = re + 1j * im
    if not np.all(np.isfinite(re)) or not np.all(np.isfinite(im)):
        raise ValueError("matrix entries must be finite")
    return m


def load_matrix(path: str) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def dump_matrix(m: np.ndarray, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(m), fh)


def load_real_matrix(path: str, shape: tuple[int, int]) -> np.ndarray:
    """Real matrix from either the standard format or a bare nested list."""
    with open(path) as fh:
        d = json.load(fh)
    if isinstance(d, list):
        m = np.asarray(d, dtype=float)
    else:
        c = matrix_from_json(d)
        if np.abs(c.imag).max() > 0:
            raise ValueError("expected a real matrix")
        m = c.real
    if m.shape != shape:
        raise ValueError(f"expected shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def vector_from_arg(text: str, length: int) -> np.ndarray:
    v = np.asarray(json.loads(text), dtype=float)
    if v.shape != (length,) or not np.all(np.isfinite(v)):
        raise ValueError(f"expected a finite length-{length} vector, got {text!r}")
    return v
