"""Dense float64 matrix helpers.

Matrices are plain 2-D ``numpy.ndarray`` objects, rows = samples and
cols = neurons. The functions here add the shape checks and finiteness
guarantees the rest of the package relies on.
"""
from __future__ import annotations

from typing import Literal

import numpy as np

Matrix = np.ndarray

# largest double strictly below 1.0
_ONE_MINUS = float(np.nextafter(1.0, 0.0))
_TINY = float(np.finfo(np.float64).tiny)


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


def as_matrix(values) -> Matrix:
    """Coerce ``values`` into a finite 2-D float64 array (1-D becomes one row)."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf")
    return m


def _same_shape(a: Matrix, b: Matrix, what: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what}: shape mismatch {a.shape} vs {b.shape}")


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}")
    return a @ b


def elementwise(a: Matrix, b: Matrix, op: Literal["add", "sub", "mul"]) -> Matrix:
    _same_shape(a, b, f"elementwise {op}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown elementwise op {op!r}")


def sigmoid(z: Matrix) -> Matrix:
    """Logistic function, evaluated without overflow.

    Output is clipped to the open interval (0, 1): in float64 the exact
    value rounds to 1.0 for z > ~37 and to 0.0 for z < ~-745.
    """
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, _TINY, _ONE_MINUS)


def frobenius_norm(m: Matrix) -> float:
    return float(np.sqrt(np.sum(np.square(m))))


def flat_dot(a: Matrix, b: Matrix) -> float:
    """Sum of the elementwise product, over samples and neurons alike."""
    _same_shape(a, b, "flat_dot")
    return float(np.sum(a * b))
