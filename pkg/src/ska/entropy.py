"""Binary entropy quantities and the layer-wise discrete entropy.

Scalar functions accept floats or arrays and broadcast. Everything is in
bits. Probabilities are clamped to ``[eps, 1 - eps]`` before any log or
logit so that saturated neurons never produce infinities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor import Matrix, ShapeError, flat_dot, frobenius_norm

INV_LN2 = 1.0 / math.log(2.0)
CLAMP_EPS = 1e-12


@dataclass(frozen=True)
class EntropyRecord:
    layer: int
    step: int
    delta_h: float
    cumulative_h: float


def clamp(d, eps: float = CLAMP_EPS):
    return np.clip(d, eps, 1.0 - eps)


def shannon_entropy(d, eps: float = CLAMP_EPS):
    d = clamp(d, eps)
    return -d * np.log2(d) - (1.0 - d) * np.log2(1.0 - d)


def shannon_derivative(d, eps: float = CLAMP_EPS):
    """dH/dD = log2((1 - D) / D)."""
    d = clamp(d, eps)
    return np.log2((1.0 - d) / d)


def ska_entropy_closed_form(d, eps: float = CLAMP_EPS):
    """Integral of -z dD / ln 2 with z = logit(D), in closed form.

    Algebraically identical to :func:`shannon_entropy`; evaluated through
    the logit rather than through log2 so the two routes stay independent.
    """
    d = clamp(d, eps)
    return -INV_LN2 * (d * np.log(d / (1.0 - d)) + np.log1p(-d))


def knowledge_from_probability(d, eps: float = CLAMP_EPS):
    """Logit, the inverse of the sigmoid."""
    d = clamp(d, eps)
    return np.log(d) - np.log1p(-d)


def continuous_entropy_rate(z, d):
    """dH/dz for a single neuron whose D follows the sigmoid of z."""
    return -INV_LN2 * z * d * (1.0 - d)


def layer_step_entropy(z: Matrix, delta_d: Matrix, batch: int = 1) -> float:
    """One step's entropy change for a layer, -(z . dD) / ln 2, divided by ``batch``."""
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    # + 0.0 turns -0.0 into 0.0
    return -INV_LN2 * flat_dot(z, delta_d) / batch + 0.0


def entropy_gradient_z(z: Matrix, d: Matrix, delta_d: Matrix) -> Matrix:
    """Gradient of the step entropy with respect to the knowledge matrix.

    With ``delta_d = sigmoid(z) - d_prev`` and ``d_prev`` held fixed,
    d/dz of ``-(z * delta_d) / ln 2`` is ``-(z * D' + delta_d) / ln 2``
    where ``D' = d * (1 - d)``. Returned per entry, unscaled by batch size.
    """
    if not (z.shape == d.shape == delta_d.shape):
        raise ShapeError(
            f"entropy_gradient_z: shapes {z.shape}, {d.shape}, {delta_d.shape} differ")
    return -INV_LN2 * (z * d * (1.0 - d) + delta_d)


def governing_residual(grad: Matrix, z: Matrix, d: Matrix, delta_d: Matrix) -> float:
    """Frobenius norm of ``grad + (z * D' + delta_d) / ln 2``; zero for an exact gradient."""
    if not (grad.shape == z.shape == d.shape == delta_d.shape):
        raise ShapeError(
            f"governing_residual: shapes {grad.shape}, {z.shape}, {d.shape}, "
            f"{delta_d.shape} differ")
    return frobenius_norm(grad + INV_LN2 * (z * d * (1.0 - d) + delta_d))


def interlayer_entropy_change(z_l: Matrix, dd_l: Matrix, z_next: Matrix,
                              dd_next: Matrix, batch: int = 1) -> float:
    """Entropy change from layer ``l`` to layer ``l + 1`` at the same step."""
    return layer_step_entropy(z_next, dd_next, batch) - layer_step_entropy(z_l, dd_l, batch)


def cumulative(deltas) -> list[float]:
    """Running sums, accumulated left to right."""
    out, total = [], 0.0
    for x in deltas:
        total += x
        out.append(total)
    return out
