"""Numerical checks of the closed-form entropy identities and gradients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import entropy
from .learner import weight_entropy_gradient
from .model import LayerState
from .tensor import sigmoid


@dataclass
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)


def _central(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def check_ska_equals_shannon(n: int = 10_000) -> CheckResult:
    d = np.linspace(1e-6, 1 - 1e-6, n)
    dev = np.max(np.abs(entropy.ska_entropy_closed_form(d) - entropy.shannon_entropy(d)))
    return CheckResult("ska_closed_form == shannon", float(dev), 1e-12)


def check_shannon_derivative(n: int = 100, h: float = 1e-6) -> CheckResult:
    d = np.linspace(0.01, 0.99, n)
    fd = _central(entropy.shannon_entropy, d, h)
    dev = np.max(np.abs(entropy.shannon_derivative(d) - fd))
    return CheckResult("shannon_derivative vs finite difference", float(dev), 1e-6)


def check_continuous_rate(n: int = 100, h: float = 1e-6) -> CheckResult:
    z = np.linspace(-8.0, 8.0, n)
    fd = _central(lambda t: entropy.shannon_entropy(sigmoid(t)), z, h)
    dev = np.max(np.abs(entropy.continuous_entropy_rate(z, sigmoid(z)) - fd))
    return CheckResult("continuous entropy rate vs finite difference", float(dev), 1e-6)


def _random_layer(rng, batch=3, n_in=4, n_out=4):
    w = rng.normal(size=(n_out, n_in))
    b = rng.normal(size=n_out)
    x = rng.uniform(size=(batch, n_in))
    d_prev = sigmoid(rng.normal(size=(batch, n_out)))
    return w, b, x, d_prev


def _step_entropy_at(w, b, x, d_prev, batch):
    z = x @ w.T + b
    return entropy.layer_step_entropy(z, sigmoid(z) - d_prev, batch)


def check_gradients(instances: int = 20, h: float = 1e-6, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    dev_z = dev_w = 0.0
    for _ in range(instances):
        w, b, x, d_prev = _random_layer(rng)
        z = x @ w.T + b
        d = sigmoid(z)
        g = entropy.entropy_gradient_z(z, d, d - d_prev)
        for idx in np.ndindex(z.shape):
            e = np.zeros_like(z)
            e[idx] = h
            f = lambda zz: entropy.layer_step_entropy(zz, sigmoid(zz) - d_prev, 1)  # noqa: E731
            dev_z = max(dev_z, abs(g[idx] - (f(z + e) - f(z - e)) / (2 * h)))

        batch = x.shape[0]
        layer = LayerState(w, b, z=z, d=d, d_prev=d_prev, delta_d=d - d_prev)
        gw = weight_entropy_gradient(layer, x, batch)
        for idx in np.ndindex(w.shape):
            e = np.zeros_like(w)
            e[idx] = h
            fd = (_step_entropy_at(w + e, b, x, d_prev, batch)
                  - _step_entropy_at(w - e, b, x, d_prev, batch)) / (2 * h)
            dev_w = max(dev_w, abs(gw[idx] - fd))
    return [CheckResult("entropy_gradient_z vs finite difference", float(dev_z), 1e-5),
            CheckResult("weight_entropy_gradient vs finite difference", float(dev_w), 1e-5)]


def check_governing_residual(instances: int = 100, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(instances):
        z = rng.normal(scale=3.0, size=(3, 4))
        d = sigmoid(z)
        dd = d - sigmoid(rng.normal(size=z.shape))
        g = entropy.entropy_gradient_z(z, d, dd)
        dev = max(dev, entropy.governing_residual(g, z, d, dd))
    return CheckResult("governing equation residual", float(dev), 1e-12)


def check_logit_round_trip(n: int = 1000) -> CheckResult:
    d = np.linspace(1e-6, 1 - 1e-6, n)
    dev = np.max(np.abs(sigmoid(entropy.knowledge_from_probability(d)) - d))
    return CheckResult("sigmoid(logit(d)) == d", float(dev), 1e-12)


def run_all() -> list[CheckResult]:
    return [
        check_ska_equals_shannon(),
        check_shannon_derivative(),
        check_continuous_rate(),
        *check_gradients(),
        check_governing_residual(),
        check_logit_round_trip(),
    ]
