"""Forward-only training: every layer descends its own step entropy.

A step runs one forward pass with frozen weights, computes each layer's
entropy gradient from that layer's own (z, d, delta_d) and input, then
applies all updates at once. Nothing flows backward between layers.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .entropy import CLAMP_EPS, entropy_gradient_z, layer_step_entropy
from .metrics import StepMetrics, TrainingHistory, class_mean_probabilities, cosine_alignment
from .model import LayerState, Network, forward, init_network, layer_inputs
from .tensor import Matrix, ShapeError, frobenius_norm

log = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e6


class DivergenceError(RuntimeError):
    def __init__(self, msg: str, layer: int | None = None, step: int | None = None):
        super().__init__(msg)
        self.layer = layer
        self.step = step


@dataclass
class NetworkConfig:
    layer_sizes: list[int] = field(default_factory=lambda: [784, 128, 64, 32, 10])
    steps_k: int = 50
    learning_rate: float = 0.1
    seed: int = 0
    batch_size: int | None = None  # None = full batch
    clamp_eps: float = CLAMP_EPS
    batch_average: bool = True
    freeze_bias: bool = False

    def __post_init__(self):
        self.layer_sizes = [int(s) for s in self.layer_sizes]
        self.validate()

    def validate(self) -> None:
        if len(self.layer_sizes) < 2 or any(s < 1 for s in self.layer_sizes):
            raise ValueError(f"layer_sizes must hold >= 2 positive sizes, got {self.layer_sizes}")
        if self.steps_k < 2:
            raise ValueError(f"steps_k must be >= 2, got {self.steps_k}")
        if not self.learning_rate >= 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if not 0 < self.clamp_eps < 0.5:
            raise ValueError(f"clamp_eps must lie in (0, 0.5), got {self.clamp_eps}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")

    def build_network(self) -> Network:
        return init_network(self.layer_sizes, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


def _scale(config: NetworkConfig, batch: int) -> int:
    return batch if config.batch_average else 1


def weight_entropy_gradient(layer: LayerState, layer_input: Matrix, batch: int) -> Matrix:
    """dH/dW for one layer, treating its input as a constant.

    Shape ``(out_dim, in_dim)``: ``G.T @ layer_input / batch`` with ``G``
    the knowledge-space entropy gradient.
    """
    if layer.z is None:
        raise RuntimeError("layer has no forward state")
    if layer_input.shape != (layer.z.shape[0], layer.in_dim):
        raise ShapeError(f"layer input {layer_input.shape} does not match "
                         f"({layer.z.shape[0]}, {layer.in_dim})")
    g = entropy_gradient_z(layer.z, layer.d, layer.delta_d)
    return g.T @ layer_input / batch


def bias_entropy_gradient(layer: LayerState, batch: int) -> np.ndarray:
    g = entropy_gradient_z(layer.z, layer.d, layer.delta_d)
    return g.sum(axis=0) / batch


def ska_step(net: Network, x: Matrix, config: NetworkConfig, step: int,
             previous: StepMetrics | None = None, labels=None, n_classes: int | None = None,
             prev_d: Sequence[Matrix | None] | None = None) -> StepMetrics:
    """Run one learning step and return metrics of the pre-update state.

    ``previous`` supplies the running entropies to accumulate onto.
    ``prev_d`` overrides each layer's remembered decisions (minibatch mode).
    """
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    out = forward(net, x, prev_d)
    if step == 1 and prev_d is None:
        # no earlier pass exists, whatever the layers remember
        for lay in net.layers:
            lay.d_prev = lay.d.copy()
            lay.delta_d = np.zeros_like(lay.d)
    batch = _scale(config, x.shape[0])

    inputs = layer_inputs(net, x)
    updates = []
    deltas, cums, coss, norms = [], [], [], []
    for i, (lay, inp) in enumerate(zip(net.layers, inputs)):
        if np.max(np.abs(lay.z)) > DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"layer {i + 1} diverged at step {step}: |z| > {DIVERGENCE_LIMIT:g}",
                layer=i + 1, step=step)
        gw = weight_entropy_gradient(lay, inp, batch)
        gb = bias_entropy_gradient(lay, batch)
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise DivergenceError(f"non-finite entropy gradient in layer {i + 1} at step {step}",
                                  layer=i + 1, step=step)
        updates.append((gw, gb))

        dh = layer_step_entropy(lay.z, lay.delta_d, batch)
        deltas.append(dh)
        cums.append((previous.entropy_cum[i] if previous else 0.0) + dh)
        coss.append(cosine_alignment(lay.z, lay.delta_d))
        norms.append(frobenius_norm(lay.z))

    eta = config.learning_rate
    for lay, (gw, gb) in zip(net.layers, updates):
        lay.weights = lay.weights - eta * gw
        if not config.freeze_bias:
            lay.bias = lay.bias - eta * gb

    probs = None
    if labels is not None:
        probs = class_mean_probabilities(out, labels, n_classes or out.shape[1])
    return StepMetrics(step, deltas, cums, coss, norms, probs)


def _minibatches(n: int, size: int, seed: int) -> list[np.ndarray]:
    order = np.random.default_rng(seed).permutation(n)
    return [order[i:i + size] for i in range(0, n, size)]


def train(net: Network, data: Matrix, config: NetworkConfig, labels=None,
          n_classes: int | None = None) -> TrainingHistory:
    """Run ``config.steps_k`` learning steps on ``data``.

    Full-batch mode reuses the whole dataset every step. Minibatch mode
    cycles through a seeded partition; each minibatch measures its
    decision shift against the last pass over that same minibatch.
    """
    config.validate()
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError(f"training data must be a nonempty 2-D matrix, got {data.shape}")
    labels = None if labels is None else np.asarray(labels)
    net.reset_state()
    history = TrainingHistory()
    previous = None

    if config.batch_size is None or config.batch_size >= data.shape[0]:
        batches = None
    else:
        batches = _minibatches(data.shape[0], config.batch_size, config.seed)
        memory: dict[int, list[Matrix]] = {}

    for k in range(1, config.steps_k + 1):
        try:
            if batches is None:
                m = ska_step(net, data, config, k, previous, labels, n_classes)
            else:
                b = (k - 1) % len(batches)
                idx = batches[b]
                prev_d = memory.get(b, [None] * net.n_layers)
                m = ska_step(net, data[idx], config, k, previous,
                             None if labels is None else labels[idx], n_classes, prev_d)
                memory[b] = [lay.d for lay in net.layers]
        except DivergenceError:
            raise
        except (ValueError, FloatingPointError) as exc:
            raise DivergenceError(f"step {k}: {exc}", step=k) from exc
        log.debug("step %d: H=%s", k, m.entropy_cum)
        history.append(m)
        previous = m
    return history
