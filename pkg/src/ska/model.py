"""Layered sigmoid network holding per-step knowledge and decision state."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .tensor import Matrix, ShapeError, frobenius_norm, matmul, sigmoid

CHECKPOINT_FORMAT = "ska-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass
class LayerState:
    weights: Matrix  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)
    z: Matrix | None = None
    d: Matrix | None = None
    d_prev: Matrix | None = None
    delta_d: Matrix | None = None

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def reset_state(self) -> None:
        self.z = self.d = self.d_prev = self.delta_d = None


@dataclass
class Network:
    layers: list[LayerState]
    layer_sizes: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a network needs at least one layer")
        sizes = [self.layers[0].in_dim] + [lay.out_dim for lay in self.layers]
        for i in range(1, len(self.layers)):
            if self.layers[i].in_dim != self.layers[i - 1].out_dim:
                raise ShapeError(
                    f"layer {i} expects {self.layers[i].in_dim} inputs but layer "
                    f"{i - 1} emits {self.layers[i - 1].out_dim}")
        if self.layer_sizes and list(self.layer_sizes) != sizes:
            raise ShapeError(f"layer_sizes {self.layer_sizes} do not match weights {sizes}")
        self.layer_sizes = sizes

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def truncated(self, n_layers: int) -> "Network":
        """Copy of the bottom ``n_layers`` layers (parameters only)."""
        return Network([LayerState(lay.weights.copy(), lay.bias.copy())
                        for lay in self.layers[:n_layers]])

    def reset_state(self) -> None:
        for lay in self.layers:
            lay.reset_state()


def init_network(layer_sizes: Sequence[int], seed: int) -> Network:
    """Gaussian weights with std 1/sqrt(fan_in), zero biases."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ValueError(f"need an input size and at least one layer, got {sizes}")
    if any(s < 1 for s in sizes):
        raise ValueError(f"layer sizes must be >= 1, got {sizes}")
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_out, fan_in))
        layers.append(LayerState(w, np.zeros(fan_out)))
    return Network(layers, sizes)


def forward(net: Network, x: Matrix, prev_d: Sequence[Matrix | None] | None = None) -> Matrix:
    """Run the affine + sigmoid stack, recording z, d, d_prev and delta_d per layer.

    Each layer's ``d_prev`` is the ``d`` it recorded on the previous call,
    unless ``prev_d`` supplies one per layer (``None`` entries mean "no
    previous pass"). Without a previous pass of matching shape ``delta_d``
    is all zeros.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.layer_sizes[0]:
        raise ShapeError(f"forward: input shape {x.shape} does not fit input dim "
                         f"{net.layer_sizes[0]}")
    if prev_d is not None and len(prev_d) != net.n_layers:
        raise ValueError(f"prev_d has {len(prev_d)} entries for {net.n_layers} layers")
    h = x
    for i, lay in enumerate(net.layers):
        z = matmul(h, lay.weights.T) + lay.bias
        d = sigmoid(z)
        before = lay.d if prev_d is None else prev_d[i]
        if before is None or before.shape != d.shape:
            lay.d_prev = d.copy()
            lay.delta_d = np.zeros_like(d)
        else:
            lay.d_prev = before
            lay.delta_d = d - before
        lay.z, lay.d = z, d
        h = d
    return h


def layer_inputs(net: Network, x: Matrix) -> list[Matrix]:
    """Inputs seen by each layer on the last forward pass over ``x``."""
    return [x] + [lay.d for lay in net.layers[:-1]]


def snapshot_norms(net: Network) -> list[float]:
    """Frobenius norm of each layer's knowledge matrix from the last forward pass."""
    if any(lay.z is None for lay in net.layers):
        raise RuntimeError("snapshot_norms called before any forward pass")
    return [frobenius_norm(lay.z) for lay in net.layers]


def save_checkpoint(net: Network, path: str | Path) -> None:
    """Write layer sizes, weights and biases as JSON.

    Floats go through ``repr`` so a reload is bit-exact. Per-step state
    (z, d, ...) is not saved.
    """
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_sizes": net.layer_sizes,
        "layers": [{"weights": lay.weights.tolist(), "bias": lay.bias.tolist()}
                   for lay in net.layers],
    }
    Path(path).write_text(json.dumps(doc))


def load_checkpoint(path: str | Path) -> Network:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not an SKA checkpoint")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {doc.get('version')}")
    layers = [LayerState(np.asarray(lay["weights"], dtype=np.float64).reshape(o, i),
                         np.asarray(lay["bias"], dtype=np.float64))
              for lay, i, o in zip(doc["layers"], doc["layer_sizes"][:-1],
                                   doc["layer_sizes"][1:])]
    return Network(layers, doc["layer_sizes"])
