"""Per-step training records and the quantities plotted from them."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .entropy import EntropyRecord
from .tensor import Matrix, ShapeError, flat_dot, frobenius_norm

DEGENERATE_NORM = 1e-15
MISSING = float("nan")  # class with no samples in the batch


def cosine_alignment(z: Matrix, delta_d: Matrix) -> float:
    """Cosine of the angle between flattened ``z`` and ``delta_d``.

    Defined as 0 when either norm is below 1e-15 (always the case on the
    first step, where ``delta_d`` is zero).
    """
    if z.shape != delta_d.shape:
        raise ShapeError(f"cosine_alignment: shape mismatch {z.shape} vs {delta_d.shape}")
    nz, nd = frobenius_norm(z), frobenius_norm(delta_d)
    if nz < DEGENERATE_NORM or nd < DEGENERATE_NORM:
        return 0.0
    c = flat_dot(z, delta_d) / (nz * nd)
    return min(1.0, max(-1.0, c))


def class_mean_probabilities(output: Matrix, labels, n_classes: int) -> list[float]:
    """Mean of output neuron ``c`` over the samples whose label is ``c``.

    Classes without samples get ``nan``.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (output.shape[0],):
        raise ShapeError(f"{labels.shape[0]} labels for {output.shape[0]} output rows")
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise ValueError(f"labels must lie in [0, {n_classes})")
    if output.shape[1] < n_classes:
        raise ShapeError(f"output has {output.shape[1]} neurons for {n_classes} classes")
    means = []
    for c in range(n_classes):
        rows = output[labels == c, c]
        means.append(float(rows.mean()) if rows.size else MISSING)
    return means


@dataclass
class StepMetrics:
    step: int
    entropy_delta: list[float]
    entropy_cum: list[float]
    cos_alignment: list[float]
    frob_norm: list[float]
    class_probs: list[float] | None = None
    network_entropy: float = 0.0

    def __post_init__(self):
        n = len(self.entropy_delta)
        if not (len(self.entropy_cum) == len(self.cos_alignment) == len(self.frob_norm) == n):
            raise ValueError("per-layer metric lists differ in length")
        total = 0.0
        for h in self.entropy_cum:
            total += h
        self.network_entropy = total

    @property
    def n_layers(self) -> int:
        return len(self.entropy_delta)


@dataclass
class TrainingHistory:
    steps: list[StepMetrics] = field(default_factory=list)

    def append(self, m: StepMetrics) -> None:
        if self.steps and m.step <= self.steps[-1].step:
            raise ValueError(f"step {m.step} recorded after step {self.steps[-1].step}")
        self.steps.append(m)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i) -> StepMetrics:
        return self.steps[i]

    @property
    def n_layers(self) -> int:
        return self.steps[0].n_layers if self.steps else 0

    def series(self, name: str, layer: int) -> list[float]:
        """One per-layer field (e.g. ``"entropy_cum"``) across all steps."""
        return [getattr(m, name)[layer] for m in self.steps]

    def entropy_records(self) -> list[EntropyRecord]:
        return [EntropyRecord(i, m.step, m.entropy_delta[i], m.entropy_cum[i])
                for m in self.steps for i in range(m.n_layers)]

    def to_dict(self) -> dict:
        return {"steps": [asdict(m) for m in self.steps]}

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainingHistory":
        h = cls()
        for s in doc["steps"]:
            s = dict(s)
            s.pop("network_entropy", None)
            h.append(StepMetrics(**s))
        return h


def entropy_vs_norm_series(history: TrainingHistory, layer: int) -> list[tuple[float, float]]:
    """(frobenius norm, cumulative entropy) pairs for one layer, in step order."""
    if not len(history):
        raise ValueError("empty history")
    if not 0 <= layer < history.n_layers:
        raise IndexError(f"layer {layer} out of range for {history.n_layers} layers")
    return [(m.frob_norm[layer], m.entropy_cum[layer]) for m in history]


def is_missing(x: float) -> bool:
    return isinstance(x, float) and math.isnan(x)
