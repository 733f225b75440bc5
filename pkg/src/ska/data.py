"""Datasets: MNIST-style IDX files and seeded synthetic blobs."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


class IdxError(ValueError):
    def __init__(self, path, offset: int, msg: str):
        super().__init__(f"{path}: {msg} (byte offset {offset})")
        self.path = str(path)
        self.offset = offset


class BadMagicError(IdxError):
    pass


class TruncatedError(IdxError):
    pass


class CountMismatchError(IdxError):
    pass


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray  # (samples, dims), values in [0, 1]
    labels: np.ndarray  # (samples,) int
    n_classes: int

    def __post_init__(self):
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError(f"{self.labels.shape[0]} labels for {self.features.shape[0]} samples")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ValueError(f"labels must lie in [0, {self.n_classes})")

    def __len__(self) -> int:
        return self.features.shape[0]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.n_classes)


def _read_idx(path, magic: int, ndim: int) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    header = 4 + 4 * ndim
    if len(raw) < 4:
        raise TruncatedError(path, len(raw), "file shorter than the 4-byte magic")
    (found,) = struct.unpack(">I", raw[:4])
    if found != magic:
        raise BadMagicError(path, 0, f"bad magic 0x{found:08x}, expected 0x{magic:08x}")
    if len(raw) < header:
        raise TruncatedError(path, len(raw), f"header needs {header} bytes, file has {len(raw)}")
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    size = int(np.prod(dims, dtype=np.int64))
    if len(raw) < header + size:
        raise TruncatedError(path, len(raw),
                             f"payload needs {size} bytes after the header, found {len(raw) - header}")
    return np.frombuffer(raw, dtype=np.uint8, count=size, offset=header).reshape(dims)


def load_idx(image_path, label_path, n_classes: int | None = None) -> Dataset:
    """Load an IDX image/label pair; pixels are scaled by 1/255 and flattened row-major."""
    images = _read_idx(image_path, IMAGE_MAGIC, 3)
    labels = _read_idx(label_path, LABEL_MAGIC, 1)
    if images.shape[0] != labels.shape[0]:
        raise CountMismatchError(label_path, 4,
                                 f"{labels.shape[0]} labels for {images.shape[0]} images")
    features = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    labels = labels.astype(np.int64)
    if n_classes is None:
        n_classes = int(labels.max()) + 1 if labels.size else 0
    return Dataset(features, labels, n_classes)


def write_idx_images(path, images) -> None:
    images = np.asarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ValueError(f"images must be (count, rows, cols), got {images.shape}")
    Path(path).write_bytes(struct.pack(">4I", IMAGE_MAGIC, *images.shape) + images.tobytes())


def write_idx_labels(path, labels) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    Path(path).write_bytes(struct.pack(">2I", LABEL_MAGIC, labels.shape[0]) + labels.tobytes())


def minmax_scale(x: np.ndarray) -> np.ndarray:
    """Scale all entries jointly into [0, 1]; a constant matrix maps to zeros."""
    lo, hi = float(x.min()), float(x.max())
    if hi - lo == 0.0:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def synthetic_blobs(n_classes: int = 10, per_class: int = 100, dims: int = 784,
                    spread: float = 1.0, seed: int = 0, normalize: bool = True) -> Dataset:
    """Gaussian blobs around seeded random unit directions, one per class.

    Samples are ordered class by class. With ``normalize`` the features are
    min-max scaled into [0, 1].
    """
    if n_classes < 1 or per_class < 1 or dims < 1:
        raise ValueError("n_classes, per_class and dims must all be >= 1")
    if not spread > 0:
        raise ValueError(f"spread must be > 0, got {spread}")
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_classes, dims))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    centers *= np.sqrt(dims)  # unit variance per coordinate on average
    labels = np.repeat(np.arange(n_classes), per_class)
    x = centers[labels] + spread * rng.normal(size=(labels.size, dims))
    if normalize:
        x = minmax_scale(x)
    return Dataset(x, labels, n_classes)


def train_test_split(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    order = np.random.default_rng(seed).permutation(len(ds))
    n_test = int(round(test_fraction * len(ds)))
    return ds.subset(np.sort(order[n_test:])), ds.subset(np.sort(order[:n_test]))
