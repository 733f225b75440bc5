"""Tidy CSV / JSON writers for training histories and run manifests."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .metrics import TrainingHistory, entropy_vs_norm_series

METRICS_COLUMNS = ["step", "layer", "entropy_delta_bits", "entropy_cum_bits",
                   "cos_alignment", "frob_norm"]
CLASS_COLUMNS = ["step", "class", "mean_prob"]
TRAJECTORY_COLUMNS = ["layer", "step", "frob_norm", "entropy_cum_bits"]


def _fmt(x) -> str:
    # repr round-trips exactly and is stable across runs
    return repr(float(x)) if isinstance(x, float) else str(x)


def _write(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def metrics_rows(history: TrainingHistory):
    for m in history:
        for i in range(m.n_layers):
            yield (m.step, i + 1, m.entropy_delta[i], m.entropy_cum[i],
                   m.cos_alignment[i], m.frob_norm[i])


def class_rows(history: TrainingHistory):
    for m in history:
        for c, p in enumerate(m.class_probs or []):
            yield (m.step, c, p)


def trajectory_rows(history: TrainingHistory):
    for i in range(history.n_layers):
        for m, (norm, h) in zip(history, entropy_vs_norm_series(history, i)):
            yield (i + 1, m.step, norm, h)


def write_csvs(history: TrainingHistory, out_dir) -> list[Path]:
    out = Path(out_dir)
    paths = [out / "metrics.csv", out / "class_probs.csv", out / "entropy_vs_norm.csv"]
    _write(paths[0], METRICS_COLUMNS, metrics_rows(history))
    _write(paths[1], CLASS_COLUMNS, class_rows(history))
    _write(paths[2], TRAJECTORY_COLUMNS, trajectory_rows(history))
    return paths


def write_history_json(history: TrainingHistory, out_dir) -> Path:
    path = Path(out_dir) / "history.json"
    doc = {
        "metrics": [dict(zip(METRICS_COLUMNS, r)) for r in metrics_rows(history)],
        "class_probs": [dict(zip(CLASS_COLUMNS, r)) for r in class_rows(history)],
        "entropy_vs_norm": [dict(zip(TRAJECTORY_COLUMNS, r)) for r in trajectory_rows(history)],
    }
    # NaN marks an empty class; emitted as null to stay valid JSON
    text = json.dumps(doc, indent=1, allow_nan=True).replace("NaN", "null")
    path.write_text(text)
    return path


def write_manifest(manifest: dict, out_dir) -> Path:
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path
