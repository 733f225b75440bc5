"""Command line entry point: ``ska train`` and ``ska verify``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import subprocess
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import verify
from .data import Dataset, IdxError, load_idx, synthetic_blobs
from .export import write_csvs, write_history_json, write_manifest
from .learner import DivergenceError, NetworkConfig, train
from .model import save_checkpoint

log = logging.getLogger("ska")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2, 3
LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    data: str = "synthetic"
    idx_images: str | None = None
    idx_labels: str | None = None
    n_classes: int = 10
    per_class: int = 100
    spread: float = 1.0
    out: str = "runs/latest"
    format: str = "csv"

    def validate(self) -> None:
        if self.data not in ("idx", "synthetic"):
            raise ConfigError(f"data must be 'idx' or 'synthetic', got {self.data!r}")
        has_idx = self.idx_images is not None or self.idx_labels is not None
        if self.data == "synthetic" and has_idx:
            raise ConfigError("specify exactly one data source: idx paths given with data=synthetic")
        if self.data == "idx" and (self.idx_images is None or self.idx_labels is None):
            raise ConfigError("data=idx needs both --idx-images and --idx-labels")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.network.layer_sizes[-1] < self.n_classes:
            raise ConfigError(f"output layer has {self.network.layer_sizes[-1]} neurons "
                              f"for {self.n_classes} classes")

    def to_dict(self) -> dict:
        return asdict(self)


# config-file key -> (target, attribute); target "net" means NetworkConfig
_KEYS = {
    "layers": ("net", "layer_sizes"), "steps": ("net", "steps_k"),
    "lr": ("net", "learning_rate"), "seed": ("net", "seed"),
    "batch_size": ("net", "batch_size"), "clamp_eps": ("net", "clamp_eps"),
    "batch_average": ("net", "batch_average"), "freeze_bias": ("net", "freeze_bias"),
}
_KEYS.update({f.name: ("run", f.name) for f in fields(RunConfig) if f.name != "network"})
_KEYS.update({f.name: ("net", f.name) for f in fields(NetworkConfig)})


def _parse_layers(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--layers expects comma-separated ints: {exc}")


def read_config_file(path) -> dict:
    """Flat key/value settings from a TOML file or an earlier run's manifest.json."""
    path = Path(path)
    try:
        if path.suffix == ".json":
            doc = json.loads(path.read_text())
            if "config" in doc:  # manifest: flatten run + network settings
                cfg = dict(doc["config"])
                cfg.update(cfg.pop("network", {}))
                return cfg
            return doc
        return tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}")


def resolve_config(file_values: dict, overrides: dict) -> RunConfig:
    """Merge file settings with command-line overrides (flags win)."""
    net_kw, run_kw = {}, {}
    for source in (file_values, overrides):
        for key, value in source.items():
            if value is None:
                continue
            if key not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            target, attr = _KEYS[key]
            (net_kw if target == "net" else run_kw)[attr] = value
    try:
        cfg = RunConfig(network=NetworkConfig(**net_kw), **run_kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))
    cfg.validate()
    return cfg


def load_dataset(cfg: RunConfig) -> Dataset:
    if cfg.data == "idx":
        for p in (cfg.idx_images, cfg.idx_labels):
            if not Path(p).is_file():
                raise ConfigError(f"IDX file not found: {p}")
        try:
            ds = load_idx(cfg.idx_images, cfg.idx_labels, cfg.n_classes)
        except IdxError as exc:
            raise ConfigError(str(exc))
    else:
        ds = synthetic_blobs(cfg.n_classes, cfg.per_class, cfg.network.layer_sizes[0],
                             cfg.spread, cfg.network.seed)
    if ds.features.shape[1] != cfg.network.layer_sizes[0]:
        raise ConfigError(f"data has {ds.features.shape[1]} features but the input layer "
                          f"expects {cfg.network.layer_sizes[0]}")
    return ds


def package_version() -> str:
    from importlib.metadata import PackageNotFoundError, version
    try:
        base = version("artifact")
    except PackageNotFoundError:
        base = "unknown"
    try:
        desc = subprocess.run(["git", "describe", "--always", "--dirty"],
                              cwd=Path(__file__).parent, capture_output=True,
                              text=True, timeout=5)
        if desc.returncode == 0 and desc.stdout.strip():
            return f"{base}+{desc.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return base


def cmd_train(cfg: RunConfig) -> int:
    ds = load_dataset(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    net = cfg.network.build_network()
    log.info("training %s on %d samples for %d steps", cfg.network.layer_sizes, len(ds),
             cfg.network.steps_k)
    try:
        history = train(net, ds.features, cfg.network, ds.labels, ds.n_classes)
    except DivergenceError as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED

    if cfg.format == "csv":
        written = write_csvs(history, out)
    else:
        written = [write_history_json(history, out)]
    save_checkpoint(net, out / "checkpoint.json")
    written.append(out / "checkpoint.json")
    manifest = {
        "version": package_version(),
        "seed": cfg.network.seed,
        "config": cfg.to_dict(),
        "data": {"samples": len(ds), "dims": int(ds.features.shape[1]),
                 "n_classes": ds.n_classes},
        "outputs": sorted(p.name for p in written) + ["manifest.json"],
    }
    write_manifest(manifest, out)
    final = history[-1]
    log.info("done: network entropy %.6g bits", final.network_entropy)
    print(f"wrote {len(written) + 1} files to {out}")
    return EXIT_OK


def cmd_verify(checks=None) -> int:
    results = verify.run_all() if checks is None else checks()
    width = max(len(r.name) for r in results)
    print(f"{'check'.ljust(width)}  {'max deviation':>14}  {'tolerance':>9}  result")
    for r in results:
        print(f"{r.name.ljust(width)}  {r.max_deviation:14.3e}  {r.tolerance:9.0e}  "
              f"{'PASS' if r.passed else 'FAIL'}")
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"FAILED: {r.name} (max deviation {r.max_deviation:.3e} > {r.tolerance:g})",
              file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ska", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a network and export metric histories")
    t.add_argument("--config", help="TOML settings file, or a previous run's manifest.json")
    t.add_argument("--layers", type=_parse_layers, help="layer sizes, input first, e.g. 784,128,10")
    t.add_argument("--steps", type=int, help="number of learning steps K")
    t.add_argument("--lr", type=float, help="learning rate")
    t.add_argument("--seed", type=int)
    t.add_argument("--data", choices=["idx", "synthetic"])
    t.add_argument("--idx-images")
    t.add_argument("--idx-labels")
    t.add_argument("--n-classes", type=int)
    t.add_argument("--per-class", type=int, help="synthetic samples per class")
    t.add_argument("--spread", type=float, help="synthetic within-class noise std")
    t.add_argument("--batch-size", type=int, help="rotate minibatches of this size")
    t.add_argument("--freeze-bias", action="store_true", default=None)
    t.add_argument("--no-batch-average", dest="batch_average", action="store_false",
                   default=None, help="sum entropies over samples instead of averaging")
    t.add_argument("--out", help="output directory")
    t.add_argument("--format", choices=["csv", "json"])

    sub.add_parser("verify", help="check the analytic entropy identities")
    return p


def main(argv=None) -> int:
    level = os.environ.get("SKA_LOG_LEVEL", "warn").lower()
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(LOG_LEVELS.get(level, logging.WARNING))
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify()

    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        if args.idx_images or args.idx_labels:
            file_values.pop("data", None)
            file_values.setdefault("data", "idx")
        cfg = resolve_config(file_values, overrides)
        return cmd_train(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
