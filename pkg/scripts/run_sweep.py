"""Train the 4-layer synthetic setup over several seeds and learning rates.

Writes one CLI-style output directory per (lr, seed) under --out and a
summary.csv with final per-layer entropies and norms.

    python scripts/run_sweep.py --lrs 0.05,0.1,0.3 --seeds 0,1,2 --out runs/sweep
"""
import argparse
import csv
from pathlib import Path

from ska.data import synthetic_blobs
from ska.export import write_csvs
from ska.learner import NetworkConfig, train


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--lrs", default="0.05,0.1,0.3")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--layers", default="784,128,64,32,10")
    p.add_argument("--out", default="runs/sweep")
    args = p.parse_args()

    sizes = [int(s) for s in args.layers.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for lr in (float(v) for v in args.lrs.split(",")):
        for seed in (int(v) for v in args.seeds.split(",")):
            ds = synthetic_blobs(10, 100, sizes[0], 1.0, seed)
            cfg = NetworkConfig(sizes, args.steps, lr, seed=seed)
            hist = train(cfg.build_network(), ds.features, cfg, ds.labels, ds.n_classes)
            run_dir = out / f"lr{lr:g}_seed{seed}"
            run_dir.mkdir(exist_ok=True)
            write_csvs(hist, run_dir)
            last = hist[-1]
            for layer in range(last.n_layers):
                summary.append([lr, seed, layer + 1, last.entropy_cum[layer],
                                min(hist.series("entropy_cum", layer)), last.frob_norm[layer]])
            print(f"lr={lr:g} seed={seed}: H={last.network_entropy:.3f} bits")
    with open(out / "summary.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["lr", "seed", "layer", "final_entropy_bits", "min_entropy_bits", "final_frob_norm"])
        w.writerows(summary)


if __name__ == "__main__":
    main()
