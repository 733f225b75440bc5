"""Plot the CSVs written by ``ska train`` (needs matplotlib).

    python scripts/plot_run.py runs/synthetic

Produces entropy.png, cosine.png, class_probs.png, frob_norm.png and
entropy_vs_norm.png next to the CSVs.
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def per_layer(df, column, ylabel, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    for layer, g in df.groupby("layer"):
        ax.plot(g["step"], g[column], label=f"layer {layer}")
    ax.set_xlabel("step")
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def main(run_dir):
    run = Path(run_dir)
    m = pd.read_csv(run / "metrics.csv")
    per_layer(m, "entropy_cum_bits", "cumulative entropy (bits)", run / "entropy.png")
    per_layer(m, "cos_alignment", "cos(z, dD)", run / "cosine.png")
    per_layer(m, "frob_norm", "||z||_F", run / "frob_norm.png")

    probs = pd.read_csv(run / "class_probs.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    for c, g in probs.groupby("class"):
        ax.plot(g["step"], g["mean_prob"], label=f"class {c}")
    ax.set_xlabel("step")
    ax.set_ylabel("mean output probability")
    ax.legend(ncol=2, fontsize="small")
    fig.tight_layout()
    fig.savefig(run / "class_probs.png", dpi=120)
    plt.close(fig)

    traj = pd.read_csv(run / "entropy_vs_norm.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    for layer, g in traj.groupby("layer"):
        ax.plot(g["frob_norm"], g["entropy_cum_bits"], marker=".", label=f"layer {layer}")
    ax.set_xlabel("||z||_F")
    ax.set_ylabel("cumulative entropy (bits)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(run / "entropy_vs_norm.png", dpi=120)
    plt.close(fig)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "runs/synthetic")
