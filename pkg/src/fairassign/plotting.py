"""Bar charts of mean envy pairs, written next to the experiment CSV."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .admission import ALGORITHMS, ExperimentResult  # noqa: E402

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    # fixed salt keeps SVG element ids identical across runs
    "svg.hashsalt": "fairassign",
}

COLORS = ("#4c72b0", "#55a868", "#c44e52", "#8172b2", "#ccb974", "#64b5cd")


def envy_bar_chart(results: Sequence[ExperimentResult], path: str | Path, title: str | None = None) -> Path:
    """One group per (ell, beta) cell, one bar per mechanism."""
    path = Path(path)
    labels = [f"ℓ={r.config.schools}\nβ={r.config.beta:g}" for r in results]
    width = 0.8 / len(ALGORITHMS)
    x = np.arange(len(results))
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(max(4.0, 1.1 * len(results) + 1.5), 3.2))
        ax = fig.add_subplot(1, 1, 1)
        for k, alg in enumerate(ALGORITHMS):
            heights = [float(r.mean(alg)) for r in results]
            ax.bar(x + (k - (len(ALGORITHMS) - 1) / 2) * width, heights, width, label=alg, color=COLORS[k])
        ax.set_xticks(x)
        ax.set_xticklabels(labels)
        ax.set_ylabel("mean stochastic envy pairs")
        if title is None and results:
            title = f"{results[0].config.bias_model} bias"
        if title:
            ax.set_title(title)
        ax.legend(ncol=len(ALGORITHMS), loc="upper left", fontsize=7)
        fig.tight_layout()
        fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    return path
