"""Benchmark report figures."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["save_benchmark_figure"]

_METRICS = ("precision", "recall", "f_measure")
_LABELS = ("Precision", "Recall", "F-measure")


def save_benchmark_figure(result, path) -> None:
    """Horizontal box plots of the per-trial metrics, one panel per arrow
    kind, medians drawn as red lines.  PNG output is byte-stable for a given
    matplotlib version (no timestamp metadata)."""
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.2), sharex=True)
    for ax, kind, title in zip(axes, ("bidirected", "directed"),
                               ("Latent confounders (bi-directed)", "Causality (directed)")):
        data = [[getattr(getattr(t, kind), m) for t in result.trials] for m in _METRICS]
        ax.boxplot(data, vert=False, tick_labels=_LABELS, widths=0.6,
                   medianprops={"color": "red", "linewidth": 1.5})
        ax.set_title(title, fontsize=10)
        ax.set_xlim(-0.02, 1.02)
        ax.grid(axis="x", alpha=0.3)
    fig.tight_layout()
    save_kwargs = {"dpi": 120}
    if str(path).lower().endswith(".png"):
        save_kwargs["metadata"] = {"Software": None}
    fig.savefig(path, **save_kwargs)
    plt.close(fig)
