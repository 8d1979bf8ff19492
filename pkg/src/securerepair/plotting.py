"""Figures that accompany the bounds CSV."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analysis.bounds import BoundsReport  # noqa: E402


def plot_bounds(reports: Sequence[BoundsReport], path: str | Path, title: str | None = None) -> Path:
    """Grouped bars of lower bound, measured total and cap for each run."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(reports) + 2), 3.2))
    xs = range(len(reports))
    width = 0.27
    lower = [float(r.lower) if r.lower is not None else 0.0 for r in reports]
    measured = [r.measured for r in reports]
    upper = [float(r.upper) for r in reports]
    ax.bar([x - width for x in xs], lower, width, label="lower bound", color="#9ecae1")
    ax.bar(list(xs), measured, width, label="measured", color="#3182bd")
    ax.bar([x + width for x in xs], upper, width, label="cap", color="#fdae6b")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"run {i + 1}: {r.construction}\nn={r.n} z={r.z} W={r.W}" for i, r in enumerate(reports)], fontsize=8)
    ax.set_ylabel("symbols sent")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
