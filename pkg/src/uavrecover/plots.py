"""Per-density comparison figures rendered from a sweep summary."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

LABELS = {"c3run": "C3RUN", "rim": "RIM", "ledir": "LeDiR", "ccbridges": "Cooperative Bridges"}
MARKERS = {"c3run": "o", "rim": "s", "ledir": "^", "ccbridges": "D"}

FIGURES = (
    ("nodes_moved.png", "mean_nodes_moved", "Number of UAVs moved"),
    ("total_distance.png", "mean_distance_m", "Total moving distance (m)"),
    ("recovery_time.png", "mean_ticks", "Recovery time (ticks)"),
    ("success_ratio.png", "success_ratio", "Success ratio"),
)


def _series(summary, metric):
    by_algo: dict[str, list] = {}
    for row in summary:
        by_algo.setdefault(row.algo, []).append((row.n_nodes, getattr(row, metric)))
    return {a: sorted(pts) for a, pts in by_algo.items()}


def render_figures(summary: Sequence, outdir, dpi: int = 120) -> list[Path]:
    """Write one line chart per metric into ``outdir``; returns the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for filename, metric, ylabel in FIGURES:
        fig, ax = plt.subplots(figsize=(5.5, 3.8))
        for algo, pts in sorted(_series(summary, metric).items()):
            if metric == "success_ratio" or algo != "ccbridges":
                xs, ys = zip(*pts)
                ax.plot(xs, ys, marker=MARKERS.get(algo, "."), label=LABELS.get(algo, algo))
        ax.set_xlabel("Number of UAVs")
        ax.set_ylabel(ylabel)
        if metric == "success_ratio":
            ax.set_ylim(-0.05, 1.05)
        ax.grid(True, alpha=0.3)
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        path = outdir / filename
        # fixed metadata keeps repeated renders byte-identical
        fig.savefig(path, dpi=dpi, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written
