"""Figure rendering for reachability reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Polygon as MplPolygon

__all__ = ["render_reach_figure"]


def render_reach_figure(step_samples, axes, path, title=None):
    """Render per-step polygon samples to an image file.

    ``step_samples`` maps step index to the list of polygon samples of that
    step's reach set (one per leaf when sampled per leaf).
    """
    fig, ax = plt.subplots(figsize=(6, 5))
    steps = sorted(step_samples)
    cmap = plt.get_cmap("viridis")
    for rank, k in enumerate(steps):
        color = cmap(rank / max(1, len(steps) - 1))
        for sample in step_samples[k]:
            if len(sample.vertices) >= 3:
                ax.add_patch(
                    MplPolygon(
                        sample.vertices,
                        closed=True,
                        facecolor=color,
                        edgecolor="black",
                        linewidth=0.4,
                        alpha=0.55,
                    )
                )
            elif len(sample.vertices) >= 1:
                ax.plot(*sample.vertices.T, ".", color=color, markersize=3)
    ax.autoscale_view()
    ax.relim()
    for samples in step_samples.values():
        for s in samples:
            if len(s.vertices):
                ax.update_datalim(s.vertices)
    ax.autoscale_view()
    ax.set_xlabel(f"x{axes[0] + 1}")
    ax.set_ylabel(f"x{axes[1] + 1}")
    if title:
        ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
