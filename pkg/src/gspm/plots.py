"""Static SVG histogram of a comparison report."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def histogram_svg(report, path, title: str = "") -> None:
    """Overlay the empirical and limit-law histograms, density-normalized."""
    edges = report.bin_edges
    widths = edges[1:] - edges[:-1]
    centers = 0.5 * (edges[:-1] + edges[1:])

    def density(counts):
        total = counts.sum()
        if total == 0:
            return counts.astype(float)
        return counts / (total * widths)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.bar(
        centers,
        density(report.empirical_counts),
        width=widths,
        alpha=0.55,
        label="sampled statistics",
        color="#4878cf",
        edgecolor="none",
    )
    ax.step(
        edges,
        list(density(report.limit_counts)) + [0.0],
        where="post",
        color="#d65f5f",
        linewidth=1.8,
        label="limit law",
    )
    ax.set_xlabel("statistic")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    ax.text(
        0.02,
        0.95,
        f"KS = {report.ks_distance:.4f}",
        transform=ax.transAxes,
        va="top",
        fontsize=9,
    )
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
