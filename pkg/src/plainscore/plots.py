"""Figure rendering for report outputs.

Every CLI report writes its delimited data first and then renders a small
matplotlib figure next to it. Figures are written through the Agg backend
with their date metadata stripped so repeated runs produce identical PNGs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_PNG_KWARGS = {"dpi": 150, "metadata": {"Date": None, "Software": None}}

ROLE_COLORS = {"abstract": "#1f77b4", "pls": "#d62728", "generated": "#2ca02c"}


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_PNG_KWARGS)
    plt.close(fig)


def roc_figure(points, auc: float, path: str | Path, title: str = "ROC") -> None:
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    ax.plot(xs, ys, color="#1f77b4", lw=1.8, label=f"AUC = {auc:.3f}")
    ax.plot([0, 1], [0, 1], color="#999999", lw=0.8, ls="--")
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.set_title(title)
    ax.legend(loc="lower right", frameon=False)
    fig.tight_layout()
    _save(fig, path)


def histogram_figure(
    values_by_role: dict[str, list[float]],
    path: str | Path,
    xlabel: str,
    bins=20,
    title: str = "",
) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for role in sorted(values_by_role):
        values = values_by_role[role]
        if not values:
            continue
        ax.hist(
            values,
            bins=bins,
            alpha=0.55,
            label=f"{role} (n={len(values)})",
            color=ROLE_COLORS.get(role),
        )
    ax.set_xlabel(xlabel)
    ax.set_ylabel("Documents")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)


def overlap_figure(means_by_series: dict[str, dict[str, float | None]], path: str | Path) -> None:
    """Grouped bars of mean n-gram overlap with the source, per series."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    orders = ["1", "2", "3", "4"]
    width = 0.8 / max(len(means_by_series), 1)
    for k, (series, means) in enumerate(sorted(means_by_series.items())):
        xs = [i + k * width for i in range(len(orders))]
        ys = [means.get(n) or 0.0 for n in orders]
        ax.bar(xs, ys, width=width, label=series)
    ax.set_xticks([i + width * (len(means_by_series) - 1) / 2 for i in range(len(orders))])
    ax.set_xticklabels([f"n={n}" for n in orders])
    ax.set_ylabel("Overlap with source")
    ax.set_ylim(0, 1)
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)


def weight_bar_figure(entries, path: str | Path, title: str, xlabel: str = "Weight") -> None:
    """Horizontal bars for (label, weight) pairs, heaviest at the top."""
    fig, ax = plt.subplots(figsize=(5.0, 0.3 * max(len(entries), 4) + 1.2))
    labels = [str(label) for label, _ in entries][::-1]
    values = [value for _, value in entries][::-1]
    colors = ["#d62728" if v < 0 else "#1f77b4" for v in values]
    ax.barh(range(len(values)), values, color=colors)
    ax.set_yticks(range(len(values)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
