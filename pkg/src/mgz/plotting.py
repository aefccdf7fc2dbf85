"""PNG figures for CLI reports (headless backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_trace(rows, path, title: str = "") -> None:
    """Empirical event probability against n, with the limit as a dashed line."""
    ns = [r.n for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, [float(r.empirical) for r in rows], "o-", label="empirical")
    ax.plot(ns, [float(r.limit) for r in rows], "--", label="limit")
    ax.set_xlabel("n")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.05, 1.05)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_breakdown(parts: dict, path, title: str = "") -> None:
    """Horizontal bar chart of bit counts per stream section."""
    fig, ax = plt.subplots(figsize=(6, 3))
    names = list(parts)
    ax.barh(names, [parts[k] for k in names])
    ax.set_xlabel("bits")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
