"""Static matplotlib figures for the command-line outputs (SVG or PNG by suffix)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight", dpi=120)
    plt.close(fig)
    return path


def plot_grid(xs, ys, values, path, title: str = "", label: str = "value") -> Path:
    """Heat map of ``values[j, i]`` at ``(xs[i], ys[j])``."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    mesh = ax.pcolormesh(xs, ys, np.asarray(values), shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title(title)
    return _save(fig, path)


def plot_samples(configs, length: float, width: float, path, title: str = "") -> Path:
    """Scatter of sampled configurations in the rectangle, one color per sample."""
    fig, ax = plt.subplots(figsize=(5.5, 5.5 * width / length if length else 5.5))
    colors = plt.cm.tab10(np.linspace(0, 1, 10))
    for k, cfg in enumerate(configs):
        pts = np.asarray(cfg, dtype=float).reshape(-1, 2)
        ax.scatter(pts[:, 0], pts[:, 1], s=14, color=colors[k % 10])
    ax.set_xlim(0, length)
    ax.set_ylim(0, width)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    return _save(fig, path)


def plot_series(xvals, series: dict, path, xlabel: str, ylabel: str, title: str = "", logy: bool = True) -> Path:
    """Line plot of one or more error/energy columns against a scan variable."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for name, vals in series.items():
        vals = np.asarray(vals, dtype=float)
        shown = np.abs(vals) if logy else vals
        if logy:
            shown = np.maximum(shown, 1e-17)
        ax.plot(xvals, shown, marker="o", label=name)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    return _save(fig, path)
