"""Matplotlib figure output for the CLI report path."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_heatmap_figure(path, u: np.ndarray, row_order=None, col_order=None,
                        row_labels=None, col_labels=None) -> None:
    """Cluster-reordered heatmap of the fitted mean matrix, with cluster
    boundaries drawn when labels are given."""
    m = np.asarray(u, dtype=np.float64)
    if row_order is not None:
        m = m[np.asarray(row_order)]
    if col_order is not None:
        m = m[:, np.asarray(col_order)]
    fig, ax = plt.subplots(figsize=(6, 6), constrained_layout=True)
    vmax = float(np.abs(m - np.median(m)).max()) or 1.0
    im = ax.imshow(m, cmap="RdBu_r", aspect="auto",
                   vmin=np.median(m) - vmax, vmax=np.median(m) + vmax)
    fig.colorbar(im, ax=ax, shrink=0.8)
    if row_labels is not None and row_order is not None:
        lab = np.asarray(row_labels)[np.asarray(row_order)]
        for pos in np.nonzero(np.diff(lab))[0]:
            ax.axhline(pos + 0.5, color="k", lw=0.6)
    if col_labels is not None and col_order is not None:
        lab = np.asarray(col_labels)[np.asarray(col_order)]
        for pos in np.nonzero(np.diff(lab))[0]:
            ax.axvline(pos + 0.5, color="k", lw=0.6)
    ax.set_xlabel("columns (cluster order)")
    ax.set_ylabel("rows (cluster order)")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_cv_curve(path, grid, mse) -> None:
    """Held-out MSE against the penalty level, log-x when possible."""
    grid = np.asarray(grid, dtype=np.float64)
    mse = np.asarray(mse, dtype=np.float64)
    order = np.argsort(grid)
    fig, ax = plt.subplots(figsize=(5, 4), constrained_layout=True)
    plot = ax.semilogx if np.all(grid > 0) else ax.plot
    plot(grid[order], mse[order], "o-")
    best = grid[np.lexsort((grid, mse))[0]]
    ax.axvline(best, color="r", ls="--", lw=0.8, label=f"selected {best:g}")
    ax.set_xlabel("penalty level")
    ax.set_ylabel("held-out MSE")
    ax.legend()
    fig.savefig(path, dpi=150)
    plt.close(fig)
