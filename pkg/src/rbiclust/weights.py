"""Sparse k-nearest-neighbour fusion weights with a truncated (Huber-style)
squared distance, for rows of a matrix; column weights come from the
transpose."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DegenerateScaleError, as_matrix, mad

DEFAULT_XI = 0.001


@dataclass(frozen=True)
class WeightedEdgeList:
    """Undirected weighted fusion graph over n_nodes rows (or columns).

    edges hold (i, j, w) with i < j and w in (0, 1]; pairs outside the
    union kNN relation are omitted (zero weight).
    """

    n_nodes: int
    i: np.ndarray = field(repr=False)  # int array, edge tails
    j: np.ndarray = field(repr=False)  # int array, edge heads, i < j
    w: np.ndarray = field(repr=False)  # float array in (0, 1]
    k: int = 0
    xi: float = DEFAULT_XI
    delta: float = math.inf

    @property
    def n_edges(self) -> int:
        return len(self.w)

    def pairs(self):
        return zip(self.i.tolist(), self.j.tolist(), self.w.tolist())


def truncated_sq_distances(x: np.ndarray, delta: float) -> np.ndarray:
    """All-pairs sum_j min((x_aj - x_bj)^2, delta^2) between rows of x."""
    n = x.shape[0]
    d2 = delta * delta
    out = np.zeros((n, n))
    for a in range(n):
        diff2 = (x[a] - x) ** 2
        if math.isfinite(d2):
            np.minimum(diff2, d2, out=diff2)
        out[a] = diff2.sum(axis=1)
    return out


def knn_huber_weights(x, k: int, xi: float, delta: float) -> WeightedEdgeList:
    """Sparse fusion weights between rows of x.

    A pair (a, b) is an edge when b is among a's k nearest rows or vice
    versa (union symmetrization), nearness measured by the truncated
    squared distance sum_j min((x_aj - x_bj)^2, delta^2). The weight is
    exp(-xi * distance). kNN ties are broken by smaller row index so the
    graph is deterministic.
    """
    x = as_matrix(x)
    n = x.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, n_rows-1], got k={k} for n_rows={n}")
    if not xi > 0 or not delta > 0:
        raise ValueError("xi and delta must be positive")

    dist = truncated_sq_distances(x, delta)
    np.fill_diagonal(dist, np.inf)
    # Stable argsort on distance keeps the smaller index first among ties.
    order = np.argsort(dist, axis=1, kind="stable")
    neighbors = order[:, :k]

    mask = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), k)
    mask[rows, neighbors.ravel()] = True
    mask |= mask.T  # union of the two directed kNN relations

    iu, ju = np.triu_indices(n, k=1)
    keep = mask[iu, ju]
    ei, ej = iu[keep], ju[keep]
    w = np.exp(-xi * dist[ei, ej])
    return WeightedEdgeList(n_nodes=n, i=ei, j=ej, w=w, k=k, xi=xi, delta=delta)


def default_weight_params(x) -> tuple[float, float]:
    """Default (xi, delta) = (0.001, 1.345 * MAD of x)."""
    scale = mad(x)
    if scale <= 0:
        raise DegenerateScaleError("matrix MAD is zero; cannot set delta")
    return DEFAULT_XI, 1.345 * scale
