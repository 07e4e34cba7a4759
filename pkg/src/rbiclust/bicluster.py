"""Checkerboard mean estimation: alternate one-way row and column fusion
solves with Dykstra-style correction matrices until the two directional
estimates agree, then read clusters off the fused difference supports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .core import SolverConfig, as_matrix
from .huber import (
    DegenerateResidualError,
    TauPolicy,
    huber_loss,
    solve_tau,
    tau_mad_default,
)
from .oneway import DifferenceOperator, oneway_objective, solve_oneway
from .weights import WeightedEdgeList


@dataclass
class FitResult:
    u_hat: np.ndarray
    converged: bool
    outer_iterations: int
    discrepancy_trajectory: list[float]
    tau_trajectory: list[float]
    objective: float
    row_v_support: np.ndarray = field(repr=False)
    col_v_support: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class BiclusterLabels:
    """0-based contiguous row and column cluster assignments."""

    row_labels: np.ndarray
    col_labels: np.ndarray

    @property
    def n_row_clusters(self) -> int:
        return int(self.row_labels.max()) + 1

    @property
    def n_col_clusters(self) -> int:
        return int(self.col_labels.max()) + 1


def objective(
    x,
    u,
    lam: float,
    tau: float,
    row_weights: WeightedEdgeList,
    col_weights: WeightedEdgeList,
) -> float:
    """Total Huber cost plus the weighted row-pair and column-pair fusion
    penalties of the estimate u."""
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if x.shape != u.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {u.shape}")
    val = float(huber_loss(x - u, tau).sum())
    for g, m in ((row_weights, u), (col_weights, u.T)):
        if g.n_edges:
            diffs = m[np.asarray(g.i)] - m[np.asarray(g.j)]
            val += lam * float(np.asarray(g.w) @ np.linalg.norm(diffs, axis=1))
    return val


def _canonical_orientation(x: np.ndarray) -> bool:
    """True when the fit should run on x transposed.

    The outer loop solves columns first, so its raw output is not exactly
    transpose-equivariant; fixing a content-based canonical orientation
    makes fit(X) and fit(X^T) bitwise mirror images. Taller-than-wide
    matrices run as given; square ties are broken lexicographically.
    """
    n, p = x.shape
    if n != p:
        return n < p
    a, b = x.ravel(), x.T.ravel()
    neq = np.nonzero(a != b)[0]
    if neq.size == 0:
        return False
    return bool(a[neq[0]] < b[neq[0]])


def fit_bicluster(
    x,
    row_weights: WeightedEdgeList,
    col_weights: WeightedEdgeList,
    lam: float,
    tau_policy: TauPolicy = TauPolicy(),
    cfg: SolverConfig = SolverConfig(),
) -> FitResult:
    """Fit the checkerboard mean estimate of x at penalty level lam.

    Alternates a column-direction one-way solve (on the transpose) and a
    row-direction solve, each corrected by an accumulated discrepancy
    matrix, until the two estimates agree in Frobenius norm below
    outer_tol * max(1, ||x||_F). Under the "auto" tau policy the Huber
    transition point is re-solved from the current residuals after every
    outer iteration and shared by both directional solves of the next one.
    """
    x = as_matrix(x)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if row_weights.n_nodes != x.shape[0] or col_weights.n_nodes != x.shape[1]:
        raise ValueError("weight graphs do not match the matrix shape")

    if _canonical_orientation(x):
        inner = fit_bicluster(x.T, col_weights, row_weights, lam, tau_policy, cfg)
        return FitResult(
            u_hat=inner.u_hat.T,
            converged=inner.converged,
            outer_iterations=inner.outer_iterations,
            discrepancy_trajectory=inner.discrepancy_trajectory,
            tau_trajectory=inner.tau_trajectory,
            objective=inner.objective,
            row_v_support=inner.col_v_support,
            col_v_support=inner.row_v_support,
        )

    n, p = x.shape
    row_op = DifferenceOperator(row_weights)
    col_op = DifferenceOperator(col_weights)

    if tau_policy.mode == "fixed":
        tau = tau_policy.fixed_value
    else:
        tau = tau_mad_default(x)
    floor = tau_policy.floor
    if floor is None:
        floor = max(1e-4 * tau / 1.345, 1e-12)

    u = x.copy()
    rt = x.copy()  # transpose of the column-direction estimate, kept n x p
    pmat = np.zeros((n, p))
    qt = np.zeros((n, p))  # transpose of the column correction matrix

    taus = [tau]
    discs: list[float] = []
    eps = cfg.outer_tol * max(1.0, float(np.linalg.norm(x)))
    converged = False
    row_support = np.zeros(row_op.n_edges, dtype=bool)
    col_support = np.zeros(col_op.n_edges, dtype=bool)
    it = 0

    for it in range(1, cfg.outer_max_iter + 1):
        col_res = solve_oneway((u + pmat).T, col_weights, lam, tau, cfg, op=col_op)
        rt_new = col_res.u.T
        pmat = pmat + u - rt_new
        rt = rt_new
        row_res = solve_oneway(rt + qt, row_weights, lam, tau, cfg, op=row_op)
        u = row_res.u
        qt = qt + rt - u
        row_support = row_res.v_support
        col_support = col_res.v_support

        disc = float(np.linalg.norm(u - rt))
        discs.append(disc)
        if disc < eps:
            converged = True

        if tau_policy.mode == "auto":
            s = min(int(row_support.sum()), int(col_support.sum()))
            s = min(s, n * p - 1)
            try:
                tau = solve_tau(x - u, s, n, p, floor=floor)
            except DegenerateResidualError:
                pass  # keep the previous tau
            taus.append(tau)

        if converged:
            break

    obj = objective(x, u, lam, tau, row_weights, col_weights)
    return FitResult(
        u_hat=u,
        converged=converged,
        outer_iterations=it,
        discrepancy_trajectory=discs,
        tau_trajectory=taus if tau_policy.mode == "auto" else [tau],
        objective=obj,
        row_v_support=row_support,
        col_v_support=col_support,
    )


def _fused_labels(
    n_nodes: int,
    graph: WeightedEdgeList,
    support: np.ndarray,
    points: np.ndarray,
    merge_tol: float,
) -> np.ndarray:
    """Connected components over edges with zero fused differences, then a
    centroid-distance merge of components closer than merge_tol."""
    fused = ~np.asarray(support, dtype=bool)
    gi = np.asarray(graph.i)[fused]
    gj = np.asarray(graph.j)[fused]
    adj = coo_matrix((np.ones(len(gi)), (gi, gj)), shape=(n_nodes, n_nodes))
    n_comp, comp = connected_components(adj, directed=False)

    if n_comp > 1 and merge_tol > 0:
        centroids = np.vstack(
            [points[comp == c].mean(axis=0) for c in range(n_comp)]
        )
        d = np.linalg.norm(centroids[:, None, :] - centroids[None, :, :], axis=2)
        close = coo_matrix(d <= merge_tol)
        _, comp_of_comp = connected_components(close, directed=False)
        comp = comp_of_comp[comp]

    # renumber by first occurrence
    _, first = np.unique(comp, return_index=True)
    order = {comp[idx]: rank for rank, idx in enumerate(np.sort(first))}
    return np.array([order[c] for c in comp], dtype=np.intp)


def extract_biclusters(
    fit: FitResult,
    row_weights: WeightedEdgeList,
    col_weights: WeightedEdgeList,
    fuse_tol: float = 1e-4,
) -> BiclusterLabels:
    """Read row and column cluster labels off a fit.

    Clusters are connected components of the fusion graphs restricted to
    edges whose difference vectors were shrunk exactly to zero; components
    whose centroids lie within fuse_tol * sqrt(dim) of each other are then
    merged. Labels are renumbered by first occurrence.
    """
    u = fit.u_hat
    n, p = u.shape
    rows = _fused_labels(
        n, row_weights, fit.row_v_support, u, fuse_tol * math.sqrt(p)
    )
    cols = _fused_labels(
        p, col_weights, fit.col_v_support, u.T, fuse_tol * math.sqrt(n)
    )
    return BiclusterLabels(row_labels=rows, col_labels=cols)
