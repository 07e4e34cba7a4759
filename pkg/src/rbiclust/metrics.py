"""Partition agreement metrics (Rand index, adjusted Rand index, variation
of information) computed from the contingency table, plus the cell-level
product labeling used to compare checkerboard partitions."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .bicluster import BiclusterLabels


def cell_labels(b: BiclusterLabels) -> np.ndarray:
    """Label every matrix cell (i, j) by its (row cluster, column cluster)
    pair, mapped injectively to integers; length n*p, row-major."""
    rows = np.asarray(b.row_labels, dtype=np.intp)
    cols = np.asarray(b.col_labels, dtype=np.intp)
    width = int(cols.max()) + 1
    return (rows[:, None] * width + cols[None, :]).ravel()


def _contingency(a, b) -> sp.coo_matrix:
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise ValueError(f"labelings differ in length: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty labelings")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = sp.coo_matrix(
        (np.ones(a.size), (ai, bi)),
        shape=(ai.max() + 1, bi.max() + 1),
    )
    table.sum_duplicates()
    return table


def _comb2(x: np.ndarray) -> np.ndarray:
    return x * (x - 1) / 2.0


def rand_index(a, b) -> float:
    """Fraction of item pairs on which the two partitions agree
    (together in both, or apart in both)."""
    table = _contingency(a, b)
    n = table.sum()
    total = _comb2(np.array(n))
    tt = _comb2(table.data).sum()
    sa = _comb2(np.asarray(table.sum(axis=1)).ravel()).sum()
    sb = _comb2(np.asarray(table.sum(axis=0)).ravel()).sum()
    # apart-apart pairs by inclusion-exclusion
    aa = total - sa - sb + tt
    return float((tt + aa) / total) if total > 0 else 1.0


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected Rand index under the permutation model; 0 when the
    correction denominator vanishes (e.g. one partition is trivial)."""
    table = _contingency(a, b)
    n = table.sum()
    total = _comb2(np.array(n))
    if total == 0:
        return 0.0
    tt = _comb2(table.data).sum()
    sa = _comb2(np.asarray(table.sum(axis=1)).ravel()).sum()
    sb = _comb2(np.asarray(table.sum(axis=0)).ravel()).sum()
    expected = sa * sb / total
    maximum = 0.5 * (sa + sb)
    if maximum == expected:
        return 0.0
    return float((tt - expected) / (maximum - expected))


def variation_of_information(a, b) -> tuple[float, float]:
    """Variation of information in nats and its joint-entropy-normalized
    form in [0, 1].

    vi = 2 H(a,b) - H(a) - H(b); nvi = vi / H(a,b), with nvi = 0 when both
    partitions are trivial (H(a,b) = 0).
    """
    table = _contingency(a, b)
    n = table.sum()
    pj = table.data / n
    pa = np.asarray(table.sum(axis=1)).ravel() / n
    pb = np.asarray(table.sum(axis=0)).ravel() / n

    def entropy(p):
        p = p[p > 0]
        return float(-(p * np.log(p)).sum())

    h_joint = entropy(pj)
    vi = 2.0 * h_joint - entropy(pa) - entropy(pb)
    vi = max(vi, 0.0)  # guard tiny negative rounding
    nvi = vi / h_joint if h_joint > 0 else 0.0
    return vi, nvi
