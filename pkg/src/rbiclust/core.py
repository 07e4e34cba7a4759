"""Shared numeric primitives: matrix validation, robust scale, shrinkage operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Gaussian-consistency factor for the median absolute deviation.
MAD_CONSISTENCY = 1.4826


class DegenerateScaleError(ValueError):
    """Raised when a robust scale estimate is zero (e.g. constant matrix)."""


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate and return a 2-D float64 array with all entries finite.

    Solver code downstream assumes finiteness; it is checked once here.
    """
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def mad(x) -> float:
    """Consistency-scaled median absolute deviation over all entries.

    Returns 1.4826 * median(|x - median(x)|).
    """
    m = np.asarray(x, dtype=np.float64)
    if m.size == 0:
        raise ValueError("mad of an empty matrix")
    med = np.median(m)
    return float(MAD_CONSISTENCY * np.median(np.abs(m - med)))


def soft_threshold(a, b):
    """Soft-thresholding operator sign(a) * max(|a| - b, 0). Accepts arrays."""
    if np.any(np.asarray(b) < 0):
        raise ValueError("soft_threshold requires b >= 0")
    return np.sign(a) * np.maximum(np.abs(a) - b, 0.0)


def group_shrink(g, t: float) -> np.ndarray:
    """Group-lasso shrinkage [1 - t/||g||]_+ * g; exact zero when ||g|| <= t."""
    if t < 0:
        raise ValueError("group_shrink requires t >= 0")
    g = np.asarray(g, dtype=np.float64)
    nrm = np.linalg.norm(g)
    if nrm <= t:
        return np.zeros_like(g)
    return (1.0 - t / nrm) * g


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration caps, step size and seed shared by the solvers.

    rho is the ADMM step of the inner one-way solver; outer_tol is the
    stopping threshold of the alternating outer loop (scaled internally by
    max(1, ||X||_F)); fuse_tol controls cluster-centroid merging during
    label extraction.
    """

    rho: float = 1.0
    outer_tol: float = 1e-5
    outer_max_iter: int = 100
    inner_tol: float = 1e-6
    inner_max_iter: int = 1000
    fuse_tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.outer_tol <= 0 or self.inner_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.outer_max_iter < 1 or self.inner_max_iter < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.fuse_tol < 0:
            raise ValueError("fuse_tol must be nonnegative")
