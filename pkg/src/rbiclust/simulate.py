"""Checkerboard matrix generation and heavy-tailed noise contamination."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bicluster import BiclusterLabels
from .core import as_matrix


@dataclass(frozen=True)
class CheckerboardSpec:
    """Blockwise-constant mean structure with Gaussian observation noise.

    Rows are split into n_row_blocks contiguous near-equal blocks, columns
    into n_col_blocks; each block mean is drawn uniformly from mean_grid.
    """

    n: int
    p: int
    n_row_blocks: int
    n_col_blocks: int
    mean_grid: tuple[float, ...] = tuple(np.arange(-5.0, 5.01, 0.5))
    sigma: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("matrix dimensions must be positive")
        if not 1 <= self.n_row_blocks <= self.n:
            raise ValueError("n_row_blocks must be in [1, n]")
        if not 1 <= self.n_col_blocks <= self.p:
            raise ValueError("n_col_blocks must be in [1, p]")
        if len(self.mean_grid) == 0:
            raise ValueError("mean_grid must be nonempty")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive i.i.d. noise: none, cauchy, lognormal, student_t or pareto."""

    kind: str = "none"
    params: dict = field(default_factory=dict)
    seed: int = 0

    _DEFAULTS = {
        "none": {},
        "cauchy": {"gamma": 1.5, "x0": 0.0},
        "lognormal": {"mu": 0.0, "sigma": 2.0},
        "student_t": {"nu": 1.0},
        "pareto": {"xm": 1.0, "alpha": 2.0},
    }

    def __post_init__(self):
        if self.kind not in self._DEFAULTS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        merged = {**self._DEFAULTS[self.kind], **self.params}
        unknown = set(merged) - set(self._DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        if any(v <= 0 for k, v in merged.items() if k in ("gamma", "sigma", "nu", "xm", "alpha")):
            raise ValueError("scale/shape noise parameters must be positive")
        object.__setattr__(self, "params", merged)


def _block_bounds(total: int, blocks: int) -> np.ndarray:
    """Split range(total) into `blocks` contiguous near-equal pieces; the
    first (total % blocks) pieces get the extra element."""
    sizes = np.full(blocks, total // blocks)
    sizes[: total % blocks] += 1
    return np.concatenate([[0], np.cumsum(sizes)])


def make_checkerboard(spec: CheckerboardSpec):
    """Draw a checkerboard matrix.

    Returns (x0, truth, mu) where x0 is the n x p data matrix, truth holds
    the block labels (block identity even if two blocks draw the same
    mean), and mu is the n_row_blocks x n_col_blocks mean table.
    """
    rng = np.random.default_rng(spec.seed)
    grid = np.asarray(spec.mean_grid, dtype=np.float64)
    mu = rng.choice(grid, size=(spec.n_row_blocks, spec.n_col_blocks))

    rb = _block_bounds(spec.n, spec.n_row_blocks)
    cb = _block_bounds(spec.p, spec.n_col_blocks)
    row_labels = np.repeat(np.arange(spec.n_row_blocks), np.diff(rb))
    col_labels = np.repeat(np.arange(spec.n_col_blocks), np.diff(cb))

    means = mu[row_labels][:, col_labels]
    x0 = means + spec.sigma * rng.standard_normal((spec.n, spec.p))
    truth = BiclusterLabels(row_labels=row_labels, col_labels=col_labels)
    return x0, truth, mu


def sample_noise(noise: NoiseSpec, shape: tuple[int, int]) -> np.ndarray:
    """Draw an i.i.d. noise array of the given shape."""
    rng = np.random.default_rng(noise.seed)
    q = noise.params
    if noise.kind == "none":
        return np.zeros(shape)
    if noise.kind == "cauchy":
        u = rng.random(shape)
        return q["x0"] + q["gamma"] * np.tan(math.pi * (u - 0.5))
    if noise.kind == "lognormal":
        return np.exp(q["mu"] + q["sigma"] * rng.standard_normal(shape))
    if noise.kind == "student_t":
        z = rng.standard_normal(shape)
        chi2 = rng.chisquare(q["nu"], shape)
        return z / np.sqrt(chi2 / q["nu"])
    if noise.kind == "pareto":
        u = 1.0 - rng.random(shape)  # in (0, 1], keeps the inverse CDF finite
        return q["xm"] * u ** (-1.0 / q["alpha"])
    raise AssertionError(noise.kind)


def add_noise(x0, noise: NoiseSpec) -> np.ndarray:
    """Return x0 plus i.i.d. noise of the named distribution."""
    x0 = as_matrix(x0)
    if noise.kind == "none":
        return x0.copy()
    return x0 + sample_noise(noise, x0.shape)
