"""Penalty-level selection by missing-data cross-validation: hold out
disjoint sets of matrix cells, impute, refit, and score held-out squared
error against the fitted mean matrix."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import SolverConfig, as_matrix
from .huber import TauPolicy, huber_loss
from .weights import default_weight_params, knn_huber_weights


@dataclass
class CvReport:
    grid: list[float]
    mse_per_lambda: list[float]
    fold_mse: np.ndarray = field(repr=False)  # T x len(grid)
    best_lambda: float = 0.0
    seed: int = 0
    n_folds: int = 0
    non_converged: list[list[float]] = field(default_factory=list)  # per fold

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "mse_per_lambda": self.mse_per_lambda,
            "fold_mse": self.fold_mse.tolist(),
            "best_lambda": self.best_lambda,
            "seed": self.seed,
            "n_folds": self.n_folds,
            "non_converged": self.non_converged,
        }


def make_folds(n: int, p: int, n_folds: int, seed: int) -> list[np.ndarray]:
    """Randomly partition the n*p cell indices into n_folds disjoint
    near-equal folds; the first (n*p mod n_folds) folds absorb the
    remainder. Reproducible from the seed."""
    total = n * p
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    if n_folds > total:
        raise ValueError("more folds than matrix cells")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(total)
    sizes = np.full(n_folds, total // n_folds)
    sizes[: total % n_folds] += 1
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    return [np.sort(perm[bounds[t] : bounds[t + 1]]) for t in range(n_folds)]


def _score_task(args) -> tuple[int, int, float, bool]:
    """One (fold, grid-point) fit; top-level so it can cross process
    boundaries. Returns (fold, grid index, mse, converged)."""
    from .bicluster import fit_bicluster

    t, g, xk, row_w, col_w, lam, tau_policy, cfg, mask, held, loss = args
    fit = fit_bicluster(xk, row_w, col_w, lam, tau_policy, cfg)
    err = held - fit.u_hat[mask]
    if loss == "squared":
        mse = float(np.mean(err**2))
    else:
        mse = float(np.mean(huber_loss(err, fit.tau_trajectory[-1])))
    return t, g, mse, fit.converged


def cv_lambda(
    x,
    grid,
    n_folds: int = 10,
    k_row: int = 5,
    k_col: int = 5,
    xi: float | None = None,
    delta: float | None = None,
    tau_policy: TauPolicy = TauPolicy(),
    cfg: SolverConfig = SolverConfig(),
    seed: int = 0,
    impute: str = "mean",
    validation_loss: str = "squared",
    n_jobs: int = 1,
) -> CvReport:
    """Score every grid value by T-fold missing-cell cross-validation.

    Per fold, the held-out cells are replaced by the mean (or, with
    impute="median", the median) of the remaining entries, fusion weights
    are recomputed on the imputed matrix, the solver is run at each grid
    value, and the fitted mean matrix is scored on the original held-out
    values. Ties in mean MSE break toward the smaller penalty. The
    (fold, grid-point) tasks are independent; n_jobs > 1 runs them in a
    process pool with deterministic indexed write-back.
    """
    x = as_matrix(x)
    grid = [float(g) for g in grid]
    if not grid or any(g < 0 for g in grid):
        raise ValueError("grid must be nonempty with nonnegative values")
    if impute not in ("mean", "median"):
        raise ValueError("impute must be 'mean' or 'median'")
    if validation_loss not in ("squared", "huber"):
        raise ValueError("validation_loss must be 'squared' or 'huber'")

    n, p = x.shape
    folds = make_folds(n, p, n_folds, seed)
    fold_mse = np.zeros((n_folds, len(grid)))
    non_converged: list[list[float]] = [[] for _ in range(n_folds)]

    tasks = []
    for t, fold in enumerate(folds):
        mask = np.zeros(n * p, dtype=bool)
        mask[fold] = True
        mask = mask.reshape(n, p)
        kept = x[~mask]
        fill = float(np.mean(kept)) if impute == "mean" else float(np.median(kept))
        xk = np.where(mask, fill, x)

        if xi is None or delta is None:
            xi_d, delta_d = default_weight_params(xk)
            xi_t = xi if xi is not None else xi_d
            delta_t = delta if delta is not None else delta_d
        else:
            xi_t, delta_t = xi, delta
        row_w = knn_huber_weights(xk, k_row, xi_t, delta_t)
        col_w = knn_huber_weights(xk.T, k_col, xi_t, delta_t)

        held = x[mask]
        for g, lam in enumerate(grid):
            tasks.append(
                (t, g, xk, row_w, col_w, lam, tau_policy, cfg, mask, held,
                 validation_loss)
            )

    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_score_task, tasks))
    else:
        results = [_score_task(task) for task in tasks]

    for t, g, mse, converged in results:
        fold_mse[t, g] = mse
        if not converged:
            non_converged[t].append(grid[g])

    mse = fold_mse.mean(axis=0)
    best = min(zip(mse.tolist(), grid))[1]
    return CvReport(
        grid=grid,
        mse_per_lambda=mse.tolist(),
        fold_mse=fold_mse,
        best_lambda=best,
        seed=seed,
        n_folds=n_folds,
        non_converged=non_converged,
    )
