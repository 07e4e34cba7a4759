"""Command-line front end: fit / cv / simulate / evaluate subcommands.

Exit codes: 0 success (including flagged non-convergence), 2 for I/O and
data errors, 64 for usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io as rio
from .bicluster import extract_biclusters, fit_bicluster
from .core import SolverConfig
from .huber import TauPolicy
from .metrics import (
    adjusted_rand_index,
    cell_labels,
    rand_index,
    variation_of_information,
)
from .bicluster import BiclusterLabels
from .model_selection import cv_lambda
from .plots import save_cv_curve, save_heatmap_figure
from .simulate import CheckerboardSpec, NoiseSpec, add_noise, make_checkerboard
from .weights import DEFAULT_XI, default_weight_params, knn_huber_weights

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 64
        raise UsageError(message)


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _float_or_inf(text: str) -> float:
    return math.inf if text.strip().lower() == "inf" else float(text)


def _parse_tau(text: str) -> TauPolicy:
    t = text.strip().lower()
    if t == "auto":
        return TauPolicy(mode="auto")
    if t == "mad":
        return TauPolicy(mode="mad_default")
    if t == "inf":
        return TauPolicy(mode="fixed", fixed_value=math.inf)
    try:
        return TauPolicy(mode="fixed", fixed_value=float(text))
    except ValueError as exc:
        raise UsageError(f"--tau must be auto|mad|inf|<positive value>: {exc}")


def _parse_grid(text: str) -> list[float]:
    """Comma list of values, or a log-range 'log:<lo>:<hi>:<num>'."""
    t = text.strip()
    if t.startswith("log:"):
        parts = t.split(":")
        if len(parts) != 4:
            raise UsageError("log grid spec must be log:<lo>:<hi>:<num>")
        lo, hi, num = float(parts[1]), float(parts[2]), int(parts[3])
        if lo <= 0 or hi <= 0 or num < 1:
            raise UsageError("log grid needs positive bounds and num >= 1")
        return np.geomspace(lo, hi, num).tolist()
    try:
        return [float(v) for v in t.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --grid value: {exc}")


def _parse_mean_grid(text: str) -> list[float]:
    """Comma list, or '<lo>:<step>:<hi>' inclusive range."""
    t = text.strip()
    if ":" in t:
        lo, step, hi = (float(v) for v in t.split(":"))
        if step <= 0:
            raise UsageError("mean grid step must be positive")
        return np.arange(lo, hi + step / 2, step).tolist()
    return [float(v) for v in t.split(",") if v.strip()]


def _add_fit_flags(p: Parser, require_lambda: bool) -> None:
    p.add_argument("input", help="input CSV matrix")
    if require_lambda:
        p.add_argument("--lambda", dest="lam", type=float, required=True,
                       help="fusion penalty level")
    p.add_argument("--tau", default="auto",
                   help="auto | mad | inf | <positive value> (default auto)")
    p.add_argument("--row-k", type=int, default=5, help="row kNN size")
    p.add_argument("--col-k", type=int, default=5, help="column kNN size")
    p.add_argument("--xi", type=_positive_float, default=None,
                   help=f"weight decay rate (default {DEFAULT_XI})")
    p.add_argument("--delta", type=_float_or_inf, default=None,
                   help="weight truncation level (default 1.345*MAD; 'inf' disables)")
    p.add_argument("--rho", type=_positive_float, default=1.0, help="ADMM step")
    p.add_argument("--tol", type=_positive_float, default=1e-5,
                   help="outer stopping tolerance (relative)")
    p.add_argument("--inner-tol", type=_positive_float, default=1e-6)
    p.add_argument("--max-outer", type=int, default=100)
    p.add_argument("--max-inner", type=int, default=1000)
    p.add_argument("--fuse-tol", type=float, default=1e-4,
                   help="centroid merge tolerance for label extraction")
    p.add_argument("--top-variance", type=int, default=None, metavar="N",
                   help="keep only the N rows of highest sample variance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".", help="output directory")
    p.add_argument("--header", action="store_true", help="input has a header row")
    p.add_argument("--rownames", action="store_true",
                   help="first input column holds row names")
    p.add_argument("--no-heatmap", action="store_true", help="skip heatmap output")


def build_parser() -> Parser:
    parser = Parser(prog="rbiclust",
                    description="Robust convex biclustering of a data matrix")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit at a fixed penalty level")
    _add_fit_flags(fit, require_lambda=True)

    cv = sub.add_parser("cv", help="select the penalty by cross-validation, then fit")
    _add_fit_flags(cv, require_lambda=False)
    cv.add_argument("--grid", required=True,
                    help="comma list of penalty values or log:<lo>:<hi>:<num>")
    cv.add_argument("--folds", type=int, default=10)
    cv.add_argument("--threads", type=int, default=None,
                    help="worker processes for the (penalty, fold) grid")

    sim = sub.add_parser("simulate", help="generate a checkerboard matrix")
    sim.add_argument("--n", type=int, default=100)
    sim.add_argument("--p", type=int, default=100)
    sim.add_argument("--row-blocks", type=int, default=4)
    sim.add_argument("--col-blocks", type=int, default=4)
    sim.add_argument("--mean-grid", default="-5:0.5:5",
                     help="comma list or <lo>:<step>:<hi>")
    sim.add_argument("--sigma", type=_positive_float, default=2.0)
    sim.add_argument("--noise", default="none",
                     choices=["none", "cauchy", "lognormal", "t", "pareto"])
    sim.add_argument("--noise-gamma", type=_positive_float, default=1.5)
    sim.add_argument("--noise-x0", type=float, default=0.0)
    sim.add_argument("--noise-mu", type=float, default=0.0)
    sim.add_argument("--noise-sigma", type=_positive_float, default=2.0)
    sim.add_argument("--noise-df", type=_positive_float, default=1.0)
    sim.add_argument("--noise-xm", type=_positive_float, default=1.0)
    sim.add_argument("--noise-alpha", type=_positive_float, default=2.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out-dir", default=".")

    ev = sub.add_parser("evaluate", help="compare predicted and true labelings")
    ev.add_argument("--pred-rows", required=True)
    ev.add_argument("--pred-cols", required=True)
    ev.add_argument("--truth-rows", required=True)
    ev.add_argument("--truth-cols", required=True)
    ev.add_argument("--out-dir", default=".")

    return parser


def _load_input(args) -> tuple[np.ndarray, list[int]]:
    x = rio.read_csv_matrix(args.input, header=args.header, rownames=args.rownames)
    kept = list(range(x.shape[0]))
    if args.top_variance is not None:
        if not 1 <= args.top_variance <= x.shape[0]:
            raise UsageError("--top-variance must be in [1, n_rows]")
        variances = x.var(axis=1, ddof=1) if x.shape[1] > 1 else x.var(axis=1)
        order = np.argsort(-variances, kind="stable")[: args.top_variance]
        kept = np.sort(order).tolist()
        x = x[kept]
    return x, kept


def _effective_config(args, lam: float, xi: float, delta: float) -> dict:
    return {
        "input": str(args.input),
        "lambda": lam,
        "tau": args.tau,
        "row_k": args.row_k,
        "col_k": args.col_k,
        "xi": xi,
        "delta": delta,
        "rho": args.rho,
        "tol": args.tol,
        "inner_tol": args.inner_tol,
        "max_outer": args.max_outer,
        "max_inner": args.max_inner,
        "fuse_tol": args.fuse_tol,
        "top_variance": args.top_variance,
        "seed": args.seed,
        "header": args.header,
        "rownames": args.rownames,
    }


def _run_fit(args, x: np.ndarray, kept_rows: list[int], lam: float,
             out_dir: Path) -> dict:
    t0 = time.perf_counter()
    xi, delta = args.xi, args.delta
    if xi is None or delta is None:
        xi_d, delta_d = default_weight_params(x)
        xi = xi if xi is not None else xi_d
        delta = delta if delta is not None else delta_d
    cfg = SolverConfig(rho=args.rho, outer_tol=args.tol,
                       outer_max_iter=args.max_outer, inner_tol=args.inner_tol,
                       inner_max_iter=args.max_inner, fuse_tol=args.fuse_tol,
                       seed=args.seed)
    policy = _parse_tau(args.tau)

    row_w = knn_huber_weights(x, args.row_k, xi, delta)
    col_w = knn_huber_weights(x.T, args.col_k, xi, delta)
    fit = fit_bicluster(x, row_w, col_w, lam, policy, cfg)
    labels = extract_biclusters(fit, row_w, col_w, fuse_tol=args.fuse_tol)

    rio.write_csv_matrix(out_dir / "u_hat.csv", fit.u_hat)
    rio.write_labels(out_dir / "row_labels.csv", labels.row_labels)
    rio.write_labels(out_dir / "col_labels.csv", labels.col_labels)
    if not args.no_heatmap:
        row_order = np.argsort(labels.row_labels, kind="stable")
        col_order = np.argsort(labels.col_labels, kind="stable")
        rio.write_ppm_heatmap(out_dir / "heatmap.ppm",
                              fit.u_hat[row_order][:, col_order])
        save_heatmap_figure(out_dir / "heatmap.png", fit.u_hat,
                            row_order, col_order,
                            labels.row_labels, labels.col_labels)

    summary = {
        "lambda": lam,
        "tau_trajectory": fit.tau_trajectory,
        "outer_iterations": fit.outer_iterations,
        "converged": fit.converged,
        "objective": fit.objective,
        "n_row_clusters": labels.n_row_clusters,
        "n_col_clusters": labels.n_col_clusters,
        "kept_rows": kept_rows,
        "wall_seconds": time.perf_counter() - t0,
        "config": _effective_config(args, lam, xi, delta),
    }
    rio.write_json(out_dir / "summary.json", summary)
    return summary


def cmd_fit(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    x, kept = _load_input(args)
    _run_fit(args, x, kept, args.lam, out_dir)
    return EXIT_OK


def cmd_cv(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    x, kept = _load_input(args)
    grid = _parse_grid(args.grid)
    cfg = SolverConfig(rho=args.rho, outer_tol=args.tol,
                       outer_max_iter=args.max_outer, inner_tol=args.inner_tol,
                       inner_max_iter=args.max_inner, fuse_tol=args.fuse_tol,
                       seed=args.seed)
    report = cv_lambda(
        x, grid, n_folds=args.folds, k_row=args.row_k, k_col=args.col_k,
        xi=args.xi, delta=args.delta, tau_policy=_parse_tau(args.tau),
        cfg=cfg, seed=args.seed, n_jobs=args.threads or 1,
    )
    rio.write_json(out_dir / "cv_report.json", report.to_dict())
    save_cv_curve(out_dir / "cv_curve.png", report.grid, report.mse_per_lambda)
    _run_fit(args, x, kept, report.best_lambda, out_dir)
    return EXIT_OK


def cmd_simulate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mean_grid = _parse_mean_grid(args.mean_grid)
    spec = CheckerboardSpec(
        n=args.n, p=args.p, n_row_blocks=args.row_blocks,
        n_col_blocks=args.col_blocks, mean_grid=tuple(mean_grid),
        sigma=args.sigma, seed=args.seed,
    )
    noise_kind = {"t": "student_t"}.get(args.noise, args.noise)
    params = {
        "cauchy": {"gamma": args.noise_gamma, "x0": args.noise_x0},
        "lognormal": {"mu": args.noise_mu, "sigma": args.noise_sigma},
        "student_t": {"nu": args.noise_df},
        "pareto": {"xm": args.noise_xm, "alpha": args.noise_alpha},
    }.get(noise_kind, {})
    # independent stream for the noise layer, derived from the base seed
    noise = NoiseSpec(kind=noise_kind, params=params, seed=args.seed + 1)

    x0, truth, mu = make_checkerboard(spec)
    x = add_noise(x0, noise)
    rio.write_csv_matrix(out_dir / "data.csv", x)
    rio.write_labels(out_dir / "truth_row_labels.csv", truth.row_labels)
    rio.write_labels(out_dir / "truth_col_labels.csv", truth.col_labels)
    rio.write_json(out_dir / "spec.json", {
        "n": spec.n, "p": spec.p,
        "row_blocks": spec.n_row_blocks, "col_blocks": spec.n_col_blocks,
        "mean_grid": list(spec.mean_grid), "sigma": spec.sigma,
        "seed": spec.seed,
        "noise": {"kind": noise.kind, "params": noise.params, "seed": noise.seed},
        "mean_table": mu.tolist(),
    })
    return EXIT_OK


def cmd_evaluate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pred = BiclusterLabels(row_labels=rio.read_labels(args.pred_rows),
                           col_labels=rio.read_labels(args.pred_cols))
    truth = BiclusterLabels(row_labels=rio.read_labels(args.truth_rows),
                            col_labels=rio.read_labels(args.truth_cols))
    if (len(pred.row_labels) != len(truth.row_labels)
            or len(pred.col_labels) != len(truth.col_labels)):
        raise ValueError("predicted and truth label files differ in length")
    a, b = cell_labels(pred), cell_labels(truth)
    vi, nvi = variation_of_information(a, b)
    metrics = {
        "ri": rand_index(a, b),
        "ari": adjusted_rand_index(a, b),
        "vi_nats": vi,
        "nvi": nvi,
    }
    rio.write_json(out_dir / "metrics.json", metrics)
    for key, val in metrics.items():
        print(f"{key}: {val:.6f}")
    return EXIT_OK


_COMMANDS = {
    "fit": cmd_fit,
    "cv": cmd_cv,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
