"""Huber loss, its proximal update for the data-fit block, and the
automatic (data-driven) selection of the robustification parameter."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import mad, soft_threshold


class DegenerateResidualError(ValueError):
    """All residuals are zero: the robustification equation has no scale."""


@dataclass(frozen=True)
class TauPolicy:
    """How the Huber transition point tau is chosen during a fit.

    mode:
        "fixed"       use fixed_value throughout (math.inf gives the
                      non-robust squared-loss mode);
        "mad_default" 1.345 * MAD of the data, held fixed;
        "auto"        re-solve the censored moment equation each outer
                      iteration (tuning-free).
    floor is the minimum admissible tau for the auto mode; when None it
    defaults to 1e-4 * MAD of the data at fit time.
    """

    mode: str = "auto"
    fixed_value: float = 1.0
    floor: float | None = None

    def __post_init__(self):
        if self.mode not in ("fixed", "mad_default", "auto"):
            raise ValueError(f"unknown tau mode {self.mode!r}")
        if self.mode == "fixed" and not self.fixed_value > 0:
            raise ValueError("fixed tau must be positive")
        if self.floor is not None and not self.floor > 0:
            raise ValueError("tau floor must be positive")


def huber_loss(a, tau: float):
    """Elementwise Huber loss: a^2/2 inside [-tau, tau], tau|a| - tau^2/2 outside.

    tau = inf reduces to the squared-error loss a^2/2. Accepts scalars or
    arrays; matrix cost is huber_loss(X - U, tau).sum().
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    a = np.asarray(a, dtype=np.float64)
    if math.isinf(tau):
        out = 0.5 * a * a
    else:
        absa = np.abs(a)
        out = np.where(absa <= tau, 0.5 * a * a, tau * absa - 0.5 * tau * tau)
    return out if out.ndim else float(out)


def huber_prox(x, anchor, rho: float, tau: float):
    """Minimizer over w of huber_loss(x - w, tau) + (rho/2)(w - anchor)^2.

    Elementwise over arrays. The quadratic branch applies when
    (rho/(1+rho))|x - anchor| <= tau, otherwise the solution is
    x + soft_threshold(anchor - x, tau/rho).
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    if not tau > 0:
        raise ValueError("tau must be positive")
    x = np.asarray(x, dtype=np.float64)
    anchor = np.asarray(anchor, dtype=np.float64)
    quad = (x + rho * anchor) / (1.0 + rho)
    if math.isinf(tau):
        return quad if quad.ndim else float(quad)
    inside = (rho / (1.0 + rho)) * np.abs(x - anchor) <= tau
    linear = x + soft_threshold(anchor - x, tau / rho)
    out = np.where(inside, quad, linear)
    return out if out.ndim else float(out)


def solve_tau(residuals, s: int, n: int, p: int, floor: float = 1e-12) -> float:
    """Solve the censored second-moment equation for the robustification level.

    Finds tau with
        (1/(N-s)) * sum_i min(r_i^2, tau^2) / tau^2 = log(N^2)/N,  N = n*p,
    by bisection (the left side is continuous and nonincreasing in tau).
    The result is clamped below at `floor`. If the left side never reaches
    the right side (too few nonzero residuals), the clamp is returned.

    Raises DegenerateResidualError when every residual is zero, so the
    caller can keep its previous tau.
    """
    r = np.asarray(residuals, dtype=np.float64).ravel()
    N = n * p
    if r.size != N:
        raise ValueError(f"expected {N} residuals, got {r.size}")
    if not 0 <= s < N:
        raise ValueError("s must satisfy 0 <= s < n*p")
    r2 = r * r
    if not np.any(r2 > 0):
        raise DegenerateResidualError("all residuals are zero")

    rhs = math.log(N * N) / N
    denom = float(N - s)

    def lhs(tau):
        t2 = tau * tau
        return float(np.minimum(r2, t2).sum() / (denom * t2))

    lo = max(floor, 1e-12)
    hi = float(np.max(np.abs(r)))
    if hi <= lo:
        return lo
    # lhs is maximal for small tau; no crossing means the equation is
    # unsolvable and the floor is the clamped answer.
    if lhs(lo) <= rhs:
        return lo
    while lhs(hi) > rhs:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if lhs(mid) > rhs:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return max(0.5 * (lo + hi), floor)


def tau_mad_default(x) -> float:
    """Classical default 1.345 * MAD(x) for the Huber transition point."""
    scale = mad(x)
    if scale <= 0:
        raise ValueError("MAD of the matrix is zero; cannot set a default tau")
    return 1.345 * scale
