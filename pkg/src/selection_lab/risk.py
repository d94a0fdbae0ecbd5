"""Predictive risk of the post-selection estimator ``beta_hat * I(A_n)``.

With ``v = 1/sxx`` and ``t = (d_n - beta*sxx)/sqrt(sxx)`` the risk splits into

    E[(beta - beta_hat)^2 ; A_n]  =  v * E[Z^2 ; Z >= t]
    beta^2 * P(A_n^c)             =  beta^2 * Phi(t)

and ``R = s* * (first + second)``, where ``s*`` is the design's prediction
factor.  :func:`mc_risk` estimates the same quantities from simulated data.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .gauss import std_normal_cdf, upper_truncated_second_moment
from .selector import (DEFAULT_DESIGN, _check_n, simulate_statistics, standardized_margin,
                       threshold)


class RiskMethod(enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class RiskReport:
    n: int
    beta: float
    term_estimation: float
    term_bias: float
    risk: float
    scaled_risk: float
    accept_prob: float
    method: RiskMethod
    mc_std_error: float | None = None


@dataclass(frozen=True)
class SupScanResult:
    n: int
    sup_scaled_risk: float
    argmax_beta: float
    grid_spec: str


def lse(ys, xs):
    """Least squares slope through the origin."""
    ys = np.asarray(ys, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if ys.shape != xs.shape:
        raise ValueError(f"length mismatch: {ys.shape} vs {xs.shape}")
    sxx = float(np.dot(xs, xs))
    if sxx <= 0:
        raise ValueError("design has sum x_i^2 == 0")
    return float(np.dot(xs, ys)) / sxx


def exact_risk(beta, n, cal, design=DEFAULT_DESIGN):
    n = _check_n(n)
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    beta = float(beta)
    sxx = design.sxx(n)
    t = standardized_margin(beta, n, cal, design)
    accept = std_normal_cdf(t)
    term_est = upper_truncated_second_moment(t) / sxx
    term_bias = beta * beta * accept
    risk = design.prediction_factor * (term_est + term_bias)
    return RiskReport(n=n, beta=beta, term_estimation=term_est, term_bias=term_bias,
                      risk=risk, scaled_risk=n * risk, accept_prob=accept,
                      method=RiskMethod.EXACT)


def mc_risk(beta, n, cal, design=DEFAULT_DESIGN, replicates=100_000, seed=0, workers=1,
            backend=None):
    """Monte Carlo risk from ``replicates`` simulated data sets.

    ``mc_std_error`` is the standard error of the mean per-replicate loss
    ``s* * (beta - beta_hat * I(A_n))^2``.
    """
    n = _check_n(n)
    if replicates < 2:
        raise ValueError("replicates must be >= 2")
    beta = float(beta)
    xs = design.xs(n)
    sxx = float(np.dot(xs, xs))
    d = threshold(cal, n, design)
    stats = simulate_statistics(beta, n, design, replicates, seed, workers, backend)
    chose = stats >= d
    bhat = stats / sxx
    sq_err = np.where(chose, (beta - bhat) ** 2, 0.0)
    accept = 1.0 - np.count_nonzero(chose) / replicates
    term_est = float(np.mean(sq_err))
    term_bias = beta * beta * accept
    loss = design.prediction_factor * (beta - np.where(chose, bhat, 0.0)) ** 2
    se = float(np.std(loss, ddof=1)) / math.sqrt(replicates)
    risk = design.prediction_factor * (term_est + term_bias)
    return RiskReport(n=n, beta=beta, term_estimation=term_est, term_bias=term_bias,
                      risk=risk, scaled_risk=n * risk, accept_prob=accept,
                      method=RiskMethod.MONTE_CARLO, mc_std_error=se)


STRUCTURAL_B = (0.25, 0.5, 0.75, 1.0)
STRUCTURAL_BPRIME = (0.5, 1.0)


def default_beta_grid(n, cal, design=DEFAULT_DESIGN, points=600, decades=5.0):
    """Geometric grid on (0, beta_max] plus 0 and the threshold-linked points.

    ``beta_max = 3 d_n/sxx + 10/sqrt(sxx)`` comfortably covers the region where
    ``n * beta^2 * P(A_n^c)`` peaks.
    """
    n = _check_n(n)
    sxx = design.sxx(n)
    d = threshold(cal, n, design)
    unit = d / sxx
    beta_max = 10.0 / math.sqrt(sxx)
    if math.isfinite(unit):
        beta_max += 3.0 * max(unit, 0.0)
    geo = beta_max * np.logspace(-decades, 0.0, int(points))
    structural = []
    if math.isfinite(unit) and unit > 0:
        structural = [b * unit for b in STRUCTURAL_B]
        structural += [(1.0 + bp) * unit for bp in STRUCTURAL_BPRIME]
    grid = np.unique(np.concatenate([[0.0], geo, structural]))
    spec = (f"0 + geometric[{int(points)} pts, {beta_max:.6g}*1e-{decades:g}..{beta_max:.6g}]"
            f" + b*d_n/sxx for b in {STRUCTURAL_B} + (1+b')*d_n/sxx for b' in {STRUCTURAL_BPRIME}")
    return grid, spec


def scaled_risk_sup(n, cal, design=DEFAULT_DESIGN, grid=None):
    """Maximise ``n * R(beta)`` over a beta grid (default: :func:`default_beta_grid`).

    Grid points are evaluated independently and reduced in index order, so
    ties resolve to the smallest index.
    """
    n = _check_n(n)
    if grid is None:
        grid, spec = default_beta_grid(n, cal, design)
    else:
        grid = np.asarray(list(grid), dtype=float).ravel()
        spec = f"explicit[{grid.size} pts]"
    if grid.size == 0:
        raise ValueError("beta grid is empty")
    values = np.array([exact_risk(b, n, cal, design).scaled_risk for b in grid])
    k = int(np.argmax(values))
    return SupScanResult(n=n, sup_scaled_risk=float(values[k]), argmax_beta=float(grid[k]),
                         grid_spec=spec)
