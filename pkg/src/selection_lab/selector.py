"""Threshold selectors ``A_n = {sum x_i y_i >= d_n}`` for the one-regressor model.

Three threshold families are provided:

* ``CONSISTENT_LOG``: ``d_n = sqrt(sxx * tau * log n)``, a BIC-like consistent rule;
* ``FIXED_LEVEL``: ``d_n = z_{1-alpha} * sqrt(sxx)``, an AIC-like fixed-size rule;
* ``CUSTOM_POWER``: ``d_n = sqrt(sxx) * n**gamma`` with ``0 < gamma < 1/2``.

``tau = inf`` is accepted as a sentinel for a selector that never picks H1.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .gauss import std_normal_cdf, std_normal_quantile


class DesignKind(enum.Enum):
    CONSTANT_ONE = "constant_one"
    SCALED_GRID = "scaled_grid"


@dataclass(frozen=True)
class DesignSpec:
    """Regressor rule: ``x_i = 1`` or ``x_i = sqrt(kappa)``.

    ``prediction_factor`` is ``(1/m) sum (x*_i)^2`` for the prediction points;
    it only rescales risk.
    """
    kind: DesignKind = DesignKind.CONSTANT_ONE
    kappa: float = 1.0
    prediction_factor: float = 1.0

    def __post_init__(self):
        if not isinstance(self.kind, DesignKind):
            object.__setattr__(self, "kind", DesignKind(self.kind))
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError("kappa must be a positive finite number")
        if not (self.prediction_factor > 0 and math.isfinite(self.prediction_factor)):
            raise ValueError("prediction_factor must be a positive finite number")
        if self.kind is DesignKind.CONSTANT_ONE and self.kappa != 1.0:
            raise ValueError("CONSTANT_ONE design requires kappa == 1")

    @classmethod
    def scaled(cls, kappa, prediction_factor=1.0):
        return cls(DesignKind.SCALED_GRID, float(kappa), float(prediction_factor))

    def sxx(self, n):
        """sum_{i<=n} x_i^2"""
        return self.kappa * n

    def xs(self, n):
        return np.full(int(n), math.sqrt(self.kappa))


DEFAULT_DESIGN = DesignSpec()


class CalibrationKind(enum.Enum):
    CONSISTENT_LOG = "consistent_log"
    FIXED_LEVEL = "fixed_level"
    CUSTOM_POWER = "custom_power"


@dataclass(frozen=True)
class SelectorCalibration:
    kind: CalibrationKind
    tau: float = 1.0
    alpha: float = 0.05
    gamma: float = 0.25

    def __post_init__(self):
        if not isinstance(self.kind, CalibrationKind):
            object.__setattr__(self, "kind", CalibrationKind(self.kind))
        if self.kind is CalibrationKind.CONSISTENT_LOG and not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.kind is CalibrationKind.FIXED_LEVEL and not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.kind is CalibrationKind.CUSTOM_POWER and not 0 < self.gamma < 0.5:
            raise ValueError(f"gamma must lie in (0, 1/2), got {self.gamma}")

    @classmethod
    def consistent_log(cls, tau=1.0):
        return cls(CalibrationKind.CONSISTENT_LOG, tau=float(tau))

    @classmethod
    def fixed_level(cls, alpha=0.05):
        return cls(CalibrationKind.FIXED_LEVEL, alpha=float(alpha))

    @classmethod
    def custom_power(cls, gamma=0.25):
        return cls(CalibrationKind.CUSTOM_POWER, gamma=float(gamma))

    def describe(self):
        if self.kind is CalibrationKind.CONSISTENT_LOG:
            return f"consistent_log(tau={self.tau:g})"
        if self.kind is CalibrationKind.FIXED_LEVEL:
            return f"fixed_level(alpha={self.alpha:g})"
        return f"custom_power(gamma={self.gamma:g})"


@dataclass(frozen=True)
class SelectionOutcome:
    chose_h1: bool
    statistic: float
    threshold: float


def _check_n(n):
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"n must be >= 2 (log n degenerates at n=1), got {n}")
    return int(n)


def standardized_threshold(cal, n):
    """d_n / sqrt(sxx); depends on n only."""
    n = _check_n(n)
    if cal.kind is CalibrationKind.CONSISTENT_LOG:
        return math.sqrt(cal.tau * math.log(n))
    if cal.kind is CalibrationKind.FIXED_LEVEL:
        return std_normal_quantile(1.0 - cal.alpha)
    return float(n) ** cal.gamma


def threshold(cal, n, design=DEFAULT_DESIGN):
    """The cut-off d_n on the scale of ``sum x_i y_i``."""
    n = _check_n(n)
    sxx = design.sxx(n)
    if cal.kind is CalibrationKind.CONSISTENT_LOG:
        return math.sqrt(sxx * cal.tau * math.log(n))
    return math.sqrt(sxx) * standardized_threshold(cal, n)


def standardized_margin(beta, n, cal, design=DEFAULT_DESIGN):
    """(d_n - beta*sxx) / sqrt(sxx): the z-value whose upper tail is the power."""
    n = _check_n(n)
    sxx = design.sxx(n)
    d = threshold(cal, n, design)
    if math.isinf(d):
        return d
    return (d - beta * sxx) / math.sqrt(sxx)


def power(beta, n, cal, design=DEFAULT_DESIGN):
    """pi_n(beta) = Pr_beta{sum x_i y_i >= d_n} = 1 - Phi(standardized margin)."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    return std_normal_cdf(-standardized_margin(beta, n, cal, design))


def accept_prob(beta, n, cal, design=DEFAULT_DESIGN):
    """P_beta(A_n^c), the probability of keeping the null model."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    return std_normal_cdf(standardized_margin(beta, n, cal, design))


def is_consistent(cal):
    """Pointwise selection consistency of the family.

    Requires d_n/sqrt(sxx) -> inf (size -> 0) and d_n/sxx -> 0 (power -> 1 at
    every fixed beta > 0).
    """
    if cal.kind is CalibrationKind.CONSISTENT_LOG:
        return math.isfinite(cal.tau)
    if cal.kind is CalibrationKind.CUSTOM_POWER:
        return True
    return False


def select(ys, xs, d_n):
    ys = np.asarray(ys, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if ys.shape != xs.shape or ys.ndim != 1:
        raise ValueError(f"ys and xs must be 1-d of equal length, got {ys.shape} and {xs.shape}")
    if ys.size == 0:
        raise ValueError("need at least one observation")
    stat = float(np.dot(xs, ys))
    # ties go to H1
    return SelectionOutcome(chose_h1=bool(stat >= d_n), statistic=stat, threshold=float(d_n))


def simulate_statistics(beta, n, design, replicates, seed, workers=1, backend=None):
    """Monte Carlo draws of sum x_i y_i from full simulated data sets."""
    n = _check_n(n)
    return kernels.simulate_sum_xy(design.xs(n), beta, replicates, seed,
                                   workers=workers, backend=backend)


def simulate_selection_prob(beta, n, cal, design=DEFAULT_DESIGN, replicates=10_000, seed=0,
                            workers=1, backend=None):
    """Empirical frequency of selecting H1 over simulated data sets."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    d = threshold(cal, n, design)
    stats = simulate_statistics(beta, n, design, replicates, seed, workers, backend)
    return float(np.count_nonzero(stats >= d)) / replicates
