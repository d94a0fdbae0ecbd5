"""Local-alternative sequences ``beta_n`` and their behaviour under a selector.

Families
--------
YANG(b)         beta_n = b * d_n / sxx, 0 < b < 1 (b = 1/2 is the classic choice)
BOUNDARY        beta_n = d_n / sxx
PERFECT(b')     beta_n = (1 + b') * d_n / sxx, b' > 0
CONTIGUOUS(r)   beta_n = r / sqrt(n)
GENERIC_ROOT_N  beta_n = c_n / sqrt(n) with c_n = coef * n**p or c_n = coef

Every family carries enough parameters to decide the limit of
``beta_n * sqrt(sxx)`` symbolically; nothing here extrapolates numerically.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .selector import (DEFAULT_DESIGN, CalibrationKind, SelectorCalibration, _check_n,
                       accept_prob, power, simulate_statistics, standardized_threshold,
                       threshold)


class SequenceFamily(enum.Enum):
    YANG = "yang"
    BOUNDARY = "boundary"
    PERFECT = "perfect"
    CONTIGUOUS = "contiguous"
    GENERIC_ROOT_N = "generic"


THRESHOLD_LINKED = (SequenceFamily.YANG, SequenceFamily.BOUNDARY, SequenceFamily.PERFECT)


class UnclassifiableError(ValueError):
    """The limit of beta_n * sqrt(sxx) is not determined by the family parameters."""


class NotApplicableError(ValueError):
    """The requested diagnostic has no meaning for this sequence family."""


class Growth(enum.Enum):
    ZERO = "zero"
    FINITE = "finite"
    INFINITE = "infinite"


@dataclass(frozen=True)
class AlternativeSequence:
    family: SequenceFamily
    b: float = 0.5
    bprime: float = 1.0
    r: float = 1.0
    coef: float = 1.0
    exponent: float | None = None
    calibration: SelectorCalibration | None = None

    def __post_init__(self):
        if not isinstance(self.family, SequenceFamily):
            object.__setattr__(self, "family", SequenceFamily(self.family))
        fam = self.family
        if fam is SequenceFamily.YANG and not 0 < self.b < 1:
            raise ValueError(f"YANG requires 0 < b < 1, got {self.b}")
        if fam is SequenceFamily.PERFECT and not self.bprime > 0:
            raise ValueError(f"PERFECT requires b' > 0, got {self.bprime}")
        if fam is SequenceFamily.CONTIGUOUS and not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError(f"CONTIGUOUS requires finite r > 0, got {self.r}")
        if fam is SequenceFamily.GENERIC_ROOT_N:
            if not (self.coef > 0 and math.isfinite(self.coef)):
                raise ValueError(f"GENERIC_ROOT_N requires finite coef > 0, got {self.coef}")
            if self.exponent is not None and (self.exponent == 0 or not math.isfinite(self.exponent)):
                raise ValueError("GENERIC_ROOT_N exponent must be finite and non-zero "
                                 "(use exponent=None for a constant c_n)")

    @classmethod
    def yang(cls, calibration=None, b=0.5):
        return cls(SequenceFamily.YANG, b=float(b), calibration=calibration)

    @classmethod
    def boundary(cls, calibration=None):
        return cls(SequenceFamily.BOUNDARY, b=1.0, calibration=calibration)

    @classmethod
    def perfect(cls, calibration=None, bprime=1.0):
        return cls(SequenceFamily.PERFECT, bprime=float(bprime), calibration=calibration)

    @classmethod
    def contiguous(cls, r=1.0):
        return cls(SequenceFamily.CONTIGUOUS, r=float(r))

    @classmethod
    def generic(cls, exponent=None, coef=1.0):
        return cls(SequenceFamily.GENERIC_ROOT_N, coef=float(coef),
                   exponent=None if exponent is None else float(exponent))

    @property
    def threshold_multiple(self):
        """k in beta_n = k * d_n / sxx for the threshold-linked families."""
        if self.family is SequenceFamily.YANG:
            return self.b
        if self.family is SequenceFamily.BOUNDARY:
            return 1.0
        if self.family is SequenceFamily.PERFECT:
            return 1.0 + self.bprime
        raise NotApplicableError(f"{self.family.name} is not linked to d_n")

    def describe(self):
        fam = self.family
        if fam is SequenceFamily.YANG:
            s = f"yang(b={self.b:g})"
        elif fam is SequenceFamily.BOUNDARY:
            s = "boundary"
        elif fam is SequenceFamily.PERFECT:
            s = f"perfect(bprime={self.bprime:g})"
        elif fam is SequenceFamily.CONTIGUOUS:
            return f"contiguous(r={self.r:g})"
        else:
            c = f"{self.coef:g}" if self.exponent is None else f"{self.coef:g}*n^{self.exponent:g}"
            return f"generic(c_n={c})"
        if self.calibration is not None:
            s += f" under {self.calibration.describe()}"
        return s


@dataclass(frozen=True)
class LLRParams:
    """Law of log dP_{n,beta_n}/dP_{n,0} under the null: N(mean, variance)."""
    mean: float
    variance: float


def _calibration(seq, cal):
    c = seq.calibration if seq.calibration is not None else cal
    if c is None:
        raise ValueError(f"{seq.family.name} needs a calibration to define beta_n")
    return c


def beta_at(seq, n, design=DEFAULT_DESIGN, cal=None):
    n = _check_n(n)
    fam = seq.family
    if fam in THRESHOLD_LINKED:
        c = _calibration(seq, cal)
        return seq.threshold_multiple * threshold(c, n, design) / design.sxx(n)
    if fam is SequenceFamily.CONTIGUOUS:
        return seq.r / math.sqrt(n)
    c_n = seq.coef if seq.exponent is None else seq.coef * float(n) ** seq.exponent
    return c_n / math.sqrt(n)


def separation_growth(seq, design=DEFAULT_DESIGN, cal=None):
    """Symbolic limit type of ``beta_n * sqrt(sxx)`` (sxx ~ kappa * n)."""
    fam = seq.family
    if fam in THRESHOLD_LINKED:
        c = _calibration(seq, cal)
        # beta_n * sqrt(sxx) = k * d_n / sqrt(sxx)
        if c.kind is CalibrationKind.CONSISTENT_LOG:
            if not math.isfinite(c.tau):
                raise UnclassifiableError("tau = inf gives an infinite beta_n")
            return Growth.INFINITE
        if c.kind is CalibrationKind.CUSTOM_POWER:
            return Growth.INFINITE
        if c.alpha >= 0.5:
            raise UnclassifiableError(
                f"fixed level alpha={c.alpha:g} >= 1/2 gives d_n <= 0, so beta_n is not an alternative")
        return Growth.FINITE
    if fam is SequenceFamily.CONTIGUOUS:
        return Growth.FINITE
    if seq.exponent is None:
        return Growth.FINITE
    return Growth.INFINITE if seq.exponent > 0 else Growth.ZERO


def is_contiguous(seq, design=DEFAULT_DESIGN, cal=None):
    """P_{n,beta_n} is contiguous to P_{n,0} iff sup_n n*beta_n^2 < inf."""
    return separation_growth(seq, design, cal) is not Growth.INFINITE


def power_along(seq, cal, design=DEFAULT_DESIGN, n_grid=()):
    if len(n_grid) == 0:
        raise ValueError("n_grid is empty")
    return [(int(n), power(beta_at(seq, n, design, cal), n, cal, design)) for n in n_grid]


def scaled_bias_along(seq, cal, design=DEFAULT_DESIGN, n_grid=()):
    """Series of n * beta_n^2 * P_{beta_n}(A_n^c)."""
    if len(n_grid) == 0:
        raise ValueError("n_grid is empty")
    out = []
    for n in n_grid:
        b = beta_at(seq, n, design, cal)
        out.append((int(n), n * b * b * accept_prob(b, n, cal, design)))
    return out


def _margin_factor(seq):
    fam = seq.family
    if fam is SequenceFamily.YANG or fam is SequenceFamily.BOUNDARY:
        return 1.0 - seq.threshold_multiple
    if fam is SequenceFamily.PERFECT:
        return seq.bprime
    raise NotApplicableError(f"no confusion margin for the {fam.name} family")


def confusion_margin_holds(seq, cal, design=DEFAULT_DESIGN, n=2, M=1.0):
    """Whether the statistic's central mass ``beta_n*sxx +/- M*sqrt(sxx)`` clears d_n.

    YANG/BOUNDARY: ``beta_n*sxx + M*sqrt(sxx) < d_n`` (mass in the acceptance region).
    PERFECT:       ``beta_n*sxx - M*sqrt(sxx) > d_n`` (mass in the rejection region).
    """
    if not M > 0:
        raise ValueError(f"M must be > 0, got {M}")
    _margin_factor(seq)
    n = _check_n(n)
    sxx = design.sxx(n)
    d = threshold(cal, n, design)
    centre = beta_at(seq, n, design, cal) * sxx
    spread = M * math.sqrt(sxx)
    if seq.family is SequenceFamily.PERFECT:
        return centre - spread > d
    return centre + spread < d


def confusion_margin_min_n(seq, cal, M=1.0):
    """Smallest n >= 2 from which :func:`confusion_margin_holds` is true for good.

    Solved in closed form from ``M < k * d_n/sqrt(sxx)`` with k = 1-b or b'.
    Returns None when the margin never holds and ``math.inf`` when the
    crossing lies beyond double range.
    """
    if not M > 0:
        raise ValueError(f"M must be > 0, got {M}")
    k = _margin_factor(seq)
    if k <= 0:
        return None
    level = M / k
    if cal.kind is CalibrationKind.FIXED_LEVEL:
        return 2 if standardized_threshold(cal, 2) > level else None
    if cal.kind is CalibrationKind.CONSISTENT_LOG:
        if not math.isfinite(cal.tau):
            raise NotApplicableError("tau = inf has no finite threshold to invert")
        log_n = level * level / cal.tau
    else:
        log_n = math.log(level) / cal.gamma
    if log_n > 700.0:
        return math.inf
    # strict inequality: need log n > log_n
    m = max(2, math.floor(math.exp(log_n)) + 1)
    # the closed form can land one step off when the crossing is an exact
    # integer; settle it against the direct check while n is exact in a double
    for _ in range(8 if m < 2**52 else 0):
        if not confusion_margin_holds(seq, cal, n=m, M=M):
            m += 1
        elif m > 2 and confusion_margin_holds(seq, cal, n=m - 1, M=M):
            m -= 1
        else:
            break
    return m


def llr_params(seq, n, design=DEFAULT_DESIGN, cal=None):
    n = _check_n(n)
    b = beta_at(seq, n, design, cal)
    var = b * b * design.sxx(n)
    return LLRParams(mean=-0.5 * var, variance=var)


def mc_llr_check(seq, n, design=DEFAULT_DESIGN, replicates=100_000, seed=0, cal=None,
                 workers=1, backend=None):
    """Sample mean and variance of the log-likelihood ratio under simulated null data."""
    if replicates < 2:
        raise ValueError("replicates must be >= 2")
    n = _check_n(n)
    b = beta_at(seq, n, design, cal)
    xs = design.xs(n)
    sxx = float(np.dot(xs, xs))
    stats = simulate_statistics(0.0, n, design, replicates, seed, workers, backend)
    llr = b * stats - 0.5 * b * b * sxx
    return float(np.mean(llr)), float(np.var(llr, ddof=1))
