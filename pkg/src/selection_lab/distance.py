"""Distances between the null law P_{n,0} and the alternative P_{n,beta}.

``sum x_i y_i`` is sufficient, so the n-sample laws differ exactly as
N(0, 1) and N(delta, 1) with ``delta = beta * sqrt(sxx)``.
"""
import enum
import math
from dataclasses import dataclass

from .gauss import std_normal_cdf
from .selector import DEFAULT_DESIGN
from .sequences import Growth, UnclassifiableError, separation_growth

CHAIN_TOL = 1e-9


class SeparationClass(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"
    WELL = "well"


@dataclass(frozen=True)
class GaussianShiftPair:
    beta: float
    sxx: float

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not self.sxx > 0:
            raise ValueError(f"sxx must be > 0, got {self.sxx}")

    @classmethod
    def from_shift(cls, delta):
        return cls(beta=float(delta), sxx=1.0)

    @property
    def shift(self):
        return self.beta * math.sqrt(self.sxx)


def hellinger_affinity(pair):
    return math.exp(-pair.beta * pair.beta * pair.sxx / 8.0)


def hellinger_distance_sq(pair):
    # -expm1 keeps precision when the affinity is close to 1
    return -2.0 * math.expm1(-pair.beta * pair.beta * pair.sxx / 8.0)


def l1_distance(pair):
    """int |p - q| = 2 * (2 Phi(delta/2) - 1)."""
    half = 0.5 * pair.shift
    # 2 Phi(h) - 1 = 1 - 2 Phi(-h), exact in the upper tail
    return 2.0 * (1.0 - 2.0 * std_normal_cdf(-half))


def total_variation(pair):
    return 0.5 * l1_distance(pair)


def check_inequality_chain(pair, tol=CHAIN_TOL):
    """H^2 <= ||P - Q|| <= min(2 - A^2, 2H), each with slack ``tol``."""
    a = hellinger_affinity(pair)
    h2 = hellinger_distance_sq(pair)
    l1 = l1_distance(pair)
    upper = min(2.0 - a * a, 2.0 * math.sqrt(h2))
    return h2 <= l1 + tol and l1 <= upper + tol


def lemma1_gap(pair, threshold):
    """pi(beta) - pi(0) for the test rejecting when the standardized statistic exceeds ``threshold``.

    On the standardized scale the statistic is N(0,1) under the null and
    N(delta,1) under the alternative, so the gap is Phi(t) - Phi(t - delta).
    """
    t = float(threshold)
    if math.isnan(t):
        raise ValueError("threshold must not be NaN")
    if math.isinf(t):
        return 0.0
    return std_normal_cdf(t) - std_normal_cdf(t - pair.shift)


def likelihood_ratio_threshold(pair):
    """Cut-off where the two densities cross; it maximises :func:`lemma1_gap`."""
    return 0.5 * pair.shift


def classify_separation(seq, design=DEFAULT_DESIGN, cal=None):
    """STRONG / WEAK / WELL from the symbolic limit of beta_n * sqrt(sxx)."""
    g = separation_growth(seq, design, cal)
    if g is Growth.INFINITE:
        return SeparationClass.STRONG
    if g is Growth.ZERO:
        return SeparationClass.WEAK
    return SeparationClass.WELL


__all__ = [
    "CHAIN_TOL", "GaussianShiftPair", "SeparationClass", "UnclassifiableError",
    "check_inequality_chain", "classify_separation", "hellinger_affinity",
    "hellinger_distance_sq", "l1_distance", "lemma1_gap", "likelihood_ratio_threshold",
    "total_variation",
]
