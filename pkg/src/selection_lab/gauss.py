"""Standard normal density, CDF, quantile and upper-truncated second moment.

All functions take Python/numpy scalars.  ``-inf`` and ``+inf`` are accepted
where a limit exists; NaN is always rejected.
"""
import math

from scipy.optimize import brentq

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)
# Phi(-39) underflows to 0, so this bracket covers every double p in (0, 1).
_QUANTILE_BRACKET = 39.0


def _check(z, name="z"):
    z = float(z)
    if math.isnan(z):
        raise ValueError(f"{name} must not be NaN")
    return z


def std_normal_pdf(z):
    z = _check(z)
    if math.isinf(z):
        raise ValueError("std_normal_pdf requires a finite argument")
    return INV_SQRT_2PI * math.exp(-0.5 * z * z)


def std_normal_cdf(z):
    """Phi(z), evaluated through erfc on the tail side for full relative accuracy."""
    z = _check(z)
    if z < 0.0:
        return 0.5 * math.erfc(-z / _SQRT2)
    return 1.0 - 0.5 * math.erfc(z / _SQRT2)


def std_normal_sf(z):
    """1 - Phi(z) without cancellation in the upper tail."""
    return std_normal_cdf(-_check(z))


def std_normal_quantile(p):
    """Inverse CDF by bracketed root finding on Phi.

    For p > 1/2 the root is found on the lower tail via ``-Phi^{-1}(1 - p)``
    so that both tails keep full relative precision.
    """
    p = _check(p, "p")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -_lower_quantile(1.0 - p)
    return _lower_quantile(p)


def _lower_quantile(p):
    # scaled residual keeps relative accuracy deep in the tail
    def f(z):
        return std_normal_cdf(z) / p - 1.0

    return brentq(f, -_QUANTILE_BRACKET, 0.0, xtol=1e-14, rtol=1e-15, maxiter=500)


def upper_truncated_second_moment(t):
    """E[Z^2 ; Z >= t] = t*phi(t) + 1 - Phi(t)."""
    t = _check(t, "t")
    if t == math.inf:
        return 0.0
    if t == -math.inf:
        return 1.0
    return t * std_normal_pdf(t) + std_normal_sf(t)


def lower_truncated_second_moment(t):
    """E[Z^2 ; Z < t], the complement of :func:`upper_truncated_second_moment`."""
    return 1.0 - upper_truncated_second_moment(t)
