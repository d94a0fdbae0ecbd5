import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from selection_lab.gauss import (lower_truncated_second_moment, std_normal_cdf, std_normal_pdf,
                                 std_normal_quantile, upper_truncated_second_moment)

mp.mp.dps = 40

# frozen from mpmath at 40 digits
PDF_1 = 0.24197072451914334980
CDF_1 = 0.84134474606854294859
Q_95 = 1.6448536269514727149
M2_1 = 0.40062597845060040121  # int_1^inf z^2 phi(z) dz


def test_pdf_values():
    assert std_normal_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)
    assert std_normal_pdf(1.0) == pytest.approx(PDF_1, abs=1e-15)
    assert std_normal_pdf(-2.3) == std_normal_pdf(2.3)


def test_cdf_values():
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(1.0) == pytest.approx(CDF_1, abs=1e-15)
    assert std_normal_cdf(-math.inf) == 0.0
    assert std_normal_cdf(math.inf) == 1.0


def test_quantile_values():
    assert std_normal_quantile(0.5) == 0.0
    assert std_normal_quantile(0.8413447461) == pytest.approx(1.0, abs=1e-9)
    assert std_normal_quantile(0.95) == pytest.approx(Q_95, abs=1e-12)


def test_truncated_moment_values():
    assert upper_truncated_second_moment(-math.inf) == 1.0
    assert upper_truncated_second_moment(math.inf) == 0.0
    assert upper_truncated_second_moment(0.0) == 0.5
    assert upper_truncated_second_moment(1.0) == pytest.approx(M2_1, abs=1e-14)


@pytest.mark.parametrize("f", [std_normal_cdf, upper_truncated_second_moment, std_normal_pdf])
def test_nan_rejected(f):
    with pytest.raises(ValueError):
        f(float("nan"))


def test_pdf_rejects_infinite():
    with pytest.raises(ValueError):
        std_normal_pdf(math.inf)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_quantile_domain(p):
    with pytest.raises(ValueError):
        std_normal_quantile(p)


def test_cdf_accuracy_against_mpmath():
    for z in np.linspace(-8, 8, 161):
        assert abs(std_normal_cdf(z) - float(mp.ncdf(z))) <= 1e-12
    # relative accuracy in the far lower tail
    for z in (-10.0, -20.0, -35.0):
        assert std_normal_cdf(z) == pytest.approx(float(mp.ncdf(z)), rel=1e-13)


def _tail_quad(f, lo):
    """int_lo^inf f, split at 0 so quad sees the bulk of the mass."""
    kw = dict(epsabs=1e-14, epsrel=1e-14, limit=200)
    if lo < 0:
        return quad(f, lo, 0.0, **kw)[0] + quad(f, 0.0, np.inf, **kw)[0]
    return quad(f, lo, np.inf, **kw)[0]


def test_matches_quadrature_oracle_at_random_points():
    rng = np.random.default_rng(20240601)
    for z in rng.uniform(-6, 6, size=25):
        cdf_quad = 1.0 - _tail_quad(lambda u: math.exp(-0.5 * u * u) / math.sqrt(2 * math.pi), z)
        assert abs(std_normal_cdf(z) - cdf_quad) <= 1e-9
        m2_quad = _tail_quad(lambda u: u * u * math.exp(-0.5 * u * u) / math.sqrt(2 * math.pi), z)
        assert abs(upper_truncated_second_moment(z) - m2_quad) <= 1e-9
        assert abs(std_normal_pdf(z) - float(mp.npdf(z))) <= 1e-9
    for p in rng.uniform(0.001, 0.999, size=25):
        z_ref = float(mp.findroot(lambda t: mp.ncdf(t) - mp.mpf(p), 0))
        assert abs(std_normal_quantile(p) - z_ref) <= 1e-9


@given(st.floats(-40, 40))
def test_cdf_symmetry(z):
    assert abs(std_normal_cdf(z) + std_normal_cdf(-z) - 1.0) <= 1e-12


@given(st.floats(0.001, 0.999))
def test_quantile_roundtrip(p):
    assert abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-10


@given(st.floats(1e-300, 1e-3))
def test_quantile_roundtrip_deep_tail(p):
    assert std_normal_cdf(std_normal_quantile(p)) == pytest.approx(p, rel=1e-9)


@given(st.floats(-50, 50, allow_infinity=False))
def test_truncated_moment_complement(t):
    up = upper_truncated_second_moment(t)
    assert 0.0 <= up <= 1.0
    assert abs(up + lower_truncated_second_moment(t) - 1.0) <= 1e-10


@given(st.lists(st.floats(-12, 12), min_size=2, max_size=40))
def test_cdf_monotone(zs):
    zs = sorted(zs)
    vals = [std_normal_cdf(z) for z in zs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_truncated_moment_nonincreasing_on_grid():
    grid = np.linspace(-12, 12, 4001)
    vals = np.array([upper_truncated_second_moment(t) for t in grid])
    assert np.all(np.diff(vals) <= 1e-16)
