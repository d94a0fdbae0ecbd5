import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from selection_lab.distance import (GaussianShiftPair, SeparationClass, check_inequality_chain,
                                    classify_separation, hellinger_affinity, hellinger_distance_sq,
                                    l1_distance, lemma1_gap, likelihood_ratio_threshold)
from selection_lab.selector import DesignSpec, SelectorCalibration
from selection_lab.sequences import AlternativeSequence, UnclassifiableError, beta_at

E_INV = math.exp(-1.0)
# |phi(z) - phi(z - 2)| integrated by mpmath at 40 digits
L1_SHIFT_2 = 1.3653789842741717943


def phi(z):
    return math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)


def l1_oracle(delta):
    f = lambda z: abs(phi(z) - phi(z - delta))
    mid = 0.5 * delta
    kw = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    return quad(f, -np.inf, mid, **kw)[0] + quad(f, mid, np.inf, **kw)[0]


def affinity_oracle(delta):
    f = lambda z: math.sqrt(phi(z) * phi(z - delta))
    mid = 0.5 * delta
    kw = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    return quad(f, -np.inf, mid, **kw)[0] + quad(f, mid, np.inf, **kw)[0]


def test_affinity_examples():
    assert hellinger_affinity(GaussianShiftPair(0.0, 10.0)) == 1.0
    assert hellinger_affinity(GaussianShiftPair(2.0, 2.0)) == pytest.approx(E_INV, abs=1e-15)
    assert hellinger_affinity(GaussianShiftPair(1.0, 8.0)) == pytest.approx(E_INV, abs=1e-15)
    assert affinity_oracle(2 * math.sqrt(2)) == pytest.approx(E_INV, abs=1e-10)


def test_hellinger_sq_examples():
    assert hellinger_distance_sq(GaussianShiftPair(0.0, 3.0)) == 0.0
    assert hellinger_distance_sq(GaussianShiftPair(2.0, 2.0)) == pytest.approx(2 - 2 * E_INV, abs=1e-15)
    assert hellinger_distance_sq(GaussianShiftPair(10.0, 1e4)) == 2.0


def test_l1_examples():
    assert l1_distance(GaussianShiftPair(0.0, 7.0)) == 0.0
    assert l1_distance(GaussianShiftPair(2.0, 1.0)) == pytest.approx(L1_SHIFT_2, abs=1e-14)
    assert l1_oracle(2.0) == pytest.approx(L1_SHIFT_2, abs=1e-10)
    assert l1_distance(GaussianShiftPair(100.0, 1.0)) == 2.0


def test_closed_forms_match_integration_oracle():
    rng = np.random.default_rng(7)
    for delta in rng.uniform(0, 10, size=25):
        pair = GaussianShiftPair.from_shift(delta)
        assert abs(l1_distance(pair) - l1_oracle(delta)) <= 1e-8
        assert abs(hellinger_affinity(pair) - affinity_oracle(delta)) <= 1e-8


@pytest.mark.parametrize("beta,sxx", [(0.0, 5.0), (1.0, 1.0), (3.0, 50.0)])
def test_chain_examples(beta, sxx):
    assert check_inequality_chain(GaussianShiftPair(beta, sxx))


def test_chain_on_random_grid():
    rng = np.random.default_rng(11)
    for beta, sxx in zip(rng.uniform(0, 5, 1000), rng.uniform(1, 1e4, 1000)):
        assert check_inequality_chain(GaussianShiftPair(beta, sxx))


@given(st.floats(0, 5), st.floats(1, 1e4), st.floats(0.01, 100))
def test_affinity_depends_on_beta2_sxx_only(beta, sxx, scale):
    a = hellinger_affinity(GaussianShiftPair(beta, sxx))
    b = hellinger_affinity(GaussianShiftPair(beta * math.sqrt(scale), sxx / scale))
    assert abs(a - b) < 1e-12


def test_lemma1_examples():
    pair = GaussianShiftPair.from_shift(2.0)
    assert lemma1_gap(pair, 1.0) == pytest.approx(0.5 * l1_oracle(2.0), abs=1e-10)
    assert lemma1_gap(pair, 1.0) == pytest.approx(0.68268949213708589717, abs=1e-14)
    assert lemma1_gap(pair, math.inf) == 0.0
    assert lemma1_gap(pair, 0.0) == pytest.approx(0.47724986805182079280, abs=1e-14)
    assert lemma1_gap(pair, 0.0) < 0.5 * l1_distance(pair)


@given(st.floats(0, 12), st.floats(1, 1e3))
def test_lemma1_bound_and_attainment(delta, sxx):
    pair = GaussianShiftPair(delta / math.sqrt(sxx), sxx)
    half = 0.5 * l1_distance(pair)
    grid = np.linspace(-10, 20, 601)
    gaps = [lemma1_gap(pair, t) for t in grid]
    assert max(gaps) <= half + 1e-9
    assert abs(lemma1_gap(pair, likelihood_ratio_threshold(pair)) - half) <= 1e-6


def test_pair_validation():
    with pytest.raises(ValueError):
        GaussianShiftPair(1.0, 0.0)
    with pytest.raises(ValueError):
        GaussianShiftPair(math.nan, 1.0)


BIC = SelectorCalibration.consistent_log(1.0)


@pytest.mark.parametrize("seq,expected", [
    (AlternativeSequence.generic(0.25), SeparationClass.STRONG),   # beta_n = n^{-1/4}
    (AlternativeSequence.generic(-0.5), SeparationClass.WEAK),            # beta_n = 1/n
    (AlternativeSequence.generic(None, coef=3.0), SeparationClass.WELL),  # beta_n = 3/sqrt(n)
    (AlternativeSequence.yang(BIC), SeparationClass.STRONG),
    (AlternativeSequence.boundary(BIC), SeparationClass.STRONG),
    (AlternativeSequence.perfect(BIC), SeparationClass.STRONG),
    (AlternativeSequence.contiguous(2.0), SeparationClass.WELL),
    (AlternativeSequence.yang(SelectorCalibration.fixed_level(0.05)), SeparationClass.WELL),
    (AlternativeSequence.yang(SelectorCalibration.custom_power(0.1)), SeparationClass.STRONG),
])
def test_classify_separation(seq, expected):
    assert classify_separation(seq) is expected
    assert classify_separation(seq, DesignSpec.scaled(4.0)) is expected


def test_classification_matches_l1_trend():
    # the symbolic verdict agrees with where L1 is heading on a wide grid
    for seq, lo, hi in [(AlternativeSequence.generic(0.25), 1.9, 2.0),
                        (AlternativeSequence.generic(-0.5), 0.0, 1e-3)]:
        n = 10**8
        l1 = l1_distance(GaussianShiftPair(beta_at(seq, n), n))
        assert lo <= l1 <= hi


@pytest.mark.parametrize("cal", [SelectorCalibration.consistent_log(math.inf),
                                 SelectorCalibration.fixed_level(0.7)])
def test_unclassifiable(cal):
    with pytest.raises(UnclassifiableError):
        classify_separation(AlternativeSequence.yang(cal))
