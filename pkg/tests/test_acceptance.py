"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines.
"""
import math
from dataclasses import replace

import numpy as np
from scipy.integrate import quad

from selection_lab import lab
from selection_lab.distance import (GaussianShiftPair, check_inequality_chain, hellinger_affinity,
                                    l1_distance, lemma1_gap, likelihood_ratio_threshold)
from selection_lab.risk import exact_risk, mc_risk, scaled_risk_sup
from selection_lab.selector import (DEFAULT_DESIGN, SelectorCalibration, simulate_selection_prob,
                                    simulate_statistics)
from selection_lab.sequences import (AlternativeSequence, beta_at,
                                     confusion_margin_holds, confusion_margin_min_n, is_contiguous,
                                     llr_params, mc_llr_check, power_along, scaled_bias_along)

from selection_lab._accel import HAVE_NUMBA

BIC = SelectorCalibration.consistent_log(1.0)
AIC = SelectorCalibration.fixed_level(0.05)
GRID = [10**k for k in range(2, 9)]
BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


def report(num, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
    assert ok, detail


def strictly_increasing(v):
    return all(b > a for a, b in zip(v, v[1:]))


def strictly_decreasing(v):
    return all(b < a for a, b in zip(v, v[1:]))


def test_criterion_01_boundary_power_half():
    vals = [p for _, p in power_along(AlternativeSequence.boundary(BIC), BIC, n_grid=GRID)]
    worst = max(abs(p - 0.5) for p in vals)
    report(1, worst <= 1e-12, f"boundary power max |pi - 1/2| = {worst:.3g}")


def test_criterion_02_yang_divergence():
    seq = AlternativeSequence.yang(BIC, 0.5)
    sb = [v for _, v in scaled_bias_along(seq, BIC, n_grid=GRID)]
    pw = [v for _, v in power_along(seq, BIC, n_grid=GRID)]
    v_sb = lab.classify_limit(sb, lab.GRID_THRESHOLDS).tag
    v_pw = lab.classify_limit(pw, lab.YANG_POWER_THRESHOLDS).tag
    ok = (strictly_increasing(sb) and sb[-1] > 4 and pw[-1] < 0.02
          and v_sb is lab.Verdict.DIVERGES and v_pw is lab.Verdict.TENDS_TO_ZERO)
    report(2, ok, f"scaled_bias(1e8) = {sb[-1]:.4f}, power(1e8) = {pw[-1]:.4f}, "
                  f"verdicts {v_sb.value}/{v_pw.value}")


def test_criterion_03_perfect_sequence():
    seq = AlternativeSequence.perfect(BIC, 1.0)
    sb = [v for _, v in scaled_bias_along(seq, BIC, n_grid=GRID)]
    pw = power_along(seq, BIC, n_grid=GRID)[-1][1]
    ok = pw > 0.999 and strictly_decreasing(sb) and sb[-1] < 1e-2
    report(3, ok, f"power(1e8) = {pw:.6f}, scaled_bias(1e8) = {sb[-1]:.3g}")


def test_criterion_04_contiguous_limit():
    sb = scaled_bias_along(AlternativeSequence.contiguous(2.0), BIC, n_grid=GRID)[-1][1]
    report(4, abs(sb - 4.0) <= 0.2, f"scaled_bias(1e8) = {sb:.4f}, target 4 +/- 0.2")


def test_criterion_05_aic_bic_sup_dichotomy():
    ns = (100, 1000, 10_000)
    aic = [scaled_risk_sup(n, AIC).sup_scaled_risk for n in ns]
    bic = [scaled_risk_sup(n, BIC).sup_scaled_risk for n in ns]
    aic_ratio = max(aic) / min(aic)
    bic_ratio = bic[-1] / bic[0]
    ok = aic_ratio < 3 and strictly_increasing(bic) and bic_ratio > 3
    report(5, ok, f"AIC sup {['%.4f' % v for v in aic]} (max/min {aic_ratio:.3f} < 3); "
                  f"BIC sup {['%.4f' % v for v in bic]} (final/initial {bic_ratio:.3f} > 3)")


def test_criterion_06_risk_closed_form_vs_mc():
    pts = [
        (0.0, 100, BIC),
        (beta_at(AlternativeSequence.yang(BIC, 0.5), 200), 200, BIC),
        (beta_at(AlternativeSequence.contiguous(2.0), 100), 100, BIC),
        (0.3, 50, AIC),
        (beta_at(AlternativeSequence.boundary(SelectorCalibration.custom_power(0.25)), 100), 100,
         SelectorCalibration.custom_power(0.25)),
        (0.12, 150, SelectorCalibration.consistent_log(2.0)),
    ]
    worst = 0.0
    for i, (beta, n, cal) in enumerate(pts):
        ex = exact_risk(beta, n, cal)
        mc = mc_risk(beta, n, cal, replicates=10**6, seed=1000 + i)
        worst = max(worst, abs(ex.risk - mc.risk) / mc.mc_std_error)
    report(6, worst <= 3.0, f"max |exact - mc| / se over {len(pts)} points = {worst:.3f}")


def _l1_oracle(delta):
    f = lambda x: abs(math.exp(-0.5 * x * x) - math.exp(-0.5 * (x - delta) ** 2)) / math.sqrt(2 * math.pi)
    m = 0.5 * delta
    return sum(quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
               for a, b in ((-math.inf, m), (m, math.inf)))


def _affinity_oracle(delta):
    f = lambda x: math.exp(-0.25 * x * x - 0.25 * (x - delta) ** 2) / math.sqrt(2 * math.pi)
    m = 0.5 * delta
    return sum(quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
               for a, b in ((-math.inf, m), (m, math.inf)))


def test_criterion_07_distance_chain_and_oracles():
    rng = np.random.default_rng(20240607)
    betas = 10.0 ** rng.uniform(-4, 1, 1000)
    sxxs = 10.0 ** rng.uniform(0, 8, 1000)
    chain_ok = all(check_inequality_chain(GaussianShiftPair(float(b), float(s)))
                   for b, s in zip(betas, sxxs))
    shifts = np.linspace(0.0, 12.0, 25)
    err_l1 = max(abs(l1_distance(GaussianShiftPair.from_shift(d)) - _l1_oracle(d)) for d in shifts)
    err_a = max(abs(hellinger_affinity(GaussianShiftPair.from_shift(d)) - _affinity_oracle(d))
                for d in shifts)
    ok = chain_ok and err_l1 <= 1e-8 and err_a <= 1e-8
    report(7, ok, f"chain holds at 1000 pairs: {chain_ok}; oracle error L1 {err_l1:.2g}, "
                  f"affinity {err_a:.2g}")


def test_criterion_08_lemma1_attainment():
    worst = 0.0
    for d in (0.5, 1.0, 2.0, 4.0):
        p = GaussianShiftPair.from_shift(d)
        worst = max(worst, abs(lemma1_gap(p, likelihood_ratio_threshold(p)) - 0.5 * l1_distance(p)))
    report(8, worst <= 1e-9, f"max |gap - L1/2| = {worst:.3g}")


def test_criterion_09_contiguity():
    power_cal = SelectorCalibration.custom_power(0.25)
    true_cases = [AlternativeSequence.contiguous(r) for r in (0.5, 1.0, 2.0, 5.0, 50.0)]
    true_cases += [AlternativeSequence.generic(None, 3.0), AlternativeSequence.generic(-0.5),
                   AlternativeSequence.generic(-2.0), AlternativeSequence.generic(-1.0, 7.0)]
    false_cases = []
    for cal in (BIC, SelectorCalibration.consistent_log(3.0), power_cal):
        false_cases += [AlternativeSequence.yang(cal, 0.5), AlternativeSequence.boundary(cal),
                        AlternativeSequence.perfect(cal, 0.5), AlternativeSequence.perfect(cal, 1.0)]
    false_cases += [AlternativeSequence.generic(0.1), AlternativeSequence.generic(1.0)]
    cls_ok = (all(is_contiguous(s) for s in true_cases)
              and not any(is_contiguous(s) for s in false_cases))
    r = 10**5
    seq = AlternativeSequence.contiguous(2.0)
    target = llr_params(seq, 400)
    mean, var = mc_llr_check(seq, 400, replicates=r, seed=9)
    z = abs(mean - target.mean) / math.sqrt(target.variance / r)
    report(9, cls_ok and z <= 3.0,
           f"classification correct on {len(true_cases) + len(false_cases)} sequences: {cls_ok}; "
           f"LLR mean {mean:.4f} vs {target.mean:.4f} ({z:.2f} se), variance {var:.4f}")


def test_criterion_10_confusion_margin():
    seq = AlternativeSequence.yang(BIC, 0.5)
    m = confusion_margin_min_n(seq, BIC, 1.0)
    below = confusion_margin_holds(seq, BIC, n=m - 1, M=1.0)
    above = all(confusion_margin_holds(seq, BIC, n=k, M=1.0) for k in (m, m + 1, m + 2, 10 * m))
    # the closed form exp(16) quoted alongside the criterion lies well above m
    quoted = all(confusion_margin_holds(seq, BIC, n=n, M=1.0) for n in GRID if n >= math.exp(16))
    boundary = AlternativeSequence.boundary(BIC)
    never = not any(confusion_margin_holds(boundary, BIC, n=n, M=mm)
                    for n in [2, 3, 55] + GRID for mm in (0.01, 1.0, 5.0))
    ok = (not below) and above and quoted and never
    report(10, ok, f"minimal n = {m} (holds at n-1: {below}); boundary never holds: {never}")


def test_criterion_11_determinism():
    def outputs(backend, workers):
        seq = AlternativeSequence.yang(BIC, 0.5)
        return (
            simulate_statistics(0.05, 64, DEFAULT_DESIGN, 3001, 5, workers, backend).tobytes(),
            repr(simulate_selection_prob(0.05, 64, BIC, replicates=3001, seed=5, workers=workers,
                                         backend=backend)),
            repr(mc_risk(0.05, 64, BIC, replicates=3001, seed=5, workers=workers, backend=backend)),
            repr(mc_llr_check(seq, 64, replicates=3001, seed=5, workers=workers, backend=backend)),
        )

    ok = True
    for backend in BACKENDS:
        ref = outputs(backend, 1)
        ok &= outputs(backend, 1) == ref and outputs(backend, 4) == ref and outputs(backend, 7) == ref
    cfg = lab.ScenarioConfig(lab.Scenario.YANG, BIC, (100, 200, 400),
                             AlternativeSequence.yang(BIC, 0.5), mc=lab.MonteCarloSpec(2000, 3, 1))
    csv1 = lab.format_csv(lab.run_scenario(cfg))
    ok &= csv1 == lab.format_csv(lab.run_scenario(cfg))
    ok &= csv1 == lab.format_csv(lab.run_scenario(replace(cfg, mc=lab.MonteCarloSpec(2000, 3, 5))))
    report(11, ok, f"identical bytes across repeats and 1/4/7 workers for backends {BACKENDS}")
