"""Multiple-testing adjustment, logistic LRT, and the time correlation.

The Holm adjustment is checked against hand-enumerated cases, a naive
reference, and statsmodels; the likelihood-ratio test against statsmodels
fits and an exact Fisher computation on separated groups.
"""
import numpy as np
import pytest
import scipy.stats
import statsmodels.api as sm
from statsmodels.stats.multitest import multipletests

from briefmix.stats import (correlation_reading_recognition, fit_logistic,
                            holm_bonferroni, logistic_lrt, pairwise_test)
from oracles import holm_reference


# --- Holm-Bonferroni -------------------------------------------------------

def test_holm_hand_cases():
    assert holm_bonferroni([0.01, 0.02, 0.03]) == \
        pytest.approx([0.03, 0.04, 0.04])
    assert holm_bonferroni([0.05]) == [0.05]
    assert holm_bonferroni([0.5, 0.5]) == [1.0, 1.0]
    assert holm_bonferroni([]) == []
    # results come back in input order
    assert holm_bonferroni([0.03, 0.01, 0.02]) == \
        pytest.approx([0.04, 0.03, 0.04])


def test_holm_matches_reference_and_statsmodels():
    gen = np.random.default_rng(42)
    for _ in range(500):
        m = int(gen.integers(1, 12))
        pvals = gen.random(m).tolist()
        got = holm_bonferroni(pvals)
        assert got == pytest.approx(holm_reference(pvals))
        sm_adj = multipletests(pvals, method="holm")[1]
        assert got == pytest.approx(list(sm_adj))


def test_holm_properties():
    gen = np.random.default_rng(7)
    for _ in range(300):
        m = int(gen.integers(1, 20))
        pvals = gen.random(m)
        adj = np.array(holm_bonferroni(pvals.tolist()))
        assert np.all(adj >= pvals - 1e-15)
        assert np.all(adj <= 1.0 + 1e-15)
        # adjustment preserves the p-value ordering
        order = np.argsort(pvals, kind="stable")
        assert np.all(np.diff(adj[order]) >= -1e-15)
        # sorted output is already a max-envelope fixed point
        s = adj[order]
        assert np.all(np.maximum.accumulate(s) == s)


# --- logistic likelihood-ratio test ---------------------------------------

def test_identical_groups_p_is_one():
    a = [0, 1, 0, 1, 1, 0, 1, 0]
    assert pairwise_test(a, list(a)) == pytest.approx(1.0, abs=1e-9)


def test_constant_outcomes_convention():
    assert pairwise_test([1] * 10, [1] * 12) == 1.0
    assert pairwise_test([0] * 10, [0] * 12) == 1.0


def test_perfect_separation_vs_fisher():
    p = pairwise_test([1] * 50, [0] * 50)
    assert p < 1e-6
    fisher = scipy.stats.fisher_exact([[50, 0], [0, 50]])[1]
    assert fisher < 1e-6


def test_symmetry_under_group_swap():
    gen = np.random.default_rng(11)
    a = (gen.random(40) < 0.6).astype(int).tolist()
    b = (gen.random(35) < 0.4).astype(int).tolist()
    assert pairwise_test(a, b) == pytest.approx(pairwise_test(b, a),
                                                abs=1e-9)


def lrt_via_statsmodels(y, treat, cov=None):
    cols = [np.ones_like(y, dtype=float)]
    if cov is not None:
        cols.append(np.asarray(cov, dtype=float))
    x_null = np.column_stack(cols)
    x_full = np.column_stack(cols + [np.asarray(treat, dtype=float)])
    ll0 = sm.Logit(y, x_null).fit(disp=0).llf
    ll1 = sm.Logit(y, x_full).fit(disp=0).llf
    return scipy.stats.chi2.sf(max(0.0, 2 * (ll1 - ll0)), 1)


def test_lrt_matches_statsmodels():
    gen = np.random.default_rng(5)
    for trial in range(20):
        n = 120
        treat = np.repeat([0, 1], n // 2)
        cov = gen.normal(size=n)
        logit = -0.3 + 0.8 * treat * (trial % 2) + 0.5 * cov
        y = (gen.random(n) < 1 / (1 + np.exp(-logit))).astype(int)
        if y.min() == y.max():
            continue
        mine = logistic_lrt(y, treat, cov)
        ref = lrt_via_statsmodels(y, treat, cov)
        assert mine == pytest.approx(ref, abs=1e-6)
        mine_nc = logistic_lrt(y, treat)
        ref_nc = lrt_via_statsmodels(y, treat)
        assert mine_nc == pytest.approx(ref_nc, abs=1e-6)


def test_fit_logistic_recovers_coefficients():
    gen = np.random.default_rng(3)
    n = 4000
    x = gen.normal(size=n)
    logit = 0.4 + 1.2 * x
    y = (gen.random(n) < 1 / (1 + np.exp(-logit))).astype(float)
    X = np.column_stack([np.ones(n), x])
    beta, llf = fit_logistic(X, y)
    assert beta[0] == pytest.approx(0.4, abs=0.15)
    assert beta[1] == pytest.approx(1.2, abs=0.15)
    assert llf < 0


def test_null_rejection_rate_near_alpha():
    gen = np.random.default_rng(99)
    rejections = 0
    trials = 400
    for _ in range(trials):
        a = (gen.random(100) < 0.4).astype(int).tolist()
        b = (gen.random(100) < 0.4).astype(int).tolist()
        if pairwise_test(a, b) < 0.05:
            rejections += 1
    assert 0.02 <= rejections / trials <= 0.09


# --- reading-time correlation ----------------------------------------------

def test_constant_time_convention():
    assert correlation_reading_recognition([60.0] * 8,
                                           [0.2, 0.4, 0.1, 0.5, 0.3,
                                            0.2, 0.6, 0.4]) == (0.0, 1.0)
    assert correlation_reading_recognition([], []) == (0.0, 1.0)


def test_increasing_pairs_positive_and_significant():
    times = [10.0 * (i + 1) for i in range(12)]
    rates = [0.05 * (i + 1) for i in range(12)]
    slope, p = correlation_reading_recognition(times, rates)
    assert slope > 0
    assert p < 0.05
    ref = scipy.stats.linregress(np.log10(1 + np.asarray(times)), rates)
    assert slope == pytest.approx(ref.slope)
    assert p == pytest.approx(ref.pvalue)


def test_linear_lrt_matches_statsmodels():
    import statsmodels.api as sm
    from briefmix.stats import linear_lrt

    rng = np.random.default_rng(40)
    for _ in range(20):
        n = 80
        treat = rng.integers(0, 2, n).astype(float)
        cov = rng.normal(0, 1, n)
        y = 1.0 + 0.4 * treat + 0.8 * cov + rng.normal(0, 1, n)
        for use_cov in (False, True):
            cols = [np.ones(n)]
            if use_cov:
                cols.append(cov)
            x_null = np.column_stack(cols)
            x_full = np.column_stack(cols + [treat])
            full = sm.OLS(y, x_full).fit()
            null = sm.OLS(y, x_null).fit()
            expected = full.compare_lr_test(null)[1]
            got = linear_lrt(y, treat, cov if use_cov else None)
            assert got == pytest.approx(expected, abs=1e-8)


def test_linear_lrt_conventions():
    from briefmix.stats import linear_lrt

    assert linear_lrt([2.0, 2.0, 2.0, 2.0], [0, 0, 1, 1]) == 1.0
    assert linear_lrt([1.0, 2.0], [0, 1]) == 1.0
    rng = np.random.default_rng(3)
    y = np.concatenate([rng.normal(0, 1, 100), rng.normal(3, 1, 100)])
    treat = np.concatenate([np.zeros(100), np.ones(100)])
    assert linear_lrt(y, treat) < 1e-10
