"""Interval and test machinery against independent solvers and closed forms.

The quantile-pair solver is cross-checked live against scipy (different
distribution code, different root finder), interval coverage against the
exact quantile-event equivalence it must satisfy, and the power curve
against a direct scipy recomputation. Frozen constants come from those
same independent routes.
"""

import math

import numpy as np
import pytest

from nrpca.estimators import DegenerateSpectrumError, NrEstimate
from nrpca.inference import (
    CiResult,
    OrthogonalDirectionsError,
    QuantilePair,
    asymptotic_power,
    contribution_ci,
    direction_h,
    jarque_bera,
    optimal_ab,
    test_f1 as f1_test,
    test_f2 as f2_test,
    test_f3 as f3_test,
)
from nrpca.sampling import make_stream, sample_chi2
from nrpca.special import f_cdf

# minimum-length chi-square(19) pair at 95%, from an independent
# extended-precision solve of the stationarity system
A_19 = 9.899095215966568
B_19 = 38.327069509917955


def test_optimal_ab_frozen_pair():
    pair = optimal_ab(19, 0.05)
    assert pair.a == pytest.approx(A_19, rel=1e-12)
    assert pair.b == pytest.approx(B_19, rel=1e-12)


def test_optimal_ab_matches_scipy_root():
    from scipy import optimize, stats

    for df, alpha in [(9, 0.05), (19, 0.05), (23, 0.05), (27, 0.05), (19, 0.10)]:
        cov = 1.0 - alpha
        dist = stats.chi2(df)

        def b_of(a):
            return dist.ppf(dist.cdf(a) + cov)

        def stationarity(a):
            b = b_of(a)
            return a * a * dist.pdf(a) - b * b * dist.pdf(b)

        lo = dist.ppf(1e-6)
        hi = dist.ppf(alpha * (1.0 - 1e-9))
        a_ref = optimize.brentq(stationarity, lo, hi, xtol=1e-13, rtol=1e-14)
        b_ref = b_of(a_ref)

        pair = optimal_ab(df, alpha)
        assert pair.a == pytest.approx(a_ref, rel=1e-9)
        assert pair.b == pytest.approx(b_ref, rel=1e-9)


def test_optimal_ab_defining_equations():
    from scipy import stats

    for df, alpha in [(9, 0.05), (19, 0.05), (23, 0.01), (40, 0.05)]:
        pair = optimal_ab(df, alpha)
        dist = stats.chi2(df)
        coverage = dist.cdf(pair.b) - dist.cdf(pair.a)
        assert coverage == pytest.approx(1.0 - alpha, abs=1e-8)
        lhs = pair.a**2 * dist.pdf(pair.a)
        rhs = pair.b**2 * dist.pdf(pair.b)
        assert lhs == pytest.approx(rhs, rel=1e-6)


def test_optimal_ab_beats_nearby_pairs():
    from scipy import stats

    df, alpha = 19, 0.05
    pair = optimal_ab(df, alpha)
    dist = stats.chi2(df)
    best = 1.0 / pair.a - 1.0 / pair.b
    # any coverage-preserving move off the solution must widen the interval
    for bump in (0.99, 0.999, 1.001, 1.01):
        a = pair.a * bump
        b = dist.ppf(dist.cdf(a) + 1.0 - alpha)
        assert 1.0 / a - 1.0 / b > best


def test_optimal_ab_rejects_bad_inputs():
    with pytest.raises(ValueError):
        optimal_ab(1, 0.05)
    with pytest.raises(ValueError):
        optimal_ab(19, 0.0)
    with pytest.raises(ValueError):
        optimal_ab(19, 1.0)
    with pytest.raises(ValueError):
        optimal_ab(19, 1e-9)


def test_quantile_pair_requires_order():
    with pytest.raises(ValueError):
        QuantilePair(a=2.0, b=2.0)
    with pytest.raises(ValueError):
        QuantilePair(a=-1.0, b=2.0)


def test_ci_result_validates_bounds():
    with pytest.raises(ValueError):
        CiResult(lower=0.4, upper=0.3, a=1.0, b=2.0, alpha=0.05, df=9)
    with pytest.raises(ValueError):
        CiResult(lower=-0.1, upper=0.3, a=1.0, b=2.0, alpha=0.05, df=9)
    with pytest.raises(ValueError):
        CiResult(lower=0.1, upper=1.3, a=1.0, b=2.0, alpha=0.05, df=9)


def test_contribution_ci_pinned_intervals():
    # case-study totals with the known 4-decimal reference intervals
    cases = [
        (2717.0, 9865.0, 20, 0.1201, 0.3458),
        (1256.0, 11326.0, 24, 0.0557, 0.1663),
        (1501.0, 11081.0, 28, 0.0706, 0.1884),
    ]
    for lt1, kappa, n, lo, hi in cases:
        ci = contribution_ci(lt1, kappa, n)
        assert abs(ci.lower - lo) <= 5e-4
        assert abs(ci.upper - hi) <= 5e-4
        assert ci.df == n - 1


def test_contribution_ci_formula():
    lt1, kappa, n = 2717.0, 9865.0, 20
    ci = contribution_ci(lt1, kappa, n)
    mass = (n - 1) * lt1
    assert ci.lower == pytest.approx(mass / (ci.b * kappa + mass), rel=1e-14)
    assert ci.upper == pytest.approx(mass / (ci.a * kappa + mass), rel=1e-14)
    assert ci.a == pytest.approx(A_19, rel=1e-12)
    assert ci.b == pytest.approx(B_19, rel=1e-12)


def test_contribution_ci_degenerate_edges():
    ci = contribution_ci(0.0, 5.0, 20)
    assert (ci.lower, ci.upper) == (0.0, 0.0)
    ci = contribution_ci(5.0, 0.0, 20)
    assert (ci.lower, ci.upper) == (1.0, 1.0)
    with pytest.raises(DegenerateSpectrumError):
        contribution_ci(0.0, 0.0, 20)
    with pytest.raises(ValueError):
        contribution_ci(-1.0, 5.0, 20)
    with pytest.raises(ValueError):
        contribution_ci(5.0, 5.0, 2)


def test_contribution_ci_covers_iff_pivot_in_pair():
    # in the limit model the interval covers the true ratio exactly when
    # the chi-square pivot lands in [a, b]; check the equivalence per
    # draw, then the event frequency at scale
    n, lam1, kappa = 20, 1.0, 3.0
    truth = lam1 / (lam1 + kappa)
    pair = optimal_ab(n - 1, 0.05)

    rng = make_stream(813, 19)
    pivots = sample_chi2(rng, n - 1, size=200_000)

    for w in pivots[:3000]:
        ci = contribution_ci(w * lam1 / (n - 1), kappa, n)
        covered = ci.lower <= truth <= ci.upper
        assert covered == (pair.a <= w <= pair.b)

    frequency = np.mean((pivots >= pair.a) & (pivots <= pair.b))
    assert abs(frequency - 0.95) <= 0.002


def test_f1_statistic_and_symmetry():
    out = f1_test(4.0, 2.0, 10, 20)
    assert out.statistic == pytest.approx(2.0)
    assert (out.nu1, out.nu2) == (9, 19)
    swapped = f1_test(2.0, 4.0, 20, 10)
    assert swapped.statistic == pytest.approx(0.5)
    assert swapped.reject_null == out.reject_null


def test_f1_never_rejects_equal_eigenvalues():
    for alpha in (0.05, 0.01, 0.2, 0.0):
        out = f1_test(3.7, 3.7, 10, 20, alpha=alpha)
        assert out.statistic == 1.0
        assert not out.reject_null


def test_f1_two_sided_critical_region():
    # frozen 97.5% upper points for (9, 19) and (19, 9)
    upper = 2.8800520467237991307
    lower = 1.0 / 3.6833380832180524683
    out = f1_test(upper * 1.001, 1.0, 10, 20)
    assert out.reject_null
    out = f1_test(upper * 0.999, 1.0, 10, 20)
    assert not out.reject_null
    out = f1_test(lower * 0.999, 1.0, 10, 20)
    assert out.reject_null
    out = f1_test(lower * 1.001, 1.0, 10, 20)
    assert not out.reject_null
    out = f1_test(2.0, 1.0, 10, 20)
    assert out.lower_crit == pytest.approx(lower, rel=1e-12)
    assert out.upper_crit == pytest.approx(upper, rel=1e-12)


def test_f1_less_alternative_matches_cdf():
    # rejecting "less" at level alpha is the same event as the statistic's
    # F cdf falling below alpha
    for stat in (0.05, 0.2, 0.33, 0.5, 1.0, 2.0):
        out = f1_test(stat, 1.0, 10, 20, alpha=0.05, alternative="less")
        assert out.reject_null == (f_cdf(9, 19, stat) < 0.05)
        assert out.upper_crit is None
    with pytest.raises(ValueError):
        f1_test(1.0, 1.0, 10, 20, alternative="greater")


def test_f1_alpha_zero_never_rejects():
    out = f1_test(1e6, 1.0, 10, 20, alpha=0.0)
    assert not out.reject_null
    out = f1_test(1e-6, 1.0, 10, 20, alpha=0.0, alternative="less")
    assert not out.reject_null


def test_f1_rejects_bad_inputs():
    with pytest.raises(ValueError):
        f1_test(0.0, 1.0, 10, 20)
    with pytest.raises(ValueError):
        f1_test(1.0, 1.0, 2, 20)
    with pytest.raises(ValueError):
        f1_test(1.0, 1.0, 10, 20, alpha=0.5)


def test_direction_h_known_angle():
    u = np.array([1.0, 0.0, 0.0])
    v = np.array([1.0 / 3.0, math.sqrt(8.0) / 3.0, 0.0])
    assert direction_h(u, v) == pytest.approx(5.0 / 3.0, rel=1e-14)
    assert direction_h(v, u) == pytest.approx(5.0 / 3.0, rel=1e-14)
    assert direction_h(u, u) == pytest.approx(1.0, rel=1e-14)


def test_direction_h_reciprocal_inner_product():
    # the factor only depends on max(|c|, 1/|c|), so raw inner products
    # c and 1/c give the same value
    u = np.array([2.0, 0.0])
    v = np.array([0.4, 1.1])
    c = abs(float(u @ v))
    w = v / (c * c)
    assert direction_h(u, v) == pytest.approx(direction_h(u, w), rel=1e-12)
    assert direction_h(u, -v) == pytest.approx(direction_h(u, v), rel=1e-14)


def test_direction_h_orthogonal_raises():
    with pytest.raises(OrthogonalDirectionsError):
        direction_h(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        direction_h(np.array([0.0, 0.0]), np.array([0.0, 1.0]))


def _fake_estimate(lt1: float, kappa: float, h1: np.ndarray, n: int = 10):
    lambda_tilde = np.concatenate(([lt1], np.full(n - 3, 0.01)))
    lambda_hat = np.concatenate(([lt1 * 1.2], np.full(n - 2, 0.01)))
    return NrEstimate(
        d=h1.size,
        n=n,
        lambda_tilde=lambda_tilde,
        lambda_hat=lambda_hat,
        kappa_tilde=kappa,
        trace_dual=lt1 + kappa,
        h_tilde_1=np.asarray(h1, dtype=np.float64),
        h_hat_1=np.asarray(h1, dtype=np.float64),
        scores_tilde=np.zeros(n),
        scores_hat=np.zeros(n),
    )


def test_f2_composes_ratio_and_direction():
    e1 = np.array([1.0, 0.0, 0.0])
    tilted = np.array([1.0 / 3.0, math.sqrt(8.0) / 3.0, 0.0])
    big = _fake_estimate(4.0, 6.0, e1, n=10)
    small = _fake_estimate(2.0, 2.0, tilted, n=20)

    out = f2_test(big, small)
    assert out.statistic == pytest.approx(2.0 * 5.0 / 3.0, rel=1e-12)
    assert out.components.lambda_ratio == pytest.approx(2.0)
    assert out.components.h_tilde == pytest.approx(5.0 / 3.0, rel=1e-12)
    assert out.components.h_star == pytest.approx(5.0 / 3.0, rel=1e-12)
    assert (out.nu1, out.nu2) == (9, 19)

    # with the larger eigenvalue in the second sample the direction
    # factor flips to its reciprocal and the statistic inverts
    flipped = f2_test(small, big)
    assert flipped.statistic == pytest.approx(1.0 / out.statistic, rel=1e-12)
    assert flipped.components.h_star == pytest.approx(3.0 / 5.0, rel=1e-12)


def test_f3_adds_tail_factor():
    e1 = np.array([1.0, 0.0, 0.0])
    tilted = np.array([1.0 / 3.0, math.sqrt(8.0) / 3.0, 0.0])
    big = _fake_estimate(4.0, 6.0, e1, n=10)
    small = _fake_estimate(2.0, 2.0, tilted, n=20)

    out = f3_test(big, small)
    assert out.components.gamma_tilde == pytest.approx(3.0)
    assert out.components.gamma_star == pytest.approx(3.0)
    assert out.statistic == pytest.approx(2.0 * (5.0 / 3.0) * 3.0, rel=1e-12)

    flipped = f3_test(small, big)
    assert flipped.statistic == pytest.approx(1.0 / out.statistic, rel=1e-12)
    assert flipped.components.gamma_star == pytest.approx(1.0 / 3.0, rel=1e-12)

    dead_tail = _fake_estimate(4.0, 0.0, e1, n=10)
    with pytest.raises(DegenerateSpectrumError):
        f3_test(dead_tail, small)


def test_f2_identical_samples_do_not_reject():
    e1 = np.array([1.0, 0.0, 0.0])
    est = _fake_estimate(4.0, 6.0, e1, n=10)
    out = f2_test(est, est)
    assert out.statistic == pytest.approx(1.0)
    assert not out.reject_null
    out3 = f3_test(est, est)
    assert out3.statistic == pytest.approx(1.0)
    assert not out3.reject_null


def test_asymptotic_power_pinned_values():
    # (nu1, nu2) = (9, 19) at the planted two-sample truth; constants
    # frozen from the scipy recomputation below
    args = dict(nu1=9, nu2=19, lambda_ratio=1.0 / 3.0, alpha=0.05)
    assert asymptotic_power(which="f1", **args) == pytest.approx(
        0.39033557611143815, abs=1e-9
    )
    assert asymptotic_power(which="f2", h=5.0 / 3.0, **args) == pytest.approx(
        0.726270345339368, abs=1e-9
    )
    assert asymptotic_power(
        which="f3", h=5.0 / 3.0, gamma=1.5, **args
    ) == pytest.approx(0.9080667011918491, abs=1e-9)


def test_asymptotic_power_matches_scipy():
    from scipy import stats

    nu1, nu2, alpha = 9, 19, 0.05
    upper = stats.f.ppf(1.0 - alpha / 2.0, nu1, nu2)
    lower = 1.0 / stats.f.ppf(1.0 - alpha / 2.0, nu2, nu1)
    for ratio, h, gamma, which in [
        (1.0 / 3.0, 1.0, 1.0, "f1"),
        (1.0 / 3.0, 5.0 / 3.0, 1.0, "f2"),
        (1.0 / 3.0, 5.0 / 3.0, 1.5, "f3"),
        (2.0, 1.3, 1.0, "f2"),
    ]:
        c = {"f1": ratio, "f2": ratio / h, "f3": ratio / (h * gamma)}[which]
        want = stats.f.cdf(lower / c, nu1, nu2) + stats.f.sf(upper / c, nu1, nu2)
        got = asymptotic_power(nu1, nu2, ratio, h=h, gamma=gamma, which=which)
        assert got == pytest.approx(want, abs=1e-10)


def test_asymptotic_power_null_equals_level():
    for alpha in (0.05, 0.01, 0.2):
        got = asymptotic_power(9, 19, 1.0, alpha=alpha)
        assert got == pytest.approx(alpha, abs=1e-12)


def test_asymptotic_power_monotone_in_ratio():
    powers = [
        asymptotic_power(9, 19, r) for r in (1.0, 1.5, 2.0, 3.0, 5.0)
    ]
    assert all(p2 > p1 for p1, p2 in zip(powers, powers[1:]))


def test_asymptotic_power_rejects_bad_inputs():
    with pytest.raises(ValueError):
        asymptotic_power(9, 19, 1.0, h=0.9)
    with pytest.raises(ValueError):
        asymptotic_power(9, 19, 1.0, gamma=0.5)
    with pytest.raises(ValueError):
        asymptotic_power(9, 19, -1.0)
    with pytest.raises(ValueError):
        asymptotic_power(9, 19, 1.0, alpha=0.5)
    with pytest.raises(ValueError):
        asymptotic_power(9, 19, 1.0, which="f4")


def test_jarque_bera_hand_computed():
    values = np.array([1.0, 2.0, 4.0, 1.5, 3.0, 2.5, 0.5, 5.0])
    n = values.size
    c = values - values.mean()
    m2 = np.mean(c**2)
    skew = np.mean(c**3) / m2**1.5
    kurt = np.mean(c**4) / m2**2
    want = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)

    jb = jarque_bera(values)
    assert jb.statistic == pytest.approx(want, rel=1e-13)
    assert jb.skewness == pytest.approx(skew, rel=1e-13)
    assert jb.kurtosis == pytest.approx(kurt, rel=1e-13)
    # chi-square(2) upper tail is exactly exp(-x/2)
    assert jb.p_value == pytest.approx(math.exp(-want / 2.0), rel=1e-12)


def test_jarque_bera_rejects_bad_inputs():
    with pytest.raises(ValueError):
        jarque_bera(np.arange(7.0))
    with pytest.raises(ValueError):
        jarque_bera(np.full(10, 2.5))
    with pytest.raises(ValueError):
        jarque_bera(np.zeros((3, 4)))


def test_jarque_bera_size_under_normality():
    # vectorized moment recomputation over many independent normal rows;
    # the 5% rejection rate at n=10000 should sit near nominal
    rng = np.random.default_rng(1234)
    reps, n = 2000, 10_000
    rejections = 0
    for _ in range(20):
        block = rng.standard_normal(size=(reps // 20, n))
        c = block - block.mean(axis=1, keepdims=True)
        m2 = np.mean(c**2, axis=1)
        skew = np.mean(c**3, axis=1) / m2**1.5
        kurt = np.mean(c**4, axis=1) / m2**2
        stat = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
        rejections += int(np.sum(np.exp(-stat / 2.0) < 0.05))
    rate = rejections / reps
    assert abs(rate - 0.05) <= 0.015

    # and the library function agrees with the vectorized oracle per row
    row = rng.standard_normal(size=n)
    c = row - row.mean()
    m2 = np.mean(c**2)
    want = n / 6.0 * (
        (np.mean(c**3) / m2**1.5) ** 2
        + (np.mean(c**4) / m2**2 - 3.0) ** 2 / 4.0
    )
    assert jarque_bera(row).statistic == pytest.approx(want, rel=1e-12)
