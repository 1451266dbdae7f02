"""Confidence interval for the first contribution ratio and the three
F-based equality tests for two covariance spectra.

The interval uses the chi-square quantile pair (a, b) minimizing the
length objective 1/a - 1/b subject to coverage 1 - alpha; at the optimum
the stationarity condition a^2 g(a) = b^2 g(b) holds for the chi-square
density g. The tests compare two samples' corrected first eigenvalues
(F1), additionally their direction estimates (F2), and additionally
their tail masses (F3); each is F-distributed with (n1-1, n2-1) degrees
of freedom under its null, so all three share one two-sided decision
rule built from F quantiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .estimators import DegenerateSpectrumError, NrEstimate
from .special import (
    chi2_cdf,
    chi2_pdf,
    chi2_quantile,
    chi2_sf,
    f_cdf,
    f_upper_point,
)

__all__ = [
    "OrthogonalDirectionsError",
    "QuantilePair",
    "CiResult",
    "TestComponents",
    "TestOutcome",
    "JarqueBera",
    "optimal_ab",
    "contribution_ci",
    "direction_h",
    "test_f1",
    "test_f2",
    "test_f3",
    "asymptotic_power",
    "jarque_bera",
]


class OrthogonalDirectionsError(ValueError):
    """The two direction estimates are numerically orthogonal, so the
    direction-adjusted statistics are unbounded and the test is invalid."""


@dataclass(frozen=True)
class QuantilePair:
    """Chi-square quantile pair with 0 < a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 < self.a < self.b):
            raise ValueError(f"need 0 < a < b, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class CiResult:
    """Two-sided interval for the first contribution ratio."""

    lower: float
    upper: float
    a: float
    b: float
    alpha: float
    df: int

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ValueError(
                f"interval must satisfy 0 <= lower <= upper <= 1, "
                f"got [{self.lower}, {self.upper}]"
            )


@dataclass(frozen=True)
class TestComponents:
    """Multiplicative pieces of a test statistic, where applicable."""

    lambda_ratio: float
    h_tilde: float | None = None
    h_star: float | None = None
    gamma_tilde: float | None = None
    gamma_star: float | None = None


@dataclass(frozen=True)
class TestOutcome:
    """Decision record for one equality test."""

    statistic: float
    nu1: int
    nu2: int
    alpha: float
    alternative: str
    lower_crit: float
    upper_crit: float | None
    reject_null: bool
    components: TestComponents


@dataclass(frozen=True)
class JarqueBera:
    """Normality screen result."""

    statistic: float
    p_value: float
    skewness: float
    kurtosis: float


def optimal_ab(df: int, alpha: float) -> QuantilePair:
    """Minimum-length chi-square quantile pair at coverage 1 - alpha.

    Minimizes 1/a - 1/b subject to G_df(b) - G_df(a) = 1 - alpha by a
    golden-section search over a, then polishes the root of the
    stationarity condition a^2 g(a) = b^2 g(b) by bisection. The result
    is deterministic for fixed (df, alpha).
    """
    df = int(df)
    if df < 2:
        raise ValueError(f"df must be at least 2, got {df}")
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if alpha < 1e-6:
        raise ValueError(f"alpha={alpha} is below the solver bracket (1e-6)")

    coverage = 1.0 - alpha

    def b_of(a: float) -> float:
        return chi2_quantile(df, chi2_cdf(df, a) + coverage)

    def objective(a: float) -> float:
        return 1.0 / a - 1.0 / b_of(a)

    def stationarity(a: float) -> float:
        b = b_of(a)
        return a * a * chi2_pdf(df, a) - b * b * chi2_pdf(df, b)

    a_hi = chi2_quantile(df, alpha)
    a_lo = chi2_quantile(df, alpha * 1e-4)

    # golden-section: the objective is unimodal in a on (0, q_alpha)
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    left, right = a_lo, a_hi * (1.0 - 1e-9)
    x1 = right - inv_phi * (right - left)
    x2 = left + inv_phi * (right - left)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(80):
        if f1 <= f2:
            right, x2, f2 = x2, x1, f1
            x1 = right - inv_phi * (right - left)
            f1 = objective(x1)
        else:
            left, x1, f1 = x1, x2, f2
            x2 = left + inv_phi * (right - left)
            f2 = objective(x2)
        if right - left <= 1e-10 * max(1.0, right):
            break
    a = 0.5 * (left + right)

    # polish: bisect the stationarity condition around the golden minimum
    width = max(1e-3 * a, 4.0 * (right - left))
    lo = max(a - width, a_lo * 1e-3)
    hi = min(a + width, a_hi * (1.0 - 1e-12))
    s_lo, s_hi = stationarity(lo), stationarity(hi)
    if s_lo * s_hi > 0.0:
        lo, hi = a_lo * 1e-3, a_hi * (1.0 - 1e-12)
        s_lo, s_hi = stationarity(lo), stationarity(hi)
    if s_lo * s_hi <= 0.0:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            s_mid = stationarity(mid)
            if s_mid == 0.0 or hi - lo <= 1e-14 * max(1.0, mid):
                lo = hi = mid
                break
            if (s_mid > 0.0) == (s_hi > 0.0):
                hi, s_hi = mid, s_mid
            else:
                lo, s_lo = mid, s_mid
        a = 0.5 * (lo + hi)
    return QuantilePair(a, b_of(a))


def contribution_ci(
    lambda_tilde_1: float, kappa_tilde: float, n: int, alpha: float = 0.05
) -> CiResult:
    """Confidence interval for the first contribution ratio.

    The interval is
    [(n-1) lt1 / (b k + (n-1) lt1), (n-1) lt1 / (a k + (n-1) lt1)]
    with (a, b) the minimum-length chi-square(n-1) pair at 1 - alpha.
    """
    lambda_tilde_1 = float(lambda_tilde_1)
    kappa_tilde = float(kappa_tilde)
    n = int(n)
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if lambda_tilde_1 < 0.0 or kappa_tilde < 0.0:
        raise ValueError("lambda_tilde_1 and kappa_tilde must be nonnegative")
    if lambda_tilde_1 == 0.0 and kappa_tilde == 0.0:
        raise DegenerateSpectrumError(
            "lambda_tilde_1 and kappa_tilde are both zero; the ratio is undefined"
        )
    df = n - 1
    pair = optimal_ab(df, alpha)
    mass = (n - 1) * lambda_tilde_1
    lower = mass / (pair.b * kappa_tilde + mass)
    upper = mass / (pair.a * kappa_tilde + mass)
    return CiResult(
        lower=lower, upper=upper, a=pair.a, b=pair.b, alpha=alpha, df=df
    )


@lru_cache(maxsize=256)
def _two_sided_bounds(nu1: int, nu2: int, alpha: float) -> tuple[float, float]:
    if alpha == 0.0:
        return 0.0, math.inf
    return 1.0 / f_upper_point(nu2, nu1, alpha / 2.0), f_upper_point(
        nu1, nu2, alpha / 2.0
    )


def _check_test_alpha(alpha: float) -> float:
    alpha = float(alpha)
    # alpha == 0 is the degenerate never-reject limit used by the harness
    if not 0.0 <= alpha < 0.5:
        raise ValueError(f"test alpha must lie in [0, 1/2), got {alpha}")
    return alpha


def _two_sided_outcome(
    statistic: float,
    nu1: int,
    nu2: int,
    alpha: float,
    components: TestComponents,
) -> TestOutcome:
    lower, upper = _two_sided_bounds(nu1, nu2, alpha)
    return TestOutcome(
        statistic=statistic,
        nu1=nu1,
        nu2=nu2,
        alpha=alpha,
        alternative="two-sided",
        lower_crit=lower,
        upper_crit=upper,
        reject_null=bool(statistic < lower or statistic > upper),
        components=components,
    )


def _positive_eigenvalue(value: float, name: str) -> float:
    value = float(value)
    if value <= 0.0:
        raise DegenerateSpectrumError(f"{name} must be positive, got {value}")
    return value


def test_f1(
    lt1: float,
    lt2: float,
    n1: int,
    n2: int,
    alpha: float = 0.05,
    alternative: str = "two-sided",
) -> TestOutcome:
    """Equality test of the first eigenvalues via F1 = lt1/lt2.

    Two-sided: reject when F1 leaves [1/F_{nu2,nu1}(a/2), F_{nu1,nu2}(a/2)].
    One-sided ("less", the first eigenvalue smaller): reject when
    F1 < 1/F_{nu2,nu1}(alpha).
    """
    lt1 = _positive_eigenvalue(lt1, "lt1")
    lt2 = _positive_eigenvalue(lt2, "lt2")
    n1, n2 = int(n1), int(n2)
    if n1 < 3 or n2 < 3:
        raise ValueError(f"need n1, n2 >= 3, got ({n1}, {n2})")
    alpha = _check_test_alpha(alpha)
    nu1, nu2 = n1 - 1, n2 - 1
    statistic = lt1 / lt2
    components = TestComponents(lambda_ratio=statistic)
    if alternative == "two-sided":
        return _two_sided_outcome(statistic, nu1, nu2, alpha, components)
    if alternative == "less":
        lower = 0.0 if alpha == 0.0 else 1.0 / f_upper_point(nu2, nu1, alpha)
        return TestOutcome(
            statistic=statistic,
            nu1=nu1,
            nu2=nu2,
            alpha=alpha,
            alternative="less",
            lower_crit=lower,
            upper_crit=None,
            reject_null=bool(statistic < lower),
            components=components,
        )
    raise ValueError(f"alternative must be 'two-sided' or 'less', got {alternative!r}")


def direction_h(h1: np.ndarray, h2: np.ndarray) -> float:
    """Direction mismatch factor (|c| + 1/|c|)/2 for the raw inner
    product c of the two corrected direction vectors.

    The inputs are used exactly as estimated (no renormalization); their
    norm inflation is visible as NrEstimate.h_tilde_norm_sq. Always >= 1,
    with equality only for parallel unit-product directions.
    """
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    norm1 = float(np.linalg.norm(h1))
    norm2 = float(np.linalg.norm(h2))
    if norm1 == 0.0 or norm2 == 0.0:
        raise ValueError("direction vectors must be nonzero")
    inner = abs(float(h1 @ h2))
    if inner <= 1e-8 * norm1 * norm2:
        raise OrthogonalDirectionsError(
            "direction estimates are numerically orthogonal "
            f"(|inner|={inner:.3e} vs norms {norm1:.3e}, {norm2:.3e}); "
            "the direction-adjusted statistic is unbounded"
        )
    return 0.5 * inner + 0.5 / inner


def _h_star(est1: NrEstimate, est2: NrEstimate) -> tuple[float, float, float]:
    lt1 = _positive_eigenvalue(float(est1.lambda_tilde[0]), "lambda_tilde_1 (sample 1)")
    lt2 = _positive_eigenvalue(float(est2.lambda_tilde[0]), "lambda_tilde_1 (sample 2)")
    h = direction_h(est1.h_tilde_1, est2.h_tilde_1)
    star = h if lt1 >= lt2 else 1.0 / h
    return lt1 / lt2, h, star


def test_f2(
    est1: NrEstimate, est2: NrEstimate, alpha: float = 0.05
) -> TestOutcome:
    """Equality test of (first eigenvalue, first direction) pairs.

    F2 = F1 * h_star where h_star is the direction factor oriented by
    which sample carries the larger corrected eigenvalue. Two-sided only.
    """
    alpha = _check_test_alpha(alpha)
    ratio, h, star = _h_star(est1, est2)
    components = TestComponents(lambda_ratio=ratio, h_tilde=h, h_star=star)
    return _two_sided_outcome(
        ratio * star, est1.n - 1, est2.n - 1, alpha, components
    )


def test_f3(
    est1: NrEstimate, est2: NrEstimate, alpha: float = 0.05
) -> TestOutcome:
    """Equality test of whole covariance matrices.

    F3 = F1 * h_star * gamma_star, adding the tail-mass factor
    gamma = max of the two kappa ratios, oriented like h_star.
    Two-sided only.
    """
    alpha = _check_test_alpha(alpha)
    k1 = float(est1.kappa_tilde)
    k2 = float(est2.kappa_tilde)
    if k1 <= 0.0 or k2 <= 0.0:
        raise DegenerateSpectrumError(
            f"tail masses must be positive for F3, got ({k1}, {k2})"
        )
    ratio, h, h_star = _h_star(est1, est2)
    gamma = max(k1 / k2, k2 / k1)
    lt1 = float(est1.lambda_tilde[0])
    lt2 = float(est2.lambda_tilde[0])
    gamma_star = gamma if lt1 >= lt2 else 1.0 / gamma
    components = TestComponents(
        lambda_ratio=ratio,
        h_tilde=h,
        h_star=h_star,
        gamma_tilde=gamma,
        gamma_star=gamma_star,
    )
    return _two_sided_outcome(
        ratio * h_star * gamma_star, est1.n - 1, est2.n - 1, alpha, components
    )


def asymptotic_power(
    nu1: int,
    nu2: int,
    lambda_ratio: float,
    h: float = 1.0,
    gamma: float = 1.0,
    alpha: float = 0.05,
    which: str = "f1",
) -> float:
    """Large-d power of a two-sided test at the given truth.

    The statistic converges to c*f with f ~ F_{nu1,nu2} and c the first
    eigenvalue ratio, divided by h for the direction-adjusted test and by
    h*gamma for the full-covariance test. The power is the probability
    that c*f leaves the two-sided acceptance interval.
    """
    nu1, nu2 = int(nu1), int(nu2)
    if nu1 < 1 or nu2 < 1:
        raise ValueError(f"degrees of freedom must be positive, got ({nu1}, {nu2})")
    lambda_ratio = float(lambda_ratio)
    if lambda_ratio <= 0.0:
        raise ValueError(f"lambda_ratio must be positive, got {lambda_ratio}")
    h = float(h)
    gamma = float(gamma)
    if h < 1.0 or gamma < 1.0:
        raise ValueError(f"h and gamma must be >= 1, got h={h}, gamma={gamma}")
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")
    which = which.lower()
    if which == "f1":
        c = lambda_ratio
    elif which == "f2":
        c = lambda_ratio / h
    elif which == "f3":
        c = lambda_ratio / (h * gamma)
    else:
        raise ValueError(f"which must be 'f1', 'f2' or 'f3', got {which!r}")
    lower, upper = _two_sided_bounds(nu1, nu2, alpha)
    return f_cdf(nu1, nu2, lower / c) + 1.0 - f_cdf(nu1, nu2, upper / c)


def jarque_bera(values: np.ndarray) -> JarqueBera:
    """Moment-based normality screen for score vectors.

    JB = n/6 (skew^2 + (kurtosis - 3)^2 / 4), referred to the chi-square
    upper tail with 2 degrees of freedom. Needs at least 8 values for the
    moments to mean anything.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError(f"values must be a vector, got shape {values.shape}")
    n = values.size
    if n < 8:
        raise ValueError(f"need at least 8 values, got {n}")
    centered = values - values.mean()
    m2 = float(np.mean(centered**2))
    if m2 <= 0.0:
        raise ValueError("values have zero variance; moments are undefined")
    skew = float(np.mean(centered**3)) / m2**1.5
    kurt = float(np.mean(centered**4)) / (m2 * m2)
    statistic = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) ** 2)
    return JarqueBera(
        statistic=statistic,
        p_value=chi2_sf(2.0, statistic),
        skewness=skew,
        kurtosis=kurt,
    )
