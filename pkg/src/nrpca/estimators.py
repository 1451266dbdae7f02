"""Noise-reduction and conventional estimators of the first principal
component.

The conventional eigenvalues of the dual covariance absorb the entire
tail of the population spectrum as additive noise when d >> n. The
noise-reduction correction subtracts the average of the trailing
eigenvalues from each leading one:

    lambda_tilde_i = lambda_hat_i - (trace - sum_{j<=i} lambda_hat_j)/(n-1-i)

for i = 1..n-2, which is nonnegative by construction because each
lambda_hat_i dominates the mean of the eigenvalues below it. The first
corrected eigenvalue drives the direction estimate

    h_tilde_1 = (Xc u_hat_1) / sqrt((n-1) lambda_tilde_1),

a deliberately non-unit vector with ||h_tilde_1||^2 = lh_1/lt_1 >= 1,
and the scores s_tilde_1j = sqrt((n-1) lambda_tilde_1) * u_hat_1j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import (
    DataMatrix,
    SpectralDecomposition,
    center_columns,
    dual_covariance,
    sym_eigen,
)

__all__ = [
    "DegenerateSpectrumError",
    "NrEstimate",
    "nr_eigenvalues",
    "kappa_tilde",
    "pc_direction",
    "pc_scores",
    "score_mse",
    "contribution_ratio",
    "nr_estimate",
]

# negatives beyond this fraction of the trace indicate numerical damage,
# not the usual harmless round-off at an exact zero
_CLAMP_REL = 1e-14


class DegenerateSpectrumError(ValueError):
    """The corrected first eigenvalue vanished; directions are undefined."""


def nr_eigenvalues(
    decomposition: SpectralDecomposition | np.ndarray,
    n: int,
    trace: float | None = None,
) -> np.ndarray:
    """Noise-corrected eigenvalues lambda_tilde_1..lambda_tilde_{n-2}.

    Parameters
    ----------
    decomposition : SpectralDecomposition or ndarray
        The dual covariance spectrum (descending). An array of
        eigenvalues is accepted directly.
    n : int
        Sample count; the correction divides by n - 1 - i.
    trace : float, optional
        Total spectral mass. Defaults to the eigenvalue sum.
    """
    if isinstance(decomposition, SpectralDecomposition):
        eigenvalues = decomposition.eigenvalues
    else:
        eigenvalues = np.asarray(decomposition, dtype=np.float64)
    n = int(n)
    if n < 3:
        raise ValueError(f"need n >= 3 samples, got {n}")
    if eigenvalues.size < n - 1:
        raise ValueError(
            f"expected at least {n - 1} eigenvalues for n={n}, got {eigenvalues.size}"
        )
    total = float(eigenvalues.sum()) if trace is None else float(trace)
    leading = eigenvalues[: n - 2]
    partial = np.cumsum(leading)
    divisors = (n - 1) - np.arange(1, n - 1, dtype=np.float64)
    corrected = leading - (total - partial) / divisors
    floor = -_CLAMP_REL * max(abs(total), 1.0)
    if np.any(corrected < floor):
        worst = float(corrected.min())
        raise ValueError(
            f"corrected eigenvalue {worst:.3e} is negative beyond round-off; "
            "the input spectrum is not a valid descending dual spectrum"
        )
    return np.maximum(corrected, 0.0)


def kappa_tilde(trace_dual: float, lambda_tilde_1: float) -> float:
    """Tail-mass estimate: the trace left after the corrected first value.

    Defined as trace_dual - lambda_tilde_1 (algebraically equal to
    (n-1)(trace - lambda_hat_1)/(n-2)); clamped at zero only against
    round-off since lambda_tilde_1 <= trace holds in exact arithmetic.
    """
    trace_dual = float(trace_dual)
    lambda_tilde_1 = float(lambda_tilde_1)
    value = trace_dual - lambda_tilde_1
    if value < -_CLAMP_REL * max(abs(trace_dual), 1.0):
        raise ValueError(
            f"lambda_tilde_1={lambda_tilde_1} exceeds trace={trace_dual}; "
            "inputs are not from the same decomposition"
        )
    return max(value, 0.0)


def pc_direction(xc: DataMatrix, u1: np.ndarray, scale: float) -> np.ndarray:
    """Direction estimate (Xc u1)/sqrt(scale) with scale = (n-1)*lambda.

    With the conventional eigenvalue the result has unit norm; with the
    corrected one the norm is sqrt(lambda_hat_1/lambda_tilde_1) >= 1.
    """
    scale = float(scale)
    if scale <= 0.0:
        raise DegenerateSpectrumError(
            f"direction scale must be positive, got {scale}; "
            "a vanished first eigenvalue leaves the direction undefined"
        )
    u1 = np.asarray(u1, dtype=np.float64)
    if u1.shape != (xc.n,):
        raise ValueError(f"u1 must have length n={xc.n}, got shape {u1.shape}")
    return (xc.values @ u1) / math.sqrt(scale)


def pc_scores(u1: np.ndarray, lam: float, n: int) -> np.ndarray:
    """Score estimates sqrt((n-1)*lam) * u1; all zero when lam is zero."""
    lam = float(lam)
    if lam < 0.0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    u1 = np.asarray(u1, dtype=np.float64)
    n = int(n)
    if u1.shape != (n,):
        raise ValueError(f"u1 must have length n={n}, got shape {u1.shape}")
    return math.sqrt((n - 1) * lam) * u1


def score_mse(estimated: np.ndarray, truth: np.ndarray) -> float:
    """Mean squared difference between estimated and true scores."""
    estimated = np.asarray(estimated, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimated.shape != truth.shape:
        raise ValueError(
            f"length mismatch: estimated {estimated.shape} vs truth {truth.shape}"
        )
    diff = estimated - truth
    return float(diff @ diff) / diff.size


def contribution_ratio(lambda_tilde_1: float, trace_dual: float) -> float:
    """Fraction of total variance carried by the first component."""
    trace_dual = float(trace_dual)
    if trace_dual <= 0.0:
        raise ValueError(f"trace must be positive, got {trace_dual}")
    lambda_tilde_1 = float(lambda_tilde_1)
    if lambda_tilde_1 < 0.0:
        raise ValueError(f"lambda_tilde_1 must be nonnegative, got {lambda_tilde_1}")
    return min(1.0, lambda_tilde_1 / trace_dual)


@dataclass(frozen=True)
class NrEstimate:
    """Everything the first-component analysis produces for one dataset.

    lambda_tilde holds the corrected eigenvalues (length n-2), lambda_hat
    the conventional ones (length n-1, the structurally zero last dual
    eigenvalue dropped). kappa_tilde is trace_dual - lambda_tilde[0] by
    definition, so the two always sum back to the trace. h_hat_1 is the
    unit conventional direction, h_tilde_1 the inflated corrected one.
    """

    d: int
    n: int
    lambda_tilde: np.ndarray
    lambda_hat: np.ndarray
    kappa_tilde: float
    trace_dual: float
    h_tilde_1: np.ndarray
    h_hat_1: np.ndarray
    scores_tilde: np.ndarray
    scores_hat: np.ndarray

    @property
    def contribution_ratio(self) -> float:
        return contribution_ratio(float(self.lambda_tilde[0]), self.trace_dual)

    @property
    def h_tilde_norm_sq(self) -> float:
        """Norm inflation of the corrected direction, lh_1/lt_1 >= 1."""
        return float(self.h_tilde_1 @ self.h_tilde_1)

    def aligned_with(self, direction: np.ndarray) -> "NrEstimate":
        """Flip estimate signs so the estimated direction points along
        a known true direction (used by simulations where truth exists)."""
        direction = np.asarray(direction, dtype=np.float64)
        if float(direction @ self.h_hat_1) >= 0.0:
            return self
        return replace(
            self,
            h_tilde_1=-self.h_tilde_1,
            h_hat_1=-self.h_hat_1,
            scores_tilde=-self.scores_tilde,
            scores_hat=-self.scores_hat,
        )


def nr_estimate(x: DataMatrix | np.ndarray) -> NrEstimate:
    """Run the full first-component pipeline on a data matrix.

    Centers the columns, forms the dual covariance, decomposes it, applies
    the noise correction, and produces both direction and score estimates.

    Raises
    ------
    DegenerateSpectrumError
        If lambda_tilde_1 is zero (no detectable spike; the direction and
        downstream tests would be meaningless).
    """
    if not isinstance(x, DataMatrix):
        x = DataMatrix(np.asarray(x, dtype=np.float64))
    xc = center_columns(x)
    decomposition = sym_eigen(dual_covariance(xc))
    n = x.n
    trace_dual = float(decomposition.eigenvalues.sum())
    lambda_hat = decomposition.eigenvalues[: n - 1].copy()
    lambda_tilde = nr_eigenvalues(decomposition, n, trace=trace_dual)
    lt1 = float(lambda_tilde[0])
    lh1 = float(lambda_hat[0])
    if lt1 <= _CLAMP_REL * max(abs(trace_dual), 1.0):
        raise DegenerateSpectrumError(
            "corrected first eigenvalue is zero: the spectrum has no "
            "detectable spike, so directions and scores are undefined"
        )
    kt = kappa_tilde(trace_dual, lt1)
    u1 = decomposition.eigenvectors[:, 0]
    return NrEstimate(
        d=x.d,
        n=n,
        lambda_tilde=lambda_tilde,
        lambda_hat=lambda_hat,
        kappa_tilde=kt,
        trace_dual=trace_dual,
        h_tilde_1=pc_direction(xc, u1, (n - 1) * lt1),
        h_hat_1=pc_direction(xc, u1, (n - 1) * lh1),
        scores_tilde=pc_scores(u1, lt1, n),
        scores_hat=pc_scores(u1, lh1, n),
    )
