"""Dense matrix containers, column centering, the dual sample covariance,
and a cyclic Jacobi eigensolver for small symmetric matrices.

Data matrices are d x n with samples as columns and d typically much
larger than n; all eigenwork happens on the n x n dual covariance, so the
Jacobi solver only ever sees small matrices where its determinism and
high relative accuracy are worth more than LAPACK speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DataMatrix",
    "SymMatrix",
    "SpectralDecomposition",
    "JacobiConvergenceError",
    "center_columns",
    "dual_covariance",
    "sym_eigen",
]


class JacobiConvergenceError(RuntimeError):
    """Raised when the rotation sweep cap is hit before convergence."""


def _as_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """A d x n data matrix, one variable per row, one sample per column.

    At least three samples are required; everything downstream assumes
    the sample count leaves room for centering and the noise correction.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_float_array(self.values, "values")
        if arr.ndim != 2:
            raise ValueError(f"values must be 2-dimensional, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("need at least one variable (row)")
        if arr.shape[1] < 3:
            raise ValueError(f"need at least 3 samples (columns), got {arr.shape[1]}")
        object.__setattr__(self, "values", arr)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SymMatrix:
    """A symmetric m x m matrix, symmetrized exactly on construction."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_float_array(self.values, "values")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"values must be square, got shape {arr.shape}")
        scale = np.abs(arr).max() if arr.size else 0.0
        if arr.size and np.abs(arr - arr.T).max() > 1e-8 * (1.0 + scale):
            raise ValueError("matrix is not symmetric within tolerance")
        object.__setattr__(self, "values", (arr + arr.T) / 2.0)

    @property
    def m(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted descending plus orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = _as_float_array(self.eigenvalues, "eigenvalues")
        vecs = _as_float_array(self.eigenvectors, "eigenvectors")
        if vals.ndim != 1:
            raise ValueError("eigenvalues must be a vector")
        if vecs.ndim != 2 or vecs.shape != (vals.size, vals.size):
            raise ValueError(
                f"eigenvectors must be {vals.size}x{vals.size}, got {vecs.shape}"
            )
        if np.any(np.diff(vals) > 1e-12 * (1.0 + np.abs(vals).max(initial=0.0))):
            raise ValueError("eigenvalues must be sorted descending")
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def m(self) -> int:
        return self.eigenvalues.size


def center_columns(x: DataMatrix) -> DataMatrix:
    """Subtract the sample mean from every column.

    Equivalent to right-multiplying by the centering projector
    I_n - 1_n 1_n^T / n; every row of the result sums to zero.
    """
    values = x.values
    return DataMatrix(values - values.mean(axis=1, keepdims=True))


def dual_covariance(xc: DataMatrix) -> SymMatrix:
    """The n x n dual sample covariance of a centered matrix.

    Returns (Xc^T Xc)/(n - 1). Shares its nonzero eigenvalues with the
    d x d sample covariance; centering forces the smallest one to zero.
    """
    values = xc.values
    gram = values.T @ values
    return SymMatrix(gram / (values.shape[1] - 1))


def _apply_sign_convention(vectors: np.ndarray) -> None:
    # flip each column so its largest-magnitude component is positive;
    # the flip goes through a fresh temporary because in-place ufuncs on
    # column views corrupt data for some strides under this numpy build
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0.0:
            vectors[:, j] = -col


_MAX_SWEEPS = 100


def sym_eigen(a: SymMatrix) -> SpectralDecomposition:
    """Full spectral decomposition by cyclic Jacobi rotations.

    Deterministic for identical input: fixed sweep order, stable
    descending sort, and a fixed sign convention (largest-magnitude
    eigenvector component positive). Ties keep the stable sort order.

    Raises
    ------
    JacobiConvergenceError
        If the off-diagonal mass has not vanished after 100 sweeps.
    """
    mat = a.values.copy()
    m = mat.shape[0]
    vecs = np.eye(m)
    if m == 1:
        return SpectralDecomposition(mat.diagonal().copy(), vecs)

    frob = float(np.linalg.norm(mat))
    tol = 1e-14 * max(1.0, frob)
    # rotations below this can never push the off-norm back above tol
    skip = tol / (2.0 * m * m)

    off = np.sqrt(2.0) * float(np.linalg.norm(np.triu(mat, 1)))
    for _ in range(_MAX_SWEEPS):
        if off <= tol:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = mat[p, q]
                if abs(apq) <= skip:
                    continue
                app, aqq = mat[p, p], mat[q, q]
                theta = 0.5 * (aqq - app) / apq
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)

                col_p = mat[:, p].copy()
                col_q = mat[:, q].copy()
                mat[:, p] = col_p - s * (col_q + tau * col_p)
                mat[:, q] = col_q + s * (col_p - tau * col_q)
                mat[p, :] = mat[:, p]
                mat[q, :] = mat[:, q]
                mat[p, p] = app - t * apq
                mat[q, q] = aqq + t * apq
                mat[p, q] = 0.0
                mat[q, p] = 0.0

                vec_p = vecs[:, p].copy()
                vec_q = vecs[:, q].copy()
                vecs[:, p] = c * vec_p - s * vec_q
                vecs[:, q] = s * vec_p + c * vec_q
        off = np.sqrt(2.0) * float(np.linalg.norm(np.triu(mat, 1)))
    else:
        if off > tol:
            raise JacobiConvergenceError(
                f"Jacobi sweep cap ({_MAX_SWEEPS}) reached for a {m}x{m} "
                f"matrix; residual off-diagonal norm {off:.3e} exceeds "
                f"tolerance {tol:.3e}"
            )

    order = np.argsort(-mat.diagonal(), kind="stable")
    eigenvalues = mat.diagonal()[order].copy()
    eigenvectors = vecs[:, order].copy()
    _apply_sign_convention(eigenvectors)
    return SpectralDecomposition(eigenvalues, eigenvectors)
