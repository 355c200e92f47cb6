"""Dense complex Hermitian kernels: eigenvalues, Cholesky, PD solves.

All tolerances are absolute-relative hybrids scaled by the max-abs entry of
the input, since matrix norms vary widely over a z-grid sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotHermitianError,
    NotPositiveDefiniteError,
)

HERMITIAN_TOL = 1e-12


def max_abs(m: np.ndarray) -> float:
    """Max-abs entry of a matrix, the scale used by the hybrid tolerances."""
    return float(np.max(np.abs(m))) if m.size else 0.0


def _as_square_complex(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError("matrix contains NaN/Inf entries")
    return a


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermitian symmetry within ``tol * max(1, |m|_max)``.

    Returns the symmetrized matrix (m + m*)/2 so downstream factorizations
    see an exactly Hermitian input (Y0(z) is Hermitian only up to rounding).
    """
    a = _as_square_complex(m)
    scale = max(1.0, max_abs(a))
    dev = max_abs(a - a.conj().T)
    if dev > tol * scale:
        raise NotHermitianError(
            f"max |m - m*| = {dev:.3e} exceeds {tol:.1e} * {scale:.3e}"
        )
    return 0.5 * (a + a.conj().T)


def hermitian_eigenvalues(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Backed by LAPACK's tridiagonalization + implicit-shift iteration; the
    input is symmetrized first to absorb floating-point asymmetry.
    """
    a = check_hermitian(m, tol)
    try:
        w = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:  # iteration cap exceeded inside LAPACK
        raise NoConvergenceError(str(exc)) from exc
    return np.sort(w)


@dataclass(frozen=True)
class HermitianFactorization:
    """Lower Cholesky factor L with L L* = m, plus log det(m)."""

    lower: np.ndarray
    logdet: float

    @property
    def n(self) -> int:
        return self.lower.shape[0]


def cholesky(m, tol: float = HERMITIAN_TOL) -> HermitianFactorization:
    """Cholesky factorization of a Hermitian positive-definite matrix.

    Raises NotPositiveDefiniteError on a nonpositive pivot; with epsilon = 0
    regularization this signals that z sits numerically on the spectrum.
    """
    a = check_hermitian(m, tol)
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    logdet = 2.0 * float(np.sum(np.log(np.real(np.diagonal(lower)))))
    return HermitianFactorization(lower=lower, logdet=logdet)


def solve_hermitian_pd(f: HermitianFactorization, rhs) -> np.ndarray:
    """Solve m x = rhs given the Cholesky factorization of m."""
    b = np.asarray(rhs, dtype=np.complex128)
    if b.shape[0] != f.n:
        raise DimensionMismatchError(
            f"rhs has {b.shape[0]} rows, factorization is {f.n}x{f.n}"
        )
    y = scipy.linalg.solve_triangular(f.lower, b, lower=True)
    return scipy.linalg.solve_triangular(f.lower.conj().T, y, lower=False)


def logdet_pd(m, tol: float = HERMITIAN_TOL) -> float:
    """log det of a Hermitian PD matrix via its Cholesky factor."""
    return cholesky(m, tol).logdet
