"""Small dense linear-algebra kernel shared by every other module.

All matrices here are real, at most a few tens of rows, and live in plain
``numpy.ndarray`` objects.  The routines wrap LAPACK-backed numpy/scipy
primitives behind the exact contracts the rest of the package relies on
(sorted symmetric eigensystems, SPD solves that fail loudly, a spectral
radius estimate safe for diagnostics).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla


class NotPositiveDefiniteError(ValueError):
    """Raised when a factorization meets a non-positive pivot."""


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    eigenvalues are sorted ascending; eigenvectors are the matching
    orthonormal columns, so M = V diag(w) V'.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def _require_square(A: np.ndarray, name: str = "matrix") -> np.ndarray:
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def _require_symmetric(A: np.ndarray, rel_tol: float = 1e-12,
                       name: str = "matrix") -> np.ndarray:
    _require_square(A, name)
    scale = max(1.0, float(np.linalg.norm(A, "fro")))
    asym = float(np.linalg.norm(A - A.T, "fro"))
    if asym > rel_tol * scale:
        raise ValueError(
            f"{name} is not symmetric: relative asymmetry {asym / scale:.3e}"
        )
    return 0.5 * (A + A.T)


def symmetrize(A) -> np.ndarray:
    """(A + A') / 2, used to suppress round-off drift in iterative updates."""
    A = _as_matrix(A)
    _require_square(A)
    return 0.5 * (A + A.T)


def sym_eig(M) -> SymEig:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    A = _require_symmetric(_as_matrix(M, "M"), name="M")
    w, V = np.linalg.eigh(A)
    return SymEig(eigenvalues=w, eigenvectors=V)


def min_eigenvalue(M) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    return float(sym_eig(M).eigenvalues[0])


def expm(A, t: float = 1.0) -> np.ndarray:
    """Matrix exponential e^{A t} (scaling-and-squaring Pade, via scipy)."""
    A = _require_square(_as_matrix(A, "A"), "A")
    if t < 0:
        raise ValueError(f"time scalar must be >= 0, got {t}")
    return sla.expm(A * t)


def solve_spd(A, B) -> np.ndarray:
    """Solve A X = B for symmetric positive-definite A via Cholesky."""
    A = _require_symmetric(_as_matrix(A, "A"), name="A")
    Bm = np.asarray(B, dtype=float)
    squeeze = Bm.ndim == 1
    if squeeze:
        Bm = Bm[:, None]
    if Bm.shape[0] != A.shape[0]:
        raise ValueError(
            f"B has {Bm.shape[0]} rows, expected {A.shape[0]}"
        )
    try:
        c, low = sla.cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"A is not SPD: {exc}") from exc
    X = sla.cho_solve((c, low), Bm)
    return X[:, 0] if squeeze else X


def spectral_radius_estimate(A) -> float:
    """Estimate of the spectral radius via norms of repeated squarings.

    Computes ||A^(2^m)||_2^(1/2^m) with intermediate powers renormalized so
    nothing overflows, stopping once the estimate moves by less than 1e-4
    or m = 12 is reached.  The estimate converges to rho(A) from above; it
    is meant for pass/fail stability diagnostics, not precision spectra.
    """
    A = _require_square(_as_matrix(A, "A"), "A")
    nrm = float(np.linalg.norm(A, 2))
    if nrm == 0.0:
        return 0.0
    est = nrm
    log_acc = np.log(nrm)  # log ||A^(2^m)|| of the running power
    B = A / nrm
    for m in range(1, 13):
        B = B @ B
        n2 = float(np.linalg.norm(B, 2))
        if n2 == 0.0:
            return 0.0  # nilpotent
        log_acc = 2.0 * log_acc + np.log(n2)
        B = B / n2
        new_est = float(np.exp(log_acc / 2.0 ** m))
        if abs(new_est - est) < 1e-4:
            return new_est
        est = new_est
    return est
