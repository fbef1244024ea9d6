"""Dense symmetric-positive-definite helpers used by the samplers."""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve

from .exceptions import DomainError, NotPositiveDefinite

__all__ = ["Vec", "SpdMatrix", "chol_factor", "spd_solve"]

# Plain ndarray aliases; shapes are validated where they matter.
Vec = np.ndarray
SpdMatrix = np.ndarray


def _square(S) -> np.ndarray:
    A = np.asarray(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix entries must be finite")
    return A


def chol_factor(S) -> np.ndarray:
    """Lower Cholesky factor of ``S``.

    The input is symmetrized as ``(S + S.T) / 2`` first, which tolerates the
    tiny asymmetry that accumulated matmuls leave behind.
    """
    A = _square(S)
    A = 0.5 * (A + A.T)
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError as err:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {err}") from err


def spd_solve(S, b) -> np.ndarray:
    """Solve ``S x = b`` for symmetric positive definite ``S``."""
    L = chol_factor(S)
    rhs = np.asarray(b, dtype=float)
    if rhs.shape[0] != L.shape[0]:
        raise DomainError(
            f"shape mismatch: matrix is {L.shape[0]}x{L.shape[0]}, rhs has leading dim {rhs.shape[0]}"
        )
    if not np.all(np.isfinite(rhs)):
        raise DomainError("right-hand side must be finite")
    return cho_solve((L, True), rhs)
