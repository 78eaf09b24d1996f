"""Least squares via the thin SVD, with explicit rank detection."""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, InvalidParameter, RankDeficient, SingularMatrix

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class LstSqSolution:
    coefficients: np.ndarray
    residuals: np.ndarray
    hat_diagonals: np.ndarray
    rank: int
    xtx_inverse: np.ndarray
    singular_values: np.ndarray


def _as_matrix(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d design matrix, got ndim={X.ndim}")
    if not np.all(np.isfinite(X)):
        raise InvalidParameter("design matrix contains non-finite entries")
    return X


def matrix_rank(X, rtol=RANK_RTOL):
    s = np.linalg.svd(_as_matrix(X), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def solve_least_squares(X, y, allow_rank_deficient=False):
    """Minimum-norm least squares solution of ``X b = y``.

    Rank is the number of singular values above ``1e-10 * s_max``. A
    rank-deficient design raises :class:`RankDeficient` unless
    ``allow_rank_deficient`` is set, in which case the pseudo-inverse
    solution is returned.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if y.ndim != 1 or y.shape[0] != n:
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({n},)")
    if k < 1 or n < k:
        raise DimensionMismatch(f"need rows >= cols >= 1, got {n}x{k}")
    if not np.all(np.isfinite(y)):
        raise InvalidParameter("response contains non-finite entries")

    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s[0] > 0 else 0
    if rank < k and not allow_rank_deficient:
        raise RankDeficient(rank, k)

    Ur, sr, Vr = U[:, :rank], s[:rank], Vt[:rank].T
    coef = Vr @ ((Ur.T @ y) / sr)
    resid = y - X @ coef
    hat = np.einsum("ij,ij->i", Ur, Ur)
    xtx_inv = (Vr / sr**2) @ Vr.T
    return LstSqSolution(
        coefficients=coef,
        residuals=resid,
        hat_diagonals=np.clip(hat, 0.0, 1.0),
        rank=rank,
        xtx_inverse=0.5 * (xtx_inv + xtx_inv.T),
        singular_values=s,
    )


def condition_number(X):
    """Ratio of the largest to the smallest singular value of ``X``."""
    X = _as_matrix(X)
    s = np.linalg.svd(X, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise InvalidParameter("condition number of a zero matrix is undefined")
    if s[-1] == 0.0:
        raise SingularMatrix("smallest singular value is zero")
    return float(s[0] / s[-1])
