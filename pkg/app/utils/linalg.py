"""
Dense small-matrix kernel.

Determinants, Gram assembly, rank checks and leverage scores used by the
relaxation solver, the samplers and the derandomization loops. Matrices here
are m x m (or n x n at most), so everything is dense LAPACK through scipy.
"""
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg as sla

from app.core.config import PIVOT_REL_TOL, RANK_REL_TOL, MATRIX_ORDER_CAP
from app.core.exceptions import DimensionError, SingularGram

ArrayLike = Union[np.ndarray, "SquareMatrix"]


@dataclass(frozen=True)
class SquareMatrix:
    """
    Square real matrix with finite entries.

    Wraps the Gram matrices Σ x_i a_i a_iᵀ handed between modules; the order
    is capped because every matrix in the library is desk scale.
    """
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {entries.shape}")
        if entries.shape[0] > MATRIX_ORDER_CAP:
            raise DimensionError(f"matrix order {entries.shape[0]} exceeds cap {MATRIX_ORDER_CAP}")
        if not np.all(np.isfinite(entries)):
            raise DimensionError("matrix entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def order(self) -> int:
        return self.entries.shape[0]


def _as_array(M: ArrayLike) -> np.ndarray:
    if isinstance(M, SquareMatrix):
        return M.entries
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def _vectors(inst) -> np.ndarray:
    """Return the n x m vector matrix of an Instance or a raw array."""
    return inst.matrix if hasattr(inst, "matrix") else np.asarray(inst, dtype=float)


def _lu_diagonal(M: np.ndarray, rel_tol: float):
    """
    LU-factor M with partial pivoting.

    Returns:
        (diagonal of U, permutation sign), or None when some pivot falls below
        rel_tol times the largest initial row norm
    """
    scale = float(np.max(np.linalg.norm(M, axis=1))) if M.size else 0.0
    if scale == 0.0:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    diag = np.diag(lu)
    if np.any(np.abs(diag) < rel_tol * scale):
        return None
    swaps = np.count_nonzero(piv != np.arange(piv.size))
    return diag, (-1.0 if swaps % 2 else 1.0)


def determinant(M: ArrayLike, rel_tol: float = PIVOT_REL_TOL):
    """
    Signed determinant by LU with partial pivoting.

    Parameters:
        M: Square matrix (real, or complex for polynomial evaluation)
        rel_tol: Relative pivot cutoff; pass 0.0 to disable the cutoff

    Returns:
        The determinant, exactly 0 when a pivot is below the cutoff
    """
    M = _as_array(M)
    if M.shape[0] == 0:
        return 1.0
    factored = _lu_diagonal(M, rel_tol)
    if factored is None:
        return 0.0 * M.flat[0]
    diag, sign = factored
    return sign * np.prod(diag)


def log_det(M: ArrayLike, rel_tol: float = PIVOT_REL_TOL) -> float:
    """
    Logarithm of the determinant of a PSD matrix.

    Returns:
        Sum of log pivot magnitudes, or -inf when the matrix is singular
    """
    M = _as_array(M)
    factored = _lu_diagonal(M, rel_tol)
    if factored is None:
        return -np.inf
    diag, sign = factored
    if sign * np.prod(np.sign(diag)) <= 0:
        return -np.inf
    return float(np.sum(np.log(np.abs(diag))))


def gram(inst, x) -> SquareMatrix:
    """
    Weighted Gram matrix Σ x_i a_i a_iᵀ.

    Parameters:
        inst: Instance (or n x m array of vectors)
        x: Length-n weight vector

    Returns:
        Symmetric m x m SquareMatrix; the lower triangle mirrors the upper one
    """
    return SquareMatrix(gram_array(_vectors(inst), x))


def gram_array(A: np.ndarray, x) -> np.ndarray:
    """Σ x_i a_i a_iᵀ as a bare array for inner loops."""
    x = np.asarray(x, dtype=float)
    if x.shape != (A.shape[0],):
        raise DimensionError(f"weight vector has shape {x.shape}, expected ({A.shape[0]},)")
    G = (A.T * x) @ A
    upper = np.triu(G)
    return upper + np.triu(upper, 1).T


def matrix_rank(A: np.ndarray, rel_tol: float = RANK_REL_TOL) -> int:
    """
    Numerical rank from a column-pivoted QR decomposition.

    Pivots below rel_tol times the largest pivot count as zero.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    R = sla.qr(A, mode="r", pivoting=True)[0]
    pivots = np.abs(np.diag(R))
    if pivots.size == 0 or pivots[0] == 0.0:
        return 0
    return int(np.count_nonzero(pivots > rel_tol * pivots[0]))


def leverage_scores(inst, x) -> np.ndarray:
    """
    Leverage scores a_iᵀ M(x)⁻¹ a_i for every experiment.

    These are the partial derivatives of log det M(x) with respect to x_i.

    Parameters:
        inst: Instance (or n x m array of vectors)
        x: Length-n weight vector

    Returns:
        Nonnegative length-n array

    Raises:
        SingularGram: If M(x) is singular
    """
    A = _vectors(inst)
    M = gram_array(A, x)
    if determinant(M) == 0.0:
        raise SingularGram("weighted Gram matrix is singular")
    return _scores(A, M)


def ridge_leverage_scores(A: np.ndarray, M: np.ndarray, ridge: float) -> np.ndarray:
    """Leverage scores against M + ridge·I; defined even when M is singular."""
    return _scores(A, M + ridge * np.eye(M.shape[0]))


def _scores(A: np.ndarray, M: np.ndarray) -> np.ndarray:
    Z = sla.solve(M, A.T, assume_a="sym", check_finite=False)
    return np.maximum(np.einsum("ij,ji->i", A, Z), 0.0)
