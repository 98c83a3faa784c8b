"""Rank-revealing SVD, pseudoinverse and generalized condition numbers."""

from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np
import scipy.linalg

from .config import get_settings
from .errors import NumericFailureError, ShapeError, UndefinedConditionError
from .models import SpectralData, as_matrix

logger = logging.getLogger(__name__)


def default_rank_tol(shape) -> float:
    """Conventional relative truncation level max(m, n) * eps."""
    return max(shape) * float(np.finfo(np.float64).eps)


def _resolve_rank_tol(shape, rank_tol: Optional[float]) -> float:
    if rank_tol is not None:
        return float(rank_tol)
    configured = get_settings().rank_tol
    return configured if configured is not None else default_rank_tol(shape)


def _svd(a: np.ndarray, full_matrices: bool = True):
    try:
        return scipy.linalg.svd(a, full_matrices=full_matrices, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.debug("gesdd did not converge; retrying with gesvd")
    try:
        return scipy.linalg.svd(a, full_matrices=full_matrices, lapack_driver="gesvd")
    except np.linalg.LinAlgError as exc:
        logger.error(f"SVD failed for a {a.shape[0]}x{a.shape[1]} matrix: {exc}")
        raise NumericFailureError("SVD did not converge", context=f"shape={a.shape}, drivers gesdd/gesvd") from exc


def _count_rank(s: np.ndarray, rank_tol: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def factorize(a, rank_tol: Optional[float] = None, max_rank: Optional[int] = None) -> SpectralData:
    """Partition the SVD of ``a`` into range and null-space blocks.

    The rank is the number of singular values above ``rank_tol * sigma_1``.
    ``max_rank`` caps it, which is used for matrices whose rank is known to be
    bounded (the sparsified output lives in the range of the input).
    """
    a = as_matrix(a, "input")
    tol = _resolve_rank_tol(a.shape, rank_tol)
    u, s, vh = _svd(a)
    r = _count_rank(s, tol)
    if max_rank is not None:
        r = min(r, max_rank)
    v = vh.conj().T
    kappa = float(s[0] / s[r - 1]) if r > 0 else None
    logger.debug(f"factorize: shape={a.shape} rank={r} kappa={kappa}")
    if kappa is not None and kappa > get_settings().cond_warn:
        logger.warning(f"condition number {kappa:.3e} exceeds {get_settings().cond_warn:.1e}; "
                       "null-space and near null-space may be unreliable")
    return SpectralData(
        u1=u[:, :r],
        u2=u[:, r:],
        v1=v[:, :r],
        v2=v[:, r:],
        sigma=s[:r].copy(),
        rank=r,
        rank_tol=tol,
        kappa=kappa,
    )


def pseudoinverse(f: SpectralData) -> np.ndarray:
    """Moore-Penrose pseudoinverse V1 diag(1/sigma) U1^H."""
    if f.rank == 0:
        return np.zeros((f.n, f.m), dtype=np.result_type(f.u1.dtype, f.v1.dtype))
    return (f.v1 / f.sigma) @ f.u1.conj().T


def generalized_condition(m_, rank_tol: Optional[float] = None, rank: Optional[int] = None) -> float:
    """sigma_max / sigma_min over the singular values above the rank threshold.

    When ``rank`` is given, only the leading ``rank`` singular values count.
    """
    m_ = as_matrix(m_)
    try:
        s = scipy.linalg.svdvals(m_)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError("singular value computation did not converge", context=f"shape={m_.shape}") from exc
    r = _count_rank(s, _resolve_rank_tol(m_.shape, rank_tol))
    if rank is not None:
        r = min(r, rank)
    if r == 0:
        raise UndefinedConditionError("condition number of a zero matrix is undefined")
    return float(s[0] / s[r - 1])


def nonzero_eigenvalues(m_, zero_tol: float = 1e-12) -> List[complex]:
    """Eigenvalues whose modulus exceeds ``zero_tol`` times the largest modulus."""
    m_ = as_matrix(m_)
    if m_.shape[0] != m_.shape[1]:
        raise ShapeError(f"eigenvalues need a square matrix, got {m_.shape}")
    try:
        eigs = scipy.linalg.eigvals(m_)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError("eigenvalue computation did not converge", context=f"shape={m_.shape}") from exc
    moduli = np.abs(eigs)
    largest = moduli.max() if moduli.size else 0.0
    if largest == 0.0:
        return []
    return [complex(v) for v in eigs[moduli > zero_tol * largest]]
