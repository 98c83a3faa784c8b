"""Null-space preserving sparsification as an equality-constrained convex QP.

The misfit

    J(X) = 1/2 ||(X - A) A^+||_F^2 + 1/2 ||A^+ (X - A)||_F^2

is minimized over matrices with a fixed sparsity pattern subject to
X V2 = 0 and X^H U2 = 0.  The free entries are solved for with the null-space
(reduced Hessian) method: an orthonormal basis W of the constraint null-space
turns the problem into one Hermitian positive definite solve.
"""

from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import NumericFailureError, ShapeError
from .models import (
    KktSystem,
    LpParams,
    Multipliers,
    Pattern,
    SparsifyOutcome,
    SparsifyParams,
    SpectralData,
    as_matrix,
)
from .pattern import default_min_nonzeros, matrix_pattern
from .spectral import factorize, pseudoinverse

logger = logging.getLogger(__name__)

# singular values of the constraint matrix below this (relative) are redundant directions
CONSTRAINT_RCOND = 1e-12


def _check_pinv_shapes(x: np.ndarray, a_pinv: np.ndarray) -> None:
    if a_pinv.shape != (x.shape[1], x.shape[0]):
        raise ShapeError(f"pseudoinverse shape {a_pinv.shape} does not fit a {x.shape} matrix")


def misfit(x, a_pinv, a) -> float:
    """1/2 ||(X - A) A^+||_F^2 + 1/2 ||A^+ (X - A)||_F^2."""
    x = as_matrix(x, "x")
    a = as_matrix(a, "a")
    a_pinv = np.asarray(a_pinv)
    _check_pinv_shapes(x, a_pinv)
    if a.shape != x.shape:
        raise ShapeError(f"x has shape {x.shape} but a has shape {a.shape}")
    d = x - a
    right = np.linalg.norm(d @ a_pinv, "fro")
    left = np.linalg.norm(a_pinv @ d, "fro")
    return float(0.5 * right**2 + 0.5 * left**2)


def misfit_gradient(x, a_pinv) -> np.ndarray:
    """X A^+ (A^+)^H + (A^+)^H A^+ X - 2 (A^+)^H."""
    x = as_matrix(x, "x")
    a_pinv = np.asarray(a_pinv)
    _check_pinv_shapes(x, a_pinv)
    ph = a_pinv.conj().T
    return x @ (a_pinv @ ph) + (ph @ a_pinv) @ x - 2.0 * ph


def assemble_kkt(f: SpectralData, a_pinv: np.ndarray, z: Pattern) -> KktSystem:
    """Restrict the Kronecker-sum Hessian, right-hand side and constraints to the free entries."""
    m, n = f.m, f.n
    if z.shape != (m, n):
        raise ShapeError(f"pattern shape {z.shape} does not match matrix shape {(m, n)}")
    a_pinv = np.asarray(a_pinv)
    if a_pinv.shape != (n, m):
        raise ShapeError(f"pseudoinverse shape {a_pinv.shape} does not fit a {(m, n)} matrix")

    rows, cols = np.nonzero(z.mask)
    ph = a_pinv.conj().T
    right_weight = a_pinv @ ph  # n x n
    left_weight = ph @ a_pinv  # m x m

    same_row = rows[:, None] == rows[None, :]
    same_col = cols[:, None] == cols[None, :]
    hessian = same_row * right_weight[cols[None, :], cols[:, None]] + same_col * left_weight[
        rows[:, None], rows[None, :]
    ]
    rhs = 2.0 * ph[rows, cols]

    dtype = np.result_type(hessian.dtype, f.u2.dtype, f.v2.dtype)
    # X V2 = 0: one row per (matrix row i, right null vector k)
    right = (rows[None, :] == np.arange(m)[:, None])[:, None, :] * f.v2.T[None, :, cols]
    # conj(X^H U2) = 0: one row per (matrix column j, left null vector k)
    left = (cols[None, :] == np.arange(n)[:, None])[:, None, :] * f.u2.conj().T[None, :, rows]
    constraints = np.concatenate(
        [right.reshape(m * f.p_r, rows.size), left.reshape(n * f.p_l, rows.size)], axis=0
    ).astype(dtype, copy=False)

    return KktSystem(free_rows=rows, free_cols=cols, hessian=hessian, rhs=rhs, constraints=constraints)


def _nullspace_basis(kkt: KktSystem) -> np.ndarray:
    if kkt.constraints.shape[0] == 0:
        return np.eye(kkt.size, dtype=kkt.hessian.dtype)
    try:
        return scipy.linalg.null_space(kkt.constraints, rcond=CONSTRAINT_RCOND)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError("constraint factorization failed", context=f"{kkt.constraints.shape} constraints") from exc


def _reduced_solve(kkt: KktSystem, w: np.ndarray) -> np.ndarray:
    if kkt.constraints.shape[0] == 0:
        reduced, reduced_rhs = kkt.hessian, kkt.rhs
    else:
        reduced = w.conj().T @ kkt.hessian @ w
        reduced_rhs = w.conj().T @ kkt.rhs
    reduced = 0.5 * (reduced + reduced.conj().T)
    try:
        factor = scipy.linalg.cho_factor(reduced, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        logger.error(f"reduced Hessian of size {reduced.shape[0]} is not positive definite")
        raise NumericFailureError(
            "reduced Hessian factorization failed", context=f"reduced size {reduced.shape[0]}"
        ) from exc
    y = scipy.linalg.cho_solve(factor, reduced_rhs, check_finite=False)
    return y if kkt.constraints.shape[0] == 0 else w @ y


def recover_multipliers(x: np.ndarray, a_pinv: np.ndarray, f: SpectralData, kkt: KktSystem) -> Multipliers:
    """Lagrange multipliers from G + Lambda_R V2^H + U2 Lambda_L^H + Lambda_Z = 0."""
    m, n = f.m, f.n
    grad = misfit_gradient(x, a_pinv)
    n_right = m * f.p_r
    if kkt.constraints.shape[0]:
        lam, *_ = scipy.linalg.lstsq(
            kkt.constraints.conj().T, -grad[kkt.free_rows, kkt.free_cols], cond=CONSTRAINT_RCOND
        )
    else:
        lam = np.zeros(0, dtype=grad.dtype)
    lambda_r = lam[:n_right].reshape(m, f.p_r)
    lambda_l = lam[n_right:].reshape(n, f.p_l).conj()
    lambda_z = -(grad + lambda_r @ f.v2.conj().T + f.u2 @ lambda_l.conj().T)
    lambda_z[kkt.free_rows, kkt.free_cols] = 0
    return Multipliers(lambda_r=lambda_r, lambda_l=lambda_l, lambda_z=lambda_z)


def _nullspace_residual(x: np.ndarray, f: SpectralData) -> float:
    right = np.linalg.norm(x @ f.v2, "fro") if f.p_r else 0.0
    left = np.linalg.norm(x.conj().T @ f.u2, "fro") if f.p_l else 0.0
    return float(max(right, left))


def _solve(a: np.ndarray, f: SpectralData, z: Pattern, recover: bool = False) -> SparsifyOutcome:
    m, n = a.shape
    if z.shape != (m, n):
        raise ShapeError(f"pattern shape {z.shape} does not match matrix shape {(m, n)}")
    a_pinv = pseudoinverse(f)
    dtype = np.result_type(a.dtype, a_pinv.dtype)
    x = np.zeros((m, n), dtype=dtype)

    kkt: Optional[KktSystem] = None
    grad_residual = 0.0
    if f.rank > 0 and z.nnz > 0:
        kkt = assemble_kkt(f, a_pinv, z)
        w = _nullspace_basis(kkt)
        logger.debug(
            f"solve: {kkt.size} free entries, {kkt.constraints.shape[0]} constraints, "
            f"reduced size {w.shape[1]}"
        )
        if w.shape[1] > 0:
            x[kkt.free_rows, kkt.free_cols] = _reduced_solve(kkt, w)
            projected = w.conj().T @ misfit_gradient(x, a_pinv)[kkt.free_rows, kkt.free_cols]
            grad_residual = float(np.linalg.norm(projected))

    multipliers = None
    if recover:
        if kkt is None:
            kkt = assemble_kkt(f, a_pinv, z)
        multipliers = recover_multipliers(x, a_pinv, f, kkt)

    outcome = SparsifyOutcome(
        x=x,
        pattern=z,
        j_min=misfit(x, a_pinv, a),
        grad_residual=grad_residual,
        nullspace_residual=_nullspace_residual(x, f),
        spectral=f,
        multipliers=multipliers,
    )
    logger.info(
        f"sparsified {m}x{n} (rank {f.rank}): nnz={int(np.count_nonzero(x))} j_min={outcome.j_min:.6g}"
    )
    return outcome


def solve_with_pattern(a, z: Pattern, rank_tol: Optional[float] = None, recover: bool = False) -> SparsifyOutcome:
    """Unique minimizer of the misfit for an imposed pattern."""
    a = as_matrix(a, "input")
    return _solve(a, factorize(a, rank_tol), z, recover=recover)


def resolve_min_nonzeros(f: SpectralData, params: SparsifyParams) -> Tuple[int, int]:
    n_row, n_col = default_min_nonzeros(f)
    if params.n_row_override is not None:
        n_row = params.n_row_override
    if params.n_col_override is not None:
        n_col = params.n_col_override
    return n_row, n_col


def sparsify(a, params: Optional[SparsifyParams] = None) -> SparsifyOutcome:
    """Factorize, pick the Lp pattern (unless one is imposed) and solve."""
    params = params or SparsifyParams()
    a = as_matrix(a, "input")
    f = factorize(a, params.rank_tol)
    if params.pattern_override is not None:
        if params.pattern_override.shape != a.shape:
            raise ShapeError(
                f"pattern override shape {params.pattern_override.shape} does not match input {a.shape}"
            )
        z = params.pattern_override
    else:
        n_row, n_col = resolve_min_nonzeros(f, params)
        lp = LpParams(p=params.p, q=params.q, n_row=n_row, n_col=n_col)
        z = matrix_pattern(a, lp, symmetric=params.symmetric_pattern)
    return _solve(a, f, z, recover=params.recover_multipliers)
