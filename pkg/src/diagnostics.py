"""Quality metrics and theorem checks for a sparsification."""

from __future__ import annotations

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import InvalidParameterError, ShapeError, UndefinedConditionError
from .models import Pattern, Report, SparsifyOutcome, SparsifyParams, SpectralData, as_matrix
from .pattern import masked_input
from .spectral import factorize, generalized_condition, nonzero_eigenvalues, pseudoinverse
from .structgen import cyclic_matrix, exchange_matrix, symplectic_matrix

logger = logging.getLogger(__name__)

# eigenvalues below this fraction of the largest modulus count as zero
EIG_ZERO_TOL = 1e-10
# numerical rank of X; X V2 = 0 only holds to this relative accuracy
X_RANK_TOL = 1e-10
CLUSTER_SLACK = 1e-10
# q = 1 gives a zero misfit bound while the computed j_min carries roundoff
MISFIT_FLOOR = 1e-20


def exponent_c(p: float) -> float:
    """1 - 1/p + |1/2 - 1/p| for p in [1, inf]."""
    if not p >= 1:
        raise InvalidParameterError(f"the perturbation bounds need p in [1, inf], got {p}")
    inv = 0.0 if math.isinf(p) else 1.0 / p
    return 1.0 - inv + abs(0.5 - inv)


def _spectral_norm(m_: np.ndarray) -> float:
    if not np.any(m_):
        return 0.0
    return float(scipy.linalg.svdvals(m_)[0])


def apriori_perturbation_check(a, p: float, q: float, z: Pattern) -> Tuple[float, float, bool]:
    """||A - A^pq||_2 against (mn)^(C/2) (1 - q) ||A||_2."""
    a = as_matrix(a)
    c = exponent_c(p)
    m, n = a.shape
    lhs = _spectral_norm(a - masked_input(a, z))
    rhs = (m * n) ** (c / 2.0) * (1.0 - q) * _spectral_norm(a)
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-12)


def misfit_bound_check(a, p: float, q: float, j_min: float) -> Tuple[Optional[float], Optional[bool]]:
    """j_min against m^(1 + 2C) (1 - q)^2 kappa(A)^2; (None, None) unless A is square and nonsingular."""
    a = as_matrix(a)
    m, n = a.shape
    c = exponent_c(p)
    if m != n:
        return None, None
    f = factorize(a)
    if f.rank < m:
        return None, None
    bound = m ** (1.0 + 2.0 * c) * (1.0 - q) ** 2 * f.kappa**2
    return bound, j_min <= bound * (1.0 + 1e-12) + MISFIT_FLOOR


def clustering_check(x, f: SpectralData, a_pinv, j_min: float) -> Tuple[float, float, bool]:
    """Every nonzero eigenvalue of A^+ X and X A^+ lies within sqrt(2 j_min) of 1."""
    x = as_matrix(x)
    radius = math.sqrt(2.0 * max(j_min, 0.0))
    distance = 0.0
    for product in (a_pinv @ x, x @ a_pinv):
        eigs = np.asarray(nonzero_eigenvalues(product, EIG_ZERO_TOL))
        if eigs.size:
            distance = max(distance, float(np.max(np.abs(eigs - 1.0))))
    return radius, distance, distance <= radius * (1.0 + CLUSTER_SLACK) + CLUSTER_SLACK


def _rank_of(x: np.ndarray) -> int:
    if not np.any(x):
        return 0
    s = scipy.linalg.svdvals(x)
    return int(np.count_nonzero(s > X_RANK_TOL * s[0]))


def _product_conditions(x: np.ndarray, f: SpectralData, a_pinv: np.ndarray) -> Tuple[float, float]:
    """(kappa(A^+ X), kappa(X A^+)) over the leading rank(A) singular values."""
    return (
        generalized_condition(a_pinv @ x, f.rank_tol, rank=f.rank),
        generalized_condition(x @ a_pinv, f.rank_tol, rank=f.rank),
    )


def condition_bound_check(x, f: SpectralData, a_pinv, j_min: float) -> Tuple[Optional[float], Optional[bool]]:
    """(1 + sqrt(2 j_min)) / (1 - sqrt(2 j_min)) bound on the preconditioned condition numbers.

    Not applicable (None, None) when j_min >= 1/2 or X lost rank relative to A.
    """
    x = as_matrix(x)
    if j_min >= 0.5 or f.rank == 0 or _rank_of(x) < f.rank:
        return None, None
    s = math.sqrt(2.0 * max(j_min, 0.0))
    bound = (1.0 + s) / (1.0 - s)
    worst = max(_product_conditions(x, f, np.asarray(a_pinv)))
    return bound, worst <= bound * (1.0 + CLUSTER_SLACK)


def rel_inverse_diff(x, a, rank_tol: Optional[float] = None) -> float:
    """||X^+ - A^+||_F / ||A^+||_F, with rank(X^+) capped at rank(A)."""
    fa = factorize(a, rank_tol)
    if fa.rank == 0:
        raise UndefinedConditionError("relative inverse difference of a zero matrix is undefined")
    x = as_matrix(x)
    if not np.any(x):
        raise UndefinedConditionError("relative inverse difference needs a nonzero sparsified matrix")
    fx = factorize(x, rank_tol, max_rank=fa.rank)
    a_pinv = pseudoinverse(fa)
    return float(np.linalg.norm(pseudoinverse(fx) - a_pinv, "fro") / np.linalg.norm(a_pinv, "fro"))


def _subspace_conditions(x: np.ndarray) -> Dict[str, Optional[np.ndarray]]:
    size = x.shape[0]
    j = exchange_matrix(size)
    cp = cyclic_matrix(size, 1)
    cm = cyclic_matrix(size, -1)
    xh = x.conj().T
    if size % 2 == 0:
        k = symplectic_matrix(size)
        hamiltonian = k @ x + xh @ k
        skew_hamiltonian = k @ x - xh @ k
    else:
        hamiltonian = skew_hamiltonian = None
    imag = np.imag(x)
    return {
        "centrosymmetric": x @ j - j @ x,
        "skew_centrosymmetric": x @ j + j @ x,
        "circulant": x @ cp - cp @ x,
        "skew_circulant": x @ cm - cm @ x,
        "complex_symmetric": x - x.T,
        "skew_complex_symmetric": x + x.T,
        "hamiltonian": hamiltonian,
        "skew_hamiltonian": skew_hamiltonian,
        "hermitian": x - xh,
        "skew_hermitian": x + xh,
        "persymmetric": x @ j - j @ xh,
        "skew_persymmetric": x @ j + j @ xh,
        # the real classes also charge any imaginary part
        "symmetric": np.hstack([np.real(x - x.T), imag]),
        "skew_symmetric": np.hstack([np.real(x + x.T), imag]),
    }


def subspace_residuals(x) -> Dict[str, Optional[float]]:
    """Relative defining residual of every structured subspace; None where not applicable."""
    x = as_matrix(x)
    if x.shape[0] != x.shape[1]:
        return {}
    scale = float(np.linalg.norm(x, "fro"))
    residuals: Dict[str, Optional[float]] = {}
    for name, defect in _subspace_conditions(x).items():
        if defect is None:
            residuals[name] = None
        elif scale == 0.0:
            residuals[name] = 0.0
        else:
            residuals[name] = float(np.linalg.norm(defect, "fro") / scale)
    return residuals


def tail_preservation(a, x, k: int = 10) -> Tuple[float, float]:
    """Mean relative change of the k smallest and of the k largest nonzero singular values of A."""
    sa = scipy.linalg.svdvals(as_matrix(a))
    sx = scipy.linalg.svdvals(as_matrix(x))
    kept = np.flatnonzero(sa > 0)
    if k < 1 or k > kept.size:
        raise InvalidParameterError(f"k must lie in [1, {kept.size}], got {k}")
    rel = np.abs(sx[kept] - sa[kept]) / sa[kept]
    return float(np.mean(rel[-k:])), float(np.mean(rel[:k]))


def _by_modulus(eigs: np.ndarray) -> np.ndarray:
    return eigs[np.argsort(-np.abs(eigs), kind="stable")]


def spectrum_series(a, x) -> List[Dict[str, float]]:
    """Rows of (index, sigma_a, sigma_x, eigenvalues of A, X and A^+ X)."""
    a = as_matrix(a)
    x = as_matrix(x)
    sa = scipy.linalg.svdvals(a)
    sx = scipy.linalg.svdvals(x)
    rows: List[Dict[str, float]] = []
    square = a.shape[0] == a.shape[1]
    if square:
        ea = _by_modulus(scipy.linalg.eigvals(a))
        ex = _by_modulus(scipy.linalg.eigvals(x))
        ep = _by_modulus(scipy.linalg.eigvals(pseudoinverse(factorize(a)) @ x))
    for i in range(sa.size):
        row = {"index": i, "sigma_a": float(sa[i]), "sigma_x": float(sx[i])}
        if square:
            row.update(
                eig_a_re=float(ea[i].real), eig_a_im=float(ea[i].imag),
                eig_x_re=float(ex[i].real), eig_x_im=float(ex[i].imag),
                eig_pinva_x_re=float(ep[i].real), eig_pinva_x_im=float(ep[i].imag),
            )
        rows.append(row)
    return rows


def correlation_series(a, x) -> List[Dict[str, float]]:
    """Entries of A at the nonzeros of X sorted by modulus, paired with the X entries."""
    a = as_matrix(a)
    x = as_matrix(x)
    if a.shape != x.shape:
        raise ShapeError(f"x has shape {x.shape} but a has shape {a.shape}")
    idx = np.flatnonzero(x)
    a_vals = a.ravel()[idx]
    x_vals = x.ravel()[idx]
    order = np.argsort(np.abs(a_vals), kind="stable")
    return [
        {"a_value": float(np.real(a_vals[i])), "x_value": float(np.real(x_vals[i])),
         "a_imag": float(np.imag(a_vals[i])), "x_imag": float(np.imag(x_vals[i]))}
        for i in order
    ]


def build_report(a, outcome: SparsifyOutcome, params: Optional[SparsifyParams] = None) -> Report:
    """Evaluate every metric and bound for ``outcome``."""
    params = params or SparsifyParams()
    a = as_matrix(a)
    m, n = a.shape
    x = outcome.x
    f = outcome.spectral
    a_pinv = pseudoinverse(f)
    nnz_x = int(np.count_nonzero(x))

    cond_x = cond_pinva_x = cond_x_pinva = rel_diff = None
    if f.rank > 0 and np.any(x):
        cond_x = generalized_condition(x, f.rank_tol, rank=f.rank)
        cond_pinva_x, cond_x_pinva = _product_conditions(x, f, a_pinv)
        rel_diff = rel_inverse_diff(x, a, f.rank_tol)

    radius, distance, cluster_ok = clustering_check(x, f, a_pinv, outcome.j_min)
    cond_bound, cond_ok = condition_bound_check(x, f, a_pinv, outcome.j_min)

    apriori_lhs = apriori_rhs = apriori_ok = apriori_margin = None
    misfit_bound = misfit_ok = misfit_margin = None
    if params.p >= 1:
        apriori_lhs, apriori_rhs, apriori_ok = apriori_perturbation_check(a, params.p, params.q, outcome.pattern)
        apriori_margin = apriori_rhs - apriori_lhs
        misfit_bound, misfit_ok = misfit_bound_check(a, params.p, params.q, outcome.j_min)
        if misfit_bound is not None:
            misfit_margin = misfit_bound - outcome.j_min

    if not cluster_ok or cond_ok is False:
        logger.warning(f"a posteriori bound violated: cluster_ok={cluster_ok} cond_bound_ok={cond_ok}")

    return Report(
        m=m,
        n=n,
        p=params.p,
        q=params.q,
        rank=f.rank,
        kappa_a=f.kappa,
        nnz_a=int(np.count_nonzero(a)),
        nnz_x=nnz_x,
        density_x=nnz_x / (m * n),
        j_min=outcome.j_min,
        grad_residual=outcome.grad_residual,
        nullspace_residual=outcome.nullspace_residual,
        cond_x=cond_x,
        cond_pinva_x=cond_pinva_x,
        cond_x_pinva=cond_x_pinva,
        cluster_radius=radius,
        max_eig_distance=distance,
        cluster_ok=cluster_ok,
        cond_bound=cond_bound,
        cond_bound_ok=cond_ok,
        apriori_lhs=apriori_lhs,
        apriori_rhs=apriori_rhs,
        apriori_bound_ok=apriori_ok,
        apriori_margin=apriori_margin,
        misfit_bound=misfit_bound,
        misfit_bound_ok=misfit_ok,
        misfit_margin=misfit_margin,
        rel_inv_diff=rel_diff,
        subspace_residuals=subspace_residuals(x),
    )
