"""Lp-norm based sparsity patterns for vectors and matrices."""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np

from .errors import InvalidParameterError, ShapeError
from .models import LpParams, Pattern, SpectralData, as_matrix

logger = logging.getLogger(__name__)


def lp_measure(x, p: float) -> float:
    """Generalized Lp "norm".

    Rooted sum for 1 <= p < inf, max modulus for p = inf, un-rooted sum for
    0 < p < 1 and the nonzero count for p = 0.
    """
    moduli = np.abs(np.asarray(x)).astype(np.float64).ravel()
    if p < 0:
        raise InvalidParameterError(f"p must be >= 0, got {p}")
    if moduli.size == 0:
        return 0.0
    if p == 0:
        return float(np.count_nonzero(moduli))
    largest = float(moduli.max())
    if math.isinf(p) or largest == 0.0:
        return largest
    # scaled by the maximum so large p or large entries cannot overflow
    total = float(np.sum((moduli / largest) ** p))
    return largest**p * total if p < 1 else largest * total ** (1.0 / p)


def _prefix_measures(sorted_moduli: np.ndarray, p: float) -> np.ndarray:
    """Lp measure of every ascending prefix; the last entry is the measure of the whole vector."""
    k = sorted_moduli.size
    if p == 0:
        return np.arange(1, k + 1, dtype=np.float64)
    if math.isinf(p):
        # ascending order: the prefix maximum is its last element
        return sorted_moduli.copy()
    scaled = sorted_moduli / sorted_moduli[-1]
    sums = np.cumsum(scaled**p)
    return sums if p < 1 else sums ** (1.0 / p)


def vector_pattern(x, p: float, q: float, n_min: int = 0) -> np.ndarray:
    """Boolean mask eliminating as many small entries as the Lp budget allows.

    Nonzero entries are ordered by (modulus, index); the longest prefix whose
    measure stays within (1 - q) times the measure of ``x`` is eliminated,
    subject to keeping at least ``n_min`` nonzeros.
    """
    x = np.asarray(x).ravel()
    if p < 0:
        raise InvalidParameterError(f"p must be >= 0, got {p}")
    if not 0 <= q <= 1:
        raise InvalidParameterError(f"q must lie in [0, 1], got {q}")
    mask = np.zeros(x.shape[0], dtype=bool)
    moduli = np.abs(x)
    support = np.flatnonzero(moduli)
    if support.size == 0:
        return mask
    if n_min < 0 or n_min > support.size:
        raise InvalidParameterError(
            f"minimum kept count {n_min} exceeds the {support.size} nonzeros of the vector"
        )

    order = support[np.argsort(moduli[support], kind="stable")]
    measures = _prefix_measures(moduli[order], p)
    threshold = (1.0 - q) * measures[-1]
    within = measures <= threshold
    blocked = np.flatnonzero(~within)
    eliminated = int(blocked[0]) if blocked.size else support.size
    eliminated = min(eliminated, support.size - n_min)

    mask[order[eliminated:]] = True
    return mask


def matrix_pattern(a, params: LpParams, symmetric: bool = False) -> Pattern:
    """Union of the row-wise and column-wise vector patterns of ``a``.

    With ``symmetric=True`` only the rows are processed and the result is OR-ed
    with its transpose; this matches the general path whenever |a| is symmetric.
    """
    a = as_matrix(a)
    m, n = a.shape
    if params.n_row > n or params.n_col > m:
        raise InvalidParameterError(
            f"n_row={params.n_row}, n_col={params.n_col} exceed the {m}x{n} matrix dimensions"
        )
    nonzero = a != 0

    row_mask = np.zeros((m, n), dtype=bool)
    for i in range(m):
        n_min = min(params.n_row, int(np.count_nonzero(nonzero[i])))
        row_mask[i] = vector_pattern(a[i], params.p, params.q, n_min)

    if symmetric:
        if m != n or params.n_row != params.n_col:
            raise InvalidParameterError("the symmetric shortcut needs a square matrix and n_row == n_col")
        mask = row_mask | row_mask.T
    else:
        col_mask = np.zeros((m, n), dtype=bool)
        for j in range(n):
            n_min = min(params.n_col, int(np.count_nonzero(nonzero[:, j])))
            col_mask[:, j] = vector_pattern(a[:, j], params.p, params.q, n_min)
        mask = row_mask | col_mask

    z = Pattern(mask=mask)
    logger.debug(f"matrix_pattern: {m}x{n} p={params.p} q={params.q} nnz={z.nnz}")
    return z


def default_min_nonzeros(f: SpectralData) -> Tuple[int, int]:
    """(min(n, p_R + 1), min(m, p_L + 1)): one more kept entry than each nullity."""
    return min(f.n, f.p_r + 1), min(f.m, f.p_l + 1)


def pattern_transpose(z: Pattern) -> Pattern:
    return Pattern(mask=z.mask.T.copy())


def pattern_or(z1: Pattern, z2: Pattern) -> Pattern:
    if z1.shape != z2.shape:
        raise ShapeError(f"pattern shapes differ: {z1.shape} vs {z2.shape}")
    return Pattern(mask=z1.mask | z2.mask)


def masked_input(a, z: Pattern) -> np.ndarray:
    """The input restricted to its pattern, z o a."""
    a = as_matrix(a)
    if a.shape != z.shape:
        raise ShapeError(f"pattern shape {z.shape} does not match matrix shape {a.shape}")
    return np.where(z.mask, a, 0)
