"""Test-matrix generators: the cosine test matrix, permutation-like matrices and
seeded random members of the structured classes.

Random matrices come from numpy's ``Generator(PCG64(seed))`` so a seed gives the
same matrix on every platform.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from .errors import InvalidParameterError
from .models import GenSpec, as_matrix

logger = logging.getLogger(__name__)

_REAL_KINDS = ("symmetric", "skew_symmetric")


def cos_test_matrix(n: int) -> np.ndarray:
    """A[i, j] = cos(3^(1/4) sqrt(i) j)^5 with 1-based i, j."""
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    idx = np.arange(1, n + 1, dtype=np.float64)
    return np.cos(3.0**0.25 * np.sqrt(idx)[:, None] * idx[None, :]) ** 5


def exchange_matrix(m: int) -> np.ndarray:
    """Ones on the anti-diagonal."""
    if m < 1:
        raise InvalidParameterError(f"m must be positive, got {m}")
    return np.fliplr(np.eye(m))


def symplectic_matrix(m: int) -> np.ndarray:
    """[[0, I], [-I, 0]]."""
    if m < 2 or m % 2:
        raise InvalidParameterError(f"the symplectic matrix needs an even size, got {m}")
    h = m // 2
    k = np.zeros((m, m))
    k[:h, h:] = np.eye(h)
    k[h:, :h] = -np.eye(h)
    return k


def cyclic_matrix(m: int, sign: int = 1) -> np.ndarray:
    """Identity on the superdiagonal with ``sign`` in the bottom-left corner."""
    if m < 1:
        raise InvalidParameterError(f"m must be positive, got {m}")
    if sign not in (1, -1):
        raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
    c = np.eye(m, k=1)
    c[m - 1, 0] += sign
    return c


def _gaussian(rng: np.random.Generator, shape, real: bool) -> np.ndarray:
    g = rng.standard_normal(shape)
    if real:
        return g
    return g + 1j * rng.standard_normal(shape)


def _hermitian_part(g: np.ndarray, sign: int = 1) -> np.ndarray:
    return (g + sign * g.conj().T) / 2.0


def _skew_circulant(c: np.ndarray) -> np.ndarray:
    n = c.size
    i, j = np.indices((n, n))
    return c[(j - i) % n] * np.where(j >= i, 1.0, -1.0)


def _hamiltonian(rng: np.random.Generator, size: int, skew: bool) -> np.ndarray:
    h = size // 2
    sign = -1 if skew else 1
    e = _gaussian(rng, (h, h), real=False)
    f = _hermitian_part(_gaussian(rng, (h, h), real=False), sign)
    g = _hermitian_part(_gaussian(rng, (h, h), real=False), sign)
    corner = e.conj().T if skew else -e.conj().T
    return np.block([[e, f], [g, corner]])


def _structured(kind: str, size: int, rng: np.random.Generator) -> np.ndarray:
    real = kind in _REAL_KINDS
    g = _gaussian(rng, (size, size), real)
    j = exchange_matrix(size)
    if kind == "hermitian":
        return _hermitian_part(g)
    if kind == "skew_hermitian":
        return _hermitian_part(g, -1)
    if kind in ("complex_symmetric", "symmetric"):
        return (g + g.T) / 2.0
    if kind in ("skew_complex_symmetric", "skew_symmetric"):
        return (g - g.T) / 2.0
    if kind == "centrosymmetric":
        return (g + j @ g @ j) / 2.0
    if kind == "skew_centrosymmetric":
        return (g - j @ g @ j) / 2.0
    if kind == "persymmetric":
        return (g + j @ g.conj().T @ j) / 2.0
    if kind == "skew_persymmetric":
        return (g - j @ g.conj().T @ j) / 2.0
    if kind == "circulant":
        return scipy.linalg.circulant(g[0])
    if kind == "skew_circulant":
        return _skew_circulant(g[0])
    if kind == "hamiltonian":
        return _hamiltonian(rng, size, skew=False)
    if kind == "skew_hamiltonian":
        return _hamiltonian(rng, size, skew=True)
    raise InvalidParameterError(f"no random generator for kind {kind!r}")


def random_member(spec: GenSpec) -> np.ndarray:
    """Matrix of kind ``spec.kind``; random kinds are reproducible for a fixed seed.

    The fixed matrices (cos40, exchange, symplectic, cyclic_plus, cyclic_minus)
    ignore the seed. ``spec.rank_deficiency`` trailing singular values are zeroed
    afterwards.
    """
    if spec.kind == "cos40":
        a = cos_test_matrix(spec.size)
    elif spec.kind == "exchange":
        a = exchange_matrix(spec.size)
    elif spec.kind == "symplectic":
        a = symplectic_matrix(spec.size)
    elif spec.kind in ("cyclic_plus", "cyclic_minus"):
        a = cyclic_matrix(spec.size, 1 if spec.kind == "cyclic_plus" else -1)
    else:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        a = _structured(spec.kind, spec.size, rng)
    if spec.rank_deficiency:
        a = inject_rank_deficiency(a, spec.rank_deficiency)
    logger.debug(f"generated {spec.kind} of size {spec.size} (seed {spec.seed}, deficiency {spec.rank_deficiency})")
    return a


def inject_rank_deficiency(a, k: int) -> np.ndarray:
    """Zero the k smallest singular values of ``a``."""
    a = as_matrix(a)
    if k < 0 or k >= min(a.shape):
        raise InvalidParameterError(f"k must lie in [0, {min(a.shape) - 1}], got {k}")
    if k == 0:
        return a.copy()
    u, s, vh = scipy.linalg.svd(a, full_matrices=False)
    s[s.size - k :] = 0.0
    return (u * s) @ vh
