"""Shared test fixtures and configuration."""

import threading
import time
from typing import Callable, Optional

import factory
import numpy as np
import psutil
import pytest
import scipy.linalg
from faker import Faker

from src.config import get_settings
from src.diagnostics import build_report
from src.models import TABLE_KINDS, GenSpec, Pattern, SparsifyParams
from src.sparsifier import sparsify
from src.spectral import factorize, pseudoinverse
from src.structgen import cos_test_matrix

fake = Faker()
Faker.seed(20240611)

GOLDEN_PARAMS = SparsifyParams(p=1.0, q=0.8)


# Factory classes for test data generation
class GenSpecFactory(factory.Factory):
    """Factory for seeded structured-matrix requests."""

    class Meta:
        model = GenSpec

    kind = factory.Iterator(TABLE_KINDS)
    size = factory.LazyFunction(lambda: fake.random_element([4, 6, 8]))
    seed = factory.LazyFunction(lambda: fake.pyint(min_value=0, max_value=2**31))
    rank_deficiency = 0


def make_matrix(
    rng: np.random.Generator, m: int, n: int, complex_: bool = False, rank: Optional[int] = None
) -> np.ndarray:
    """Gaussian matrix, optionally of prescribed rank (trailing singular values zeroed)."""
    a = rng.standard_normal((m, n))
    if complex_:
        a = a + 1j * rng.standard_normal((m, n))
    if rank is not None and rank < min(m, n):
        u, s, vh = scipy.linalg.svd(a, full_matrices=False)
        s[rank:] = 0.0
        a = (u * s) @ vh
    return a


def make_pattern(rng: np.random.Generator, shape, density: float = 0.6) -> Pattern:
    """Random pattern with at least one free entry per row and per column."""
    mask = rng.random(shape) < density
    mask[np.arange(shape[0]), rng.integers(0, shape[1], shape[0])] = True
    mask[rng.integers(0, shape[0], shape[1]), np.arange(shape[1])] = True
    return Pattern(mask=mask)


def kkt_oracle(a: np.ndarray, z: Pattern, rank_tol: Optional[float] = None) -> np.ndarray:
    """Minimizer from the full mn x mn augmented system with Kronecker-sum Hessian."""
    m, n = a.shape
    f = factorize(a, rank_tol)
    p = pseudoinverse(f)
    ph = p.conj().T
    b_mat = p @ ph
    c_mat = ph @ p
    hessian = np.kron(c_mat, np.eye(n)) + np.kron(np.eye(m), b_mat.T)
    rhs = hessian @ a.ravel()

    rows = []
    for i in range(m):
        for k in range(f.p_r):
            row = np.zeros((m, n), dtype=complex)
            row[i, :] = f.v2[:, k]
            rows.append(row.ravel())
    for j in range(n):
        for k in range(f.p_l):
            row = np.zeros((m, n), dtype=complex)
            row[:, j] = f.u2[:, k].conj()
            rows.append(row.ravel())
    for idx in np.flatnonzero(~z.mask.ravel()):
        row = np.zeros(m * n, dtype=complex)
        row[idx] = 1.0
        rows.append(row)

    e = np.array(rows).reshape(len(rows), m * n)
    kkt = np.block([[hessian, e.conj().T], [e, np.zeros((len(rows), len(rows)))]])
    full_rhs = np.concatenate([rhs, np.zeros(len(rows))])
    sol, *_ = scipy.linalg.lstsq(kkt, full_rhs, cond=1e-12)
    x = sol[: m * n].reshape(m, n)
    return x if np.iscomplexobj(a) else x.real


def _prefix_measure(values: np.ndarray, p: float) -> float:
    moduli = np.abs(values)
    if moduli.size == 0:
        return 0.0
    if p == 0:
        return float(np.count_nonzero(moduli))
    if np.isinf(p):
        return float(moduli.max())
    total = float(np.sum(moduli**p))
    return total if p < 1 else total ** (1.0 / p)


def enumerate_vector_pattern(x: np.ndarray, p: float, q: float, n_min: int = 0) -> np.ndarray:
    """Exhaustive optimum: keep the fewest nonzeros whose eliminated set stays within the budget.

    Only eliminations of ascending-modulus prefixes can be optimal, so every
    elimination count is tried and the largest admissible one wins.
    """
    moduli = np.abs(x)
    support = np.flatnonzero(moduli)
    order = support[np.argsort(moduli[support], kind="stable")]
    budget = (1.0 - q) * _prefix_measure(x, p)
    best = 0
    for count in range(support.size - n_min + 1):
        if _prefix_measure(x[order[:count]], p) <= budget * (1 + 1e-12):
            best = count
    mask = np.zeros(x.size, dtype=bool)
    mask[order[best:]] = True
    return mask


def complex_permutation(rng: np.random.Generator, n: int) -> np.ndarray:
    """Permutation matrix with random unit-modulus entries."""
    perm = np.eye(n)[rng.permutation(n)]
    return perm * np.exp(2j * np.pi * rng.random(n))[None, :]


# Pytest fixtures
@pytest.fixture(autouse=True)
def fresh_settings():
    """Drop cached settings so environment changes take effect."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for one test."""
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture(scope="session")
def cos40() -> np.ndarray:
    """The 40 x 40 cosine test matrix."""
    return cos_test_matrix(40)


@pytest.fixture(scope="session")
def golden_outcome(cos40):
    """Sparsification of the cosine matrix with p = 1, q = 0.8."""
    return sparsify(cos40, GOLDEN_PARAMS)


@pytest.fixture(scope="session")
def golden_report(cos40, golden_outcome):
    return build_report(cos40, golden_outcome, GOLDEN_PARAMS)


@pytest.fixture
def oracle() -> Callable[..., np.ndarray]:
    return kkt_oracle


@pytest.fixture
def gen_spec_factory():
    return GenSpecFactory


# Performance testing utilities
@pytest.fixture
def performance_monitor():
    """Monitor performance metrics during tests."""

    class PerformanceMonitor:
        def __init__(self):
            self.start_time = None
            self.end_time = None
            self.peak_memory = 0
            self.monitoring = False
            self.monitor_thread = None

        def start(self):
            self.start_time = time.time()
            self.monitoring = True
            self.monitor_thread = threading.Thread(target=self._monitor_memory)
            self.monitor_thread.daemon = True
            self.monitor_thread.start()

        def stop(self):
            self.end_time = time.time()
            self.monitoring = False
            if self.monitor_thread:
                self.monitor_thread.join(timeout=1.0)

        def _monitor_memory(self):
            process = psutil.Process()
            while self.monitoring:
                self.peak_memory = max(self.peak_memory, process.memory_info().rss)
                time.sleep(0.05)

        @property
        def duration(self):
            if self.start_time and self.end_time:
                return self.end_time - self.start_time
            return None

        @property
        def peak_memory_mb(self):
            return self.peak_memory / 1024 / 1024

    return PerformanceMonitor()


# Test collection hooks
def pytest_collection_modifyitems(config, items):
    """Add the unit marker to every test without a broader marker."""
    for item in items:
        if not any(
            marker.name in ["integration", "performance", "property", "slow", "cli"] for marker in item.iter_markers()
        ):
            item.add_marker(pytest.mark.unit)
