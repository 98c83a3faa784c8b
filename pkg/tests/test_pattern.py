"""Tests for Lp sparsity patterns."""

import math

import numpy as np
import pytest

from src.errors import InvalidParameterError, ShapeError
from src.models import LpParams, Pattern
from src.pattern import (
    default_min_nonzeros,
    lp_measure,
    masked_input,
    matrix_pattern,
    pattern_or,
    pattern_transpose,
    vector_pattern,
)
from src.spectral import factorize
from tests.conftest import complex_permutation, enumerate_vector_pattern, make_matrix


class TestLpMeasure:
    """Test the generalized Lp measure."""

    def test_euclidean(self):
        assert lp_measure([3, 4], 2) == pytest.approx(5.0)

    def test_count(self):
        assert lp_measure([1, -2, 0], 0) == 2

    def test_fractional_p_is_unrooted(self):
        assert lp_measure([1, 2], 0.5) == pytest.approx(1 + math.sqrt(2))

    def test_max_modulus(self):
        assert lp_measure([1, -3j, 2], math.inf) == pytest.approx(3.0)

    def test_negative_p(self):
        with pytest.raises(InvalidParameterError):
            lp_measure([1], -1)

    def test_large_p_stays_finite(self):
        value = lp_measure([3, 4], 40)
        assert isinstance(value, float)
        assert value == pytest.approx(4 * (1 + 0.75**40) ** (1 / 40))

    def test_large_entries_do_not_overflow(self):
        assert lp_measure([1e200, 1e200], 2) == pytest.approx(math.sqrt(2) * 1e200)
        assert lp_measure([1e200, -1e200], 0.5) == pytest.approx(2e100)


class TestVectorPattern:
    """Test the vector pattern problem."""

    def test_keeps_largest_under_l1_budget(self):
        mask = vector_pattern(np.array([3, 1, 0, 2]), p=1, q=0.5, n_min=1)
        np.testing.assert_array_equal(mask, [True, False, False, False])

    def test_zero_vector(self):
        assert not vector_pattern(np.zeros(5), p=2, q=0.3).any()

    def test_max_norm(self):
        mask = vector_pattern(np.array([5, 4j, 1]), p=math.inf, q=0.5)
        np.testing.assert_array_equal(mask, [True, True, False])

    def test_q_one_keeps_every_nonzero(self, rng):
        x = rng.standard_normal(10)
        x[3] = 0
        np.testing.assert_array_equal(vector_pattern(x, 1.5, 1.0), x != 0)

    def test_q_zero_eliminates_everything(self, rng):
        assert not vector_pattern(rng.standard_normal(8), 2, 0.0).any()

    def test_n_min_is_respected(self, rng):
        mask = vector_pattern(rng.standard_normal(8), 2, 0.0, n_min=3)
        assert mask.sum() == 3

    def test_n_min_above_nnz(self):
        with pytest.raises(InvalidParameterError):
            vector_pattern(np.array([1.0, 0.0]), 1, 0.5, n_min=2)

    def test_ties_broken_by_index(self):
        mask = vector_pattern(np.array([1.0, 1.0, 1.0]), p=0, q=0.5)
        np.testing.assert_array_equal(mask, [False, True, True])

    def test_count_budget_uses_floor(self):
        # (1 - 0.75) * 6 = 1.5 -> one entry eliminated
        assert vector_pattern(np.arange(1.0, 7.0), p=0, q=0.75).sum() == 5

    @pytest.mark.property
    @pytest.mark.parametrize("p", [0, 0.5, 1, 2, 3.5, math.inf])
    def test_matches_exhaustive_enumeration(self, rng, p):
        for _ in range(200):
            length = int(rng.integers(1, 13))
            x = rng.standard_normal(length) + 1j * rng.standard_normal(length)
            x[rng.random(length) < 0.2] = 0
            q = float(rng.random())
            nnz = int(np.count_nonzero(x))
            n_min = int(rng.integers(0, nnz + 1))
            np.testing.assert_array_equal(vector_pattern(x, p, q, n_min), enumerate_vector_pattern(x, p, q, n_min))


class TestMatrixPattern:
    """Test the row/column union pattern."""

    def test_identity(self):
        z = matrix_pattern(np.eye(3), LpParams(p=2, q=0.3, n_row=1, n_col=1))
        np.testing.assert_array_equal(z.mask, np.eye(3, dtype=bool))

    def test_diagonally_dominant(self):
        z = matrix_pattern(np.array([[10.0, 1.0], [1.0, 10.0]]), LpParams(p=1, q=0.8, n_row=1, n_col=1))
        np.testing.assert_array_equal(z.mask, np.eye(2, dtype=bool))

    def test_zero_row_is_clamped(self):
        a = np.array([[0.0, 0.0], [1.0, 2.0]])
        z = matrix_pattern(a, LpParams(p=1, q=0.5, n_row=2, n_col=1))
        assert not z.mask[0].any()

    def test_minimum_counts_beyond_dimensions(self):
        with pytest.raises(InvalidParameterError):
            matrix_pattern(np.ones((2, 3)), LpParams(n_row=4))

    def test_symmetric_shortcut_matches(self, rng):
        g = rng.standard_normal((9, 9))
        a = g + g.T
        params = LpParams(p=1.5, q=0.6, n_row=2, n_col=2)
        assert matrix_pattern(a, params, symmetric=True) == matrix_pattern(a, params)

    def test_symmetric_shortcut_needs_square(self):
        with pytest.raises(InvalidParameterError):
            matrix_pattern(np.ones((2, 3)), LpParams(), symmetric=True)


@pytest.mark.property
class TestPatternProperties:
    """Invariance and monotonicity properties of matrix_pattern."""

    P_VALUES = [0, 0.5, 1, 2, math.inf]

    def _draw(self, rng):
        m, n = (int(v) for v in rng.integers(2, 21, size=2))
        a = make_matrix(rng, m, n, complex_=True)
        a[rng.random((m, n)) < 0.15] = 0
        k = int(rng.integers(0, min(m, n) + 1))
        params = LpParams(p=float(rng.choice(self.P_VALUES)), q=float(rng.random()), n_row=k, n_col=k)
        return a, params

    def test_zeros_stay_zero(self, rng):
        for _ in range(100):
            a, params = self._draw(rng)
            assert not matrix_pattern(a, params).mask[a == 0].any()

    def test_scale_invariance(self, rng):
        for _ in range(100):
            a, params = self._draw(rng)
            alpha = complex(*rng.standard_normal(2)) * 10 ** rng.uniform(-3, 3)
            assert matrix_pattern(alpha * a, params) == matrix_pattern(a, params)

    def test_transpose_commutes(self, rng):
        for _ in range(100):
            a, params = self._draw(rng)
            z = matrix_pattern(a, params)
            assert matrix_pattern(a.T, params) == pattern_transpose(z)
            assert matrix_pattern(a.conj().T, params) == pattern_transpose(z)

    def test_modulus_invariance(self, rng):
        for _ in range(100):
            a, params = self._draw(rng)
            assert matrix_pattern(np.abs(a), params) == matrix_pattern(a, params)

    def test_complex_permutation_equivariance(self, rng):
        for _ in range(100):
            a, params = self._draw(rng)
            p_mat = complex_permutation(rng, a.shape[0])
            q_mat = complex_permutation(rng, a.shape[1])
            expected = (np.abs(p_mat) @ matrix_pattern(a, params).mask.astype(float) @ np.abs(q_mat)) > 0.5
            np.testing.assert_array_equal(matrix_pattern(p_mat @ a @ q_mat, params).mask, expected)

    def test_monotone_in_q(self, rng):
        for _ in range(100):
            a, params = self._draw(rng)
            q1, q2 = sorted(rng.random(2))
            low = matrix_pattern(a, params.model_copy(update={"q": float(q1)})).mask
            high = matrix_pattern(a, params.model_copy(update={"q": float(q2)})).mask
            assert not (low & ~high).any()


class TestPatternAlgebra:
    """Test pattern helpers."""

    def test_default_min_nonzeros_full_rank(self, rng):
        assert default_min_nonzeros(factorize(make_matrix(rng, 5, 5))) == (1, 1)

    def test_default_min_nonzeros_rank_four(self, rng):
        assert default_min_nonzeros(factorize(make_matrix(rng, 6, 6, rank=4), rank_tol=1e-10)) == (3, 3)

    def test_default_min_nonzeros_wide(self, rng):
        assert default_min_nonzeros(factorize(make_matrix(rng, 3, 5))) == (3, 1)

    def test_transpose(self):
        z = Pattern(mask=[[0, 1, 0], [0, 0, 0]])
        assert pattern_transpose(z).shape == (3, 2)
        assert pattern_transpose(z).mask[1, 0]

    def test_or(self):
        eye = Pattern(mask=np.eye(2))
        anti = Pattern(mask=np.fliplr(np.eye(2)))
        assert pattern_or(eye, anti).nnz == 4
        assert pattern_or(eye, eye) == eye

    def test_or_shape_mismatch(self):
        with pytest.raises(ShapeError):
            pattern_or(Pattern(mask=np.eye(2)), Pattern(mask=np.eye(3)))

    def test_masked_input(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(masked_input(a, Pattern(mask=np.eye(2))), [[1, 0], [0, 4]])
