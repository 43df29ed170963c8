import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbmgauss.errors import InvalidArgumentError, NumericalError
from qbmgauss.states import basset_hound, thermal, two_mode_squeezed
from qbmgauss.symplectic import (
    GaussianState,
    check_bona_fide,
    matrix_function,
    partial_transpose,
    symplectic_eigenvalues,
    symplectic_form,
)
from support import embed, random_state, rotation, squeezer


class TestSymplecticForm:
    def test_one_mode(self):
        assert symplectic_form(1).tolist() == [[0, 1], [-1, 0]]

    def test_two_modes_block_diagonal(self):
        om = symplectic_form(2)
        assert om.shape == (4, 4)
        assert np.array_equal(om[:2, :2], symplectic_form(1))
        assert np.array_equal(om[2:, 2:], symplectic_form(1))
        assert not om[:2, 2:].any() and not om[2:, :2].any()

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_square_is_minus_identity_exactly(self, n):
        om = symplectic_form(n)
        assert om.dtype.kind == "i"
        assert np.array_equal(om @ om, -np.eye(2 * n, dtype=int))
        assert np.array_equal(om.T @ om, np.eye(2 * n, dtype=int))

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_rejects_bad_size(self, bad):
        with pytest.raises(InvalidArgumentError):
            symplectic_form(bad)


class TestGaussianState:
    def test_symmetrises_small_asymmetry_with_warning(self):
        m = np.eye(2)
        m[0, 1] = 1e-9
        with pytest.warns(RuntimeWarning):
            s = GaussianState(m)
        assert s.cm[0, 1] == s.cm[1, 0] == 5e-10

    def test_silent_below_warning_threshold(self):
        m = np.eye(2)
        m[0, 1] = 1e-14
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            GaussianState(m)

    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidArgumentError):
            GaussianState([[1.0, 0.5], [0.0, 1.0]])

    @pytest.mark.parametrize("m", [np.eye(3), np.ones((2, 3)), np.array([[np.nan, 0], [0, 1]])])
    def test_rejects_malformed(self, m):
        with pytest.raises(InvalidArgumentError):
            GaussianState(m)

    def test_read_only(self):
        s = GaussianState(np.eye(2))
        with pytest.raises(ValueError):
            s.cm[0, 0] = 2.0

    def test_reduced_and_blocks(self):
        s = basset_hound(1.0)
        red = s.reduced([1, 2])
        assert red.n_modes == 2
        assert np.array_equal(red.mode_block(0), s.mode_block(1))
        assert np.array_equal(red.mode_block(0, 1), s.mode_block(1, 2))

    def test_equality_ignores_meta(self):
        assert GaussianState(np.eye(2), {"a": 1}) == GaussianState(np.eye(2))


class TestSpectrum:
    def test_vacuum(self):
        assert np.allclose(symplectic_eigenvalues(np.eye(2)), [1.0], atol=1e-14)

    def test_thermal(self):
        assert np.allclose(symplectic_eigenvalues(thermal(1.0)), [3.0], atol=1e-13)

    def test_two_mode_squeezed_is_pure(self):
        assert np.allclose(symplectic_eigenvalues(two_mode_squeezed(2.0)), [1.0, 1.0], atol=1e-9)

    def test_rejects_asymmetric_array(self):
        with pytest.raises(InvalidArgumentError):
            symplectic_eigenvalues(np.array([[1.0, 1.0], [0.0, 1.0]]))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_invariant_under_symplectic_congruence(self, n, seed):
        rng = np.random.default_rng(seed)
        state = random_state(n, rng)
        s = np.eye(2 * n)
        for k in range(n):
            s = embed(squeezer(rng.uniform(-1, 1)) @ rotation(rng.uniform(0, 6.3)), k, n) @ s
        assert np.allclose(symplectic_form(n), s @ symplectic_form(n) @ s.T, atol=1e-12)
        a = symplectic_eigenvalues(state)
        b = symplectic_eigenvalues(s.T @ state.cm @ s)
        assert np.allclose(a, b, rtol=1e-9, atol=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_determinant_is_product_of_squares(self, n, seed):
        state = random_state(n, np.random.default_rng(seed))
        nu = symplectic_eigenvalues(state)
        assert np.linalg.det(state.cm) == pytest.approx(np.prod(nu**2), rel=1e-9)


class TestBonaFide:
    def test_vacuum_saturates(self):
        rep = check_bona_fide(np.eye(2))
        assert rep.valid
        assert abs(rep.min_eigenvalue) < 1e-14

    def test_sub_vacuum_rejected(self):
        rep = check_bona_fide(np.diag([0.5, 0.5]))
        assert not rep.valid
        assert rep.min_eigenvalue == pytest.approx(-0.5)

    def test_basset_hound(self):
        assert check_bona_fide(basset_hound(2.0)).valid

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_random_physical_states_pass(self, n, seed):
        assert check_bona_fide(random_state(n, np.random.default_rng(seed))).valid


class TestPartialTranspose:
    def test_product_state_spectrum_unchanged(self):
        cm = np.zeros((4, 4))
        cm[:2, :2] = np.diag([2.0, 0.5 + 1.5])
        cm[2:, 2:] = 3 * np.eye(2)
        before = symplectic_eigenvalues(cm)
        after = symplectic_eigenvalues(partial_transpose(cm, {1}))
        assert np.allclose(before, after, atol=1e-12)

    @pytest.mark.parametrize("r", [0.3, 1.0, 2.0])
    def test_two_mode_squeezed_spectrum(self, r):
        nu = symplectic_eigenvalues(partial_transpose(two_mode_squeezed(r), {1}))
        assert np.allclose(nu, [np.exp(-2 * r), np.exp(2 * r)], rtol=1e-9)

    def test_involution_exact(self):
        s = basset_hound(1.3)
        twice = partial_transpose(partial_transpose(s, {0, 2}), {0, 2})
        assert np.array_equal(twice, s.cm)

    def test_preserves_determinant(self):
        s = random_state(3, np.random.default_rng(7))
        assert np.linalg.det(partial_transpose(s, {1})) == pytest.approx(np.linalg.det(s.cm), rel=1e-12)

    def test_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            partial_transpose(np.eye(4), {2})


class TestMatrixFunction:
    def test_sqrt_identity(self):
        assert np.allclose(matrix_function(np.eye(3), np.sqrt), np.eye(3))

    def test_sqrt_diagonal(self):
        assert np.allclose(matrix_function(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]))

    def test_sqrt_round_trip(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = a @ a.conj().T + 0.1 * np.eye(4)
        root = matrix_function(m, np.sqrt)
        assert np.linalg.norm(root @ root - m) / np.linalg.norm(m) < 1e-10

    def test_identity_function(self):
        rng = np.random.default_rng(4)
        m = rng.normal(size=(5, 5))
        assert np.allclose(matrix_function(m, lambda w: w), m, atol=1e-12, rtol=0)

    def test_defective_matrix_rejected(self):
        with pytest.raises(NumericalError) as info:
            matrix_function(np.array([[1.0, 1.0], [0.0, 1.0]]), np.sqrt)
        assert info.value.estimate > 1e12

    def test_non_square(self):
        with pytest.raises(InvalidArgumentError):
            matrix_function(np.ones((2, 3)), np.sqrt)
