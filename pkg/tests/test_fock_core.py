import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiphase import (
    DensityMatrix,
    Operator,
    StateVector,
    TruncatedFockSpace,
    annihilation_matrix,
    coherent_state,
    creation_matrix,
    displaced_number_state,
    displacement_matrix,
    displacement_matrix_laguerre,
    matrix_exponential,
    number_matrix,
    number_state,
    parity_matrix,
    required_dim,
)
from quasiphase.errors import ToleranceError, TruncationError, ValidationError

from conftest import coherent_amplitudes_closed, expm_antihermitian_oracle

amplitudes = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


class TestSpaceAndStates:
    def test_dim_must_be_at_least_two(self):
        with pytest.raises(ValidationError):
            TruncatedFockSpace(1)
        with pytest.raises(ValidationError):
            TruncatedFockSpace(2.5)

    def test_number_state(self):
        space = TruncatedFockSpace(4)
        np.testing.assert_array_equal(number_state(space, 0).amplitudes, [1, 0, 0, 0])
        np.testing.assert_array_equal(number_state(space, 3).amplitudes, [0, 0, 0, 1])

    def test_number_state_out_of_range_names_n_and_dim(self):
        with pytest.raises(ValidationError, match=r"n=4.*dim=4"):
            number_state(TruncatedFockSpace(4), 4)

    def test_state_is_immutable(self, space32):
        psi = number_state(space32, 1)
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 1.0

    def test_unnormalized_state_rejected(self, space32):
        with pytest.raises(ValidationError):
            StateVector(space32, np.ones(32))

    def test_tail_mass(self, space32):
        assert number_state(space32, 0).tail_mass == 0.0
        assert number_state(space32, 31).tail_mass == 1.0
        with pytest.raises(TruncationError):
            number_state(space32, 30).require_headroom()


class TestDensityMatrix:
    def test_projector(self, space32):
        rho = number_state(space32, 2).projector()
        assert rho.elements[2, 2] == 1.0

    def test_rejects_non_hermitian(self):
        space = TruncatedFockSpace(2)
        with pytest.raises(ValidationError, match="Hermitian"):
            DensityMatrix(space, [[0.5, 0.1], [0.0, 0.5]])

    def test_rejects_bad_trace(self):
        with pytest.raises(ValidationError, match="trace"):
            DensityMatrix(TruncatedFockSpace(2), np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValidationError, match="semidefinite"):
            DensityMatrix(TruncatedFockSpace(2), [[1.5, 0], [0, -0.5]])


class TestLadder:
    def test_dim2(self):
        np.testing.assert_array_equal(annihilation_matrix(TruncatedFockSpace(2)).elements, [[0, 1], [0, 0]])

    def test_dim3_entry(self):
        a = annihilation_matrix(TruncatedFockSpace(3)).elements
        assert a[1, 2] == math.sqrt(2)

    def test_annihilates_vacuum(self, space32):
        a = annihilation_matrix(space32)
        np.testing.assert_array_equal(a.apply(number_state(space32, 0)), np.zeros(32))

    def test_creation_is_adjoint(self, space32):
        np.testing.assert_array_equal(
            creation_matrix(space32).elements, annihilation_matrix(space32).elements.conj().T
        )

    @pytest.mark.parametrize("dim", [2, 5, 64])
    def test_commutator_defect_confined_to_edge(self, dim):
        space = TruncatedFockSpace(dim)
        a = annihilation_matrix(space).elements
        comm = a @ a.conj().T - a.conj().T @ a - np.eye(dim)
        # sqrt(n)**2 rounds, so "zero" means zero to a few ulps of n
        assert np.max(np.abs(comm[: dim - 1, : dim - 1])) <= 1e-13
        assert abs(comm[dim - 1, dim - 1] + dim) <= 1e-13

    def test_parity_conjugates_a_exactly(self, space64):
        a = annihilation_matrix(space64).elements
        p = parity_matrix(space64).elements
        np.testing.assert_array_equal(p @ a @ p, -a)


class TestParity:
    def test_dim3(self):
        np.testing.assert_array_equal(parity_matrix(TruncatedFockSpace(3)).elements, np.diag([1, -1, 1]))

    def test_involution(self, space32):
        p = parity_matrix(space32).elements
        np.testing.assert_array_equal(p @ p, np.eye(32))

    def test_odd_fock_state(self, space32):
        p = parity_matrix(space32).elements
        assert p[1, 1] == -1

    def test_parity_from_exponential(self, space64):
        p = matrix_exponential(number_matrix(space64), -1j * math.pi).elements
        assert np.max(np.abs(p - parity_matrix(space64).elements)) <= 1e-12


class TestCoherent:
    def test_zero_is_vacuum(self, space32):
        np.testing.assert_array_equal(coherent_state(space32, 0).amplitudes, number_state(space32, 0).amplitudes)

    def test_c0_alpha1(self, space32):
        # frozen from mpmath: exp(-1/2)
        assert abs(coherent_state(space32, 1.0).amplitudes[0] - 0.60653065971263342) <= 1e-12

    def test_norm_and_correction(self, space32):
        psi = coherent_state(space32, 1.0)
        assert abs(np.linalg.norm(psi.amplitudes) - 1) <= 1e-12
        assert abs(psi.norm_correction - 1) <= 1e-13

    @pytest.mark.parametrize("alpha", [0.3, 1.2 - 0.5j, -2j])
    def test_matches_closed_form(self, space64, alpha):
        np.testing.assert_allclose(
            coherent_state(space64, alpha).amplitudes, coherent_amplitudes_closed(alpha, 64), atol=1e-13
        )

    def test_truncation_rule_names_required_dim(self):
        # |alpha| = 2: 4 + 16 + 16 = 36
        assert required_dim(2.0) == 36
        with pytest.raises(TruncationError, match="dim >= 36") as info:
            coherent_state(TruncatedFockSpace(35), 2.0)
        assert info.value.required_dim == 36
        coherent_state(TruncatedFockSpace(36), 2.0)


class TestMatrixExponential:
    def test_zero(self, space32):
        a = annihilation_matrix(space32)
        np.testing.assert_array_equal(matrix_exponential(a, 0).elements, np.eye(32))

    def test_diagonal(self):
        out = matrix_exponential(np.diag([0, -1j * math.pi, -2j * math.pi])).elements
        np.testing.assert_allclose(out, np.diag([1, -1, 1]), atol=1e-14)

    def test_column_zero_is_coherent(self):
        space = TruncatedFockSpace(48)
        alpha = 0.8j
        a = annihilation_matrix(space).elements
        d = matrix_exponential(alpha * a.conj().T - np.conj(alpha) * a).elements
        assert np.max(np.abs(d[:, 0] - coherent_amplitudes_closed(alpha, 48))) <= 1e-10

    @pytest.mark.parametrize("alpha", [0.5, 1.5 + 1.5j, 3.0])
    def test_relative_residual_against_eigen_oracle(self, space64, alpha):
        a = annihilation_matrix(space64).elements
        gen = alpha * a.conj().T - np.conj(alpha) * a
        got = matrix_exponential(gen).elements
        ref = expm_antihermitian_oracle(gen)
        assert np.linalg.norm(got - ref) / np.linalg.norm(ref) <= 1e-12

    def test_overflow_rejected_with_norm(self):
        with pytest.raises(ToleranceError, match="1-norm"):
            matrix_exponential(np.array([[800.0, 0], [0, 1.0]]))

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            matrix_exponential(np.array([[np.nan, 0], [0, 1.0]]))


class TestDisplacement:
    def test_zero_is_identity(self, space32):
        np.testing.assert_array_equal(displacement_matrix(space32, 0).elements, np.eye(32))

    def test_vacuum_overlap(self, space32):
        d = displacement_matrix(space32, 1.0).elements
        assert abs(d[0, 0] - 0.60653065971263342) <= 1e-12

    def test_inverse(self, space64):
        alpha = 0.7 + 0.3j
        prod = displacement_matrix(space64, alpha).elements @ displacement_matrix(space64, -alpha).elements
        assert np.max(np.abs(prod - np.eye(64))) <= 1e-10

    def test_unitary_flag_checked(self, space64):
        op = displacement_matrix(space64, 1 + 1j)
        assert op.unitary
        with pytest.raises(ToleranceError):
            Operator(space64, 2 * np.eye(64), unitary=True)

    def test_first_column_is_coherent_state(self, space64):
        alpha = -1.1 + 0.4j
        d = displacement_matrix(space64, alpha).elements
        np.testing.assert_allclose(d[:, 0], coherent_state(space64, alpha).amplitudes, atol=1e-12)

    def test_truncation_check(self):
        with pytest.raises(TruncationError):
            displacement_matrix(TruncatedFockSpace(20), 1.0)

    @given(alpha=amplitudes, gamma=amplitudes)
    @settings(max_examples=25, deadline=None)
    def test_composition_on_low_block(self, alpha, gamma):
        space = TruncatedFockSpace(64)
        lhs = displacement_matrix(space, alpha).elements @ displacement_matrix(space, gamma).elements
        rhs = np.exp(1j * (alpha * np.conj(gamma)).imag) * displacement_matrix(space, alpha + gamma).elements
        assert np.max(np.abs(lhs - rhs)[:32, :32]) <= 1e-9

    @pytest.mark.parametrize("alpha", [0.1j, 1.0, 1.3 - 1.5j, 2.0, -2.0j, 1.2 + 1.6j])
    def test_laguerre_cross_check(self, space64, alpha):
        exp_path = displacement_matrix(space64, alpha).elements
        lag_path = displacement_matrix_laguerre(space64, alpha).elements
        assert np.max(np.abs(exp_path - lag_path)[:32, :32]) <= 1e-9

    def test_laguerre_zero_is_identity(self, space32):
        np.testing.assert_array_equal(displacement_matrix_laguerre(space32, 0).elements, np.eye(32))

    def test_laguerre_vs_eigen_oracle_full_matrix(self):
        # the eigen oracle of the *truncated* generator shares the exponential
        # path's edge distortion, so compare Laguerre against an untruncated
        # generator of twice the size instead
        big = TruncatedFockSpace(128)
        a = annihilation_matrix(big).elements
        alpha = 1.4 - 0.6j
        ref = expm_antihermitian_oracle(alpha * a.conj().T - np.conj(alpha) * a)[:64, :64]
        lag = displacement_matrix_laguerre(TruncatedFockSpace(64), alpha).elements
        assert np.max(np.abs(ref - lag)) <= 1e-9


class TestDisplacedNumberState:
    def test_zero_displacement(self, space32):
        np.testing.assert_array_equal(
            displaced_number_state(space32, 0, 2).amplitudes, number_state(space32, 2).amplitudes
        )

    def test_k0_is_coherent(self, space32):
        np.testing.assert_allclose(
            displaced_number_state(space32, 1.0, 0).amplitudes, coherent_state(space32, 1.0).amplitudes, atol=1e-10
        )

    def test_orthogonality(self, space32):
        s0 = displaced_number_state(space32, 0.5, 0)
        s1 = displaced_number_state(space32, 0.5, 1)
        assert abs(s0.inner(s1)) <= 1e-10
        assert abs(np.linalg.norm(s1.amplitudes) - 1) <= 1e-10

    def test_matches_eigen_oracle(self, space32):
        a = annihilation_matrix(space32).elements
        alpha = 0.4 - 0.9j
        ref = expm_antihermitian_oracle(alpha * a.conj().T - np.conj(alpha) * a)[:, 3]
        np.testing.assert_allclose(displaced_number_state(space32, alpha, 3).amplitudes, ref, atol=1e-12)
