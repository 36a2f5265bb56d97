import math

import numpy as np
import pytest

from entropic_qc.ensembles import haar_unitary, random_pure, task_rng
from entropic_qc.exceptions import (
    BadSubsystemIndexError,
    DimMismatchError,
    NotNormalizedError,
    NotPositiveError,
    NotSquareError,
    TraceZeroError,
)
from entropic_qc.linalg import (
    bipartition,
    eig_hermitian,
    hs_norm_sq,
    is_unitary,
    local_unitary,
    majorizes,
    make_density,
    maximally_mixed,
    partial_trace,
    permute_subsystems,
    pure_density,
    schmidt,
    spectrum,
    tensor,
)
from entropic_qc.measurement import ProjectiveBasis, dephase
from tests.utils import bell_state, ket_state, plus_state, random_state


class TestMakeDensity:

    def test_identity(self):
        rho = make_density(np.eye(2) / 2)
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2)
        assert rho.dims == (2,)

    def test_renormalizes_at_tolerance_boundary(self):
        rho = make_density(np.diag([0.7, 0.3 + 1e-12]), [2])
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-15)

    def test_unnormalized_input(self):
        rho = make_density(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(np.diag(rho.matrix).real, [0.75, 0.25])

    def test_negative_eigenvalue(self):
        with pytest.raises(NotPositiveError):
            make_density(np.diag([1.2, -0.2]), [2])

    def test_small_negative_eigenvalue_is_clipped(self):
        rho = make_density(np.diag([1.0, -1e-12]))
        assert np.all(np.linalg.eigvalsh(rho.matrix) >= 0)

    def test_zero_trace(self):
        with pytest.raises(TraceZeroError):
            make_density(np.zeros((2, 2)))

    def test_negative_trace(self):
        with pytest.raises(NotPositiveError):
            make_density(-np.eye(2))

    @pytest.mark.parametrize('matrix', (np.zeros((2, 3)), np.zeros(4), np.zeros((0, 0))))
    def test_not_square(self, matrix):
        with pytest.raises(NotSquareError):
            make_density(matrix)

    def test_dims_mismatch(self):
        with pytest.raises(DimMismatchError):
            make_density(np.eye(4), [2, 3])

    def test_hermitizes(self):
        matrix = np.array([[0.5, 0.1 + 1e-9j], [0.1, 0.5]])
        rho = make_density(matrix)
        np.testing.assert_allclose(rho.matrix, rho.dagger)

    def test_pure_density_needs_unit_vector(self):
        with pytest.raises(NotNormalizedError):
            pure_density([1.0, 1.0])


class TestTensorAndPartialTrace:

    def test_mixed_product(self):
        rho = tensor(maximally_mixed([2]), maximally_mixed([2]))
        assert rho.dims == (2, 2)
        np.testing.assert_allclose(rho.matrix, np.eye(4) / 4)

    def test_pure_product(self):
        rho = tensor(ket_state(0), ket_state(1))
        np.testing.assert_allclose(rho.matrix, ket_state(0, 1).matrix)

    @pytest.mark.parametrize('keep', ([0], [1]))
    def test_bell_marginals(self, keep):
        np.testing.assert_allclose(partial_trace(bell_state(), keep).matrix, np.eye(2) / 2, atol=1e-15)

    def test_recovers_factors(self):
        a = random_state(1, (2,))
        b = random_state(2, (3,))
        product = tensor(a, b)
        np.testing.assert_allclose(partial_trace(product, [0]).matrix, a.matrix, atol=1e-14)
        np.testing.assert_allclose(partial_trace(product, [1]).matrix, b.matrix, atol=1e-14)

    def test_keep_order_is_normalized(self):
        rho = random_state(3, (2, 3, 2))
        np.testing.assert_allclose(partial_trace(rho, [2, 0]).matrix, partial_trace(rho, [0, 2]).matrix)
        assert partial_trace(rho, [1]).dims == (3,)

    def test_trace_is_preserved(self):
        rho = random_state(4, (2, 2, 2))
        assert np.trace(partial_trace(rho, [1, 2]).matrix).real == pytest.approx(1.0)

    @pytest.mark.parametrize('keep', ([], [2], [0, 0], [-1]))
    def test_bad_indices(self, keep):
        with pytest.raises(BadSubsystemIndexError):
            partial_trace(bell_state(), keep)


class TestRegrouping:

    def test_permutation_swaps_factors(self):
        a = random_state(5, (2,))
        b = random_state(6, (3,))
        swapped = permute_subsystems(tensor(a, b), [1, 0])
        assert swapped.dims == (3, 2)
        np.testing.assert_allclose(swapped.matrix, tensor(b, a).matrix, atol=1e-15)

    def test_bipartition_dims(self):
        rho = random_state(7, (2, 3, 2))
        assert bipartition(rho, [0]).dims == (2, 6)
        assert bipartition(rho, [1]).dims == (3, 4)

    def test_bipartition_keeps_marginal(self):
        rho = random_state(8, (2, 3, 2))
        regrouped = bipartition(rho, [1])
        np.testing.assert_allclose(partial_trace(regrouped, [0]).matrix, partial_trace(rho, [1]).matrix, atol=1e-14)

    def test_bipartition_needs_two_blocks(self):
        with pytest.raises(BadSubsystemIndexError):
            bipartition(bell_state(), [0, 1])

    def test_local_unitary_keeps_spectrum(self):
        rng = task_rng(9)
        rho = random_state(9)
        rotated = local_unitary(rho, haar_unitary(2, rng), haar_unitary(2, rng))
        np.testing.assert_allclose(spectrum(rotated.matrix), spectrum(rho.matrix), atol=1e-14)

    def test_local_unitary_count(self):
        with pytest.raises(DimMismatchError):
            local_unitary(bell_state(), np.eye(4))


class TestSpectrum:

    def test_maximally_mixed(self):
        np.testing.assert_allclose(spectrum(np.eye(3) / 3), [1 / 3] * 3)

    def test_pure(self):
        np.testing.assert_array_equal(spectrum(bell_state().matrix), [1.0, 0.0, 0.0, 0.0])

    def test_unitary_invariance(self, rng):
        u = haar_unitary(3, rng)
        matrix = u @ np.diag([0.5, 0.3, 0.2]) @ u.conj().T
        np.testing.assert_allclose(spectrum(matrix), [0.5, 0.3, 0.2], atol=1e-14)

    def test_stack(self):
        stack = np.array([np.diag([0.2, 0.8]), np.diag([1.0, 0.0])])
        np.testing.assert_allclose(spectrum(stack), [[0.8, 0.2], [1.0, 0.0]])

    def test_eig_hermitian_decreasing(self):
        rho = random_state(10, (3,))
        values, vectors = eig_hermitian(rho)
        assert np.all(np.diff(values) <= 0)
        np.testing.assert_allclose((vectors * values) @ vectors.conj().T, rho.matrix, atol=1e-14)

    def test_hs_norm(self):
        assert hs_norm_sq(np.zeros((2, 2))) == 0.0
        assert hs_norm_sq(np.eye(3)) == pytest.approx(3.0)
        rho = plus_state()
        assert hs_norm_sq(rho.matrix - dephase(rho, ProjectiveBasis.computational(2)).matrix) == pytest.approx(0.5)

    def test_is_unitary(self, rng):
        assert is_unitary(haar_unitary(4, rng))
        assert not is_unitary(2 * np.eye(2))
        assert not is_unitary(np.ones((2, 3)))


class TestSchmidt:

    def test_product(self):
        decomposition = schmidt([1, 0, 0, 0], (2, 2))
        np.testing.assert_allclose(decomposition.coefficients, [1.0])
        assert decomposition.schmidt_number == 1

    def test_bell(self):
        decomposition = schmidt(np.array([1, 0, 0, 1]) / math.sqrt(2), (2, 2))
        np.testing.assert_allclose(decomposition.coefficients, [0.5, 0.5])

    def test_coefficients_are_reduced_spectrum(self, rng):
        psi = random_pure((2, 3), rng)
        decomposition = schmidt(psi, (2, 3))
        reduced = partial_trace(pure_density(psi, (2, 3)), [0])
        np.testing.assert_allclose(decomposition.coefficients, eig_hermitian(reduced)[0], atol=1e-12)

    def test_reconstruct(self, rng):
        psi = random_pure((3, 2), rng)
        decomposition = schmidt(psi, (3, 2))
        np.testing.assert_allclose(decomposition.reconstruct(), psi, atol=1e-12)
        assert is_unitary(decomposition.basis_a)
        assert is_unitary(decomposition.basis_b)

    def test_rejects(self):
        with pytest.raises(NotNormalizedError):
            schmidt([1, 1, 0, 0], (2, 2))
        with pytest.raises(DimMismatchError):
            schmidt([1, 0, 0, 0], (2, 3))


class TestMajorization:

    @pytest.mark.parametrize(['p', 'q_vec', 'expected'], (
        ((0.5, 0.5), (1.0, 0.0), True),
        ((1.0, 0.0), (0.5, 0.5), False),
        ((0.5, 0.3, 0.2), (0.6, 0.3, 0.1), True),
        ((0.2, 0.3, 0.5), (0.1, 0.6, 0.3), True),
        ((0.5, 0.5), (0.5, 0.5), True),
        ((0.5, 0.5), (0.6, 0.6), False),
    ))
    def test_examples(self, p, q_vec, expected):
        assert majorizes(p, q_vec) is expected

    def test_padding(self):
        assert majorizes((0.25,) * 4, (0.5, 0.5))

    def test_dephasing_majorization(self, rng):
        rho = random_state(11, (3,))
        after = dephase(rho, ProjectiveBasis(haar_unitary(3, rng)))
        assert majorizes(spectrum(after.matrix), spectrum(rho.matrix))
