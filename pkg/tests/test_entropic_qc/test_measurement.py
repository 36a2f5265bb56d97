import math

import numpy as np
import pytest

from entropic_qc.ensembles import haar_unitary, random_cq, random_density, task_rng
from entropic_qc.entropy import EntropicIndices, relative_entropy
from entropic_qc.exceptions import DimMismatchError
from entropic_qc.linalg import bipartition, eig_hermitian, hs_norm_sq, partial_trace, spectrum, tensor
from entropic_qc.measurement import (
    LocalMeasurement,
    ProjectiveBasis,
    Side,
    apply_local,
    conditional_decomposition,
    dephase,
    disturbance,
    lift_measurement,
    measured_spectra,
    purity_ratio,
)
from tests.utils import INDEX_GRID, bell_state, ket_state, plus_state, random_product, random_state

COMPUTATIONAL = ProjectiveBasis.computational(2)


def _random_measurement(side: Side, seed: int, dims: tuple[int, int] = (2, 2)) -> LocalMeasurement:
    rng = task_rng(seed)
    return LocalMeasurement.build(side, haar_unitary(dims[0], rng), haar_unitary(dims[1], rng))


class TestBases:

    def test_rejects_non_unitary(self):
        with pytest.raises(DimMismatchError):
            ProjectiveBasis(np.ones((2, 2)))

    def test_projectors(self, rng):
        basis = ProjectiveBasis(haar_unitary(3, rng))
        projectors = basis.projectors
        np.testing.assert_allclose(projectors.sum(axis=0), np.eye(3), atol=1e-14)
        np.testing.assert_allclose(projectors[0] @ projectors[1], np.zeros((3, 3)), atol=1e-14)

    def test_measurement_needs_bases(self):
        with pytest.raises(ValueError):
            LocalMeasurement(Side.AB, basis_a=COMPUTATIONAL)

    def test_restricted(self):
        m = LocalMeasurement(Side.AB, COMPUTATIONAL, COMPUTATIONAL)
        assert m.restricted(Side.A).basis_b is None
        assert m.restricted(Side.B).basis_a is None

    def test_dims_are_checked(self):
        m = LocalMeasurement(Side.A, basis_a=ProjectiveBasis.computational(3))
        with pytest.raises(DimMismatchError):
            apply_local(bell_state(), m)


class TestDephase:

    def test_eigenbasis_leaves_state(self):
        rho = random_state(20, (3,))
        np.testing.assert_allclose(dephase(rho, ProjectiveBasis.eigenbasis(rho)).matrix, rho.matrix, atol=1e-14)

    def test_plus(self):
        np.testing.assert_allclose(dephase(plus_state(), COMPUTATIONAL).matrix, np.eye(2) / 2, atol=1e-15)

    def test_dimension(self):
        with pytest.raises(DimMismatchError):
            dephase(plus_state(), ProjectiveBasis.computational(3))


class TestApplyLocal:

    def test_cq_state_is_undisturbed(self, rng):
        rho = random_cq((2, 2), rng)
        basis = ProjectiveBasis.eigenbasis(partial_trace(rho, [0]))
        np.testing.assert_allclose(apply_local(rho, LocalMeasurement(Side.A, basis_a=basis)).matrix, rho.matrix,
                                   atol=1e-12)

    def test_bell_bilocal(self):
        measured = apply_local(bell_state(), LocalMeasurement(Side.AB, COMPUTATIONAL, COMPUTATIONAL))
        np.testing.assert_allclose(measured.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    @pytest.mark.parametrize('side', tuple(Side))
    @pytest.mark.parametrize('dims', ((2, 2), (2, 3), (3, 2)))
    def test_idempotent(self, side, dims):
        m = _random_measurement(side, 20, dims)
        once = apply_local(random_state(20, dims), m)
        np.testing.assert_allclose(apply_local(once, m).matrix, once.matrix, atol=1e-14)

    @pytest.mark.parametrize('side', tuple(Side))
    def test_matches_projector_sum(self, side):
        rho = random_state(21, (2, 3))
        m = _random_measurement(side, 21, (2, 3))
        identity_a, identity_b = np.eye(2), np.eye(3)
        projectors_a = m.basis_a.projectors if side.measures_a else [identity_a]
        projectors_b = m.basis_b.projectors if side.measures_b else [identity_b]
        expected = sum(
            np.kron(pa, pb) @ rho.matrix @ np.kron(pa, pb) for pa in projectors_a for pb in projectors_b
        )
        np.testing.assert_allclose(apply_local(rho, m).matrix, expected, atol=1e-14)

    @pytest.mark.parametrize('side', tuple(Side))
    def test_spectra_shortcut(self, side):
        rho = random_state(22, (3, 2))
        m = _random_measurement(side, 22, (3, 2))
        np.testing.assert_allclose(
            measured_spectra(rho, side, m.unitary_a, m.unitary_b),
            spectrum(apply_local(rho, m).matrix),
            atol=1e-13,
        )

    def test_batched_spectra(self):
        rho = random_state(23)
        rng = task_rng(23)
        ua = np.array([haar_unitary(2, rng) for _ in range(4)])
        ub = np.array([haar_unitary(2, rng) for _ in range(3)])
        stacked = measured_spectra(rho, Side.AB, ua[:, None], ub[None, :])
        assert stacked.shape == (4, 3, 4)
        single = measured_spectra(rho, Side.AB, ua[2], ub[1])
        np.testing.assert_allclose(stacked[2, 1], single, atol=1e-14)

    def test_bilocal_is_sequential(self):
        rho = random_state(24)
        m = _random_measurement(Side.AB, 24)
        sequential = apply_local(apply_local(rho, m.restricted(Side.A)), m.restricted(Side.B))
        np.testing.assert_allclose(apply_local(rho, m).matrix, sequential.matrix, atol=1e-14)


class TestConditionalDecomposition:

    def test_product_state(self):
        rho = random_product(25)
        rho_a = partial_trace(rho, [0])
        rho_b = partial_trace(rho, [1])
        decomposition = conditional_decomposition(rho, LocalMeasurement(Side.A, ProjectiveBasis.eigenbasis(rho_a)))
        np.testing.assert_allclose(decomposition.probabilities, eig_hermitian(rho_a)[0], atol=1e-12)
        for conditional in decomposition.conditionals:
            np.testing.assert_allclose(conditional, rho_b.matrix, atol=1e-12)

    def test_bell(self):
        decomposition = conditional_decomposition(bell_state(), LocalMeasurement(Side.A, COMPUTATIONAL))
        np.testing.assert_allclose(decomposition.probabilities, [0.5, 0.5])
        np.testing.assert_allclose(decomposition.conditionals[0], np.diag([1, 0]), atol=1e-15)
        np.testing.assert_allclose(decomposition.conditionals[1], np.diag([0, 1]), atol=1e-15)

    def test_zero_weight_outcome(self):
        rho = tensor(random_state(26, (2,)), ket_state(0))
        decomposition = conditional_decomposition(rho, LocalMeasurement(Side.B, basis_b=COMPUTATIONAL))
        assert decomposition.conditionals[1] is None
        assert decomposition.probabilities[1] == pytest.approx(0.0, abs=1e-15)
        np.testing.assert_allclose(decomposition.conditionals[0], random_state(26, (2,)).matrix, atol=1e-14)

    def test_bilocal(self):
        decomposition = conditional_decomposition(bell_state(), LocalMeasurement(Side.AB, COMPUTATIONAL, COMPUTATIONAL))
        np.testing.assert_allclose(decomposition.probabilities, [[0.5, 0.0], [0.0, 0.5]], atol=1e-15)
        assert decomposition.conditionals == ()


class TestPurityRatio:

    def test_renyi_is_one(self):
        m = _random_measurement(Side.AB, 29)
        assert purity_ratio(random_state(29), m, EntropicIndices.renyi(2.0)) == 1.0

    def test_undisturbed_is_one(self):
        rho = random_state(30, (3,))
        assert purity_ratio(rho, ProjectiveBasis.eigenbasis(rho), EntropicIndices(2.0, 1.0)) == pytest.approx(1.0)

    def test_bell(self):
        m = LocalMeasurement(Side.AB, COMPUTATIONAL, COMPUTATIONAL)
        assert purity_ratio(bell_state(), m, EntropicIndices(2.0, 1.0)) == pytest.approx(0.5)

    @pytest.mark.parametrize('seed', range(5))
    def test_at_most_one_for_q_above_one(self, seed):
        m = _random_measurement(Side.AB, seed)
        assert purity_ratio(random_state(seed), m, EntropicIndices(3.0, 0.5)) <= 1.0 + 1e-12

    @pytest.mark.parametrize(['q', 'above_one'], ((0.3, True), (0.7, True), (1.5, False), (4.0, False)))
    def test_band(self, q, above_one):
        ratios = []
        for k in range(1000):
            side = tuple(Side)[k % 3]
            s = (0.25, 1.0, 2.0)[k % 3]
            ratios.append(purity_ratio(random_state(k), _random_measurement(side, k), EntropicIndices(q, s)))
        if above_one:
            assert min(ratios) >= 1.0 - 1e-10
        else:
            assert max(ratios) <= 1.0 + 1e-10


class TestDisturbance:

    @pytest.mark.parametrize('idx', INDEX_GRID)
    def test_undisturbed(self, idx):
        rho = random_state(31, (3,))
        assert disturbance(rho, ProjectiveBasis.eigenbasis(rho), idx).disturbance == pytest.approx(0.0, abs=1e-12)

    def test_plus_hilbert_schmidt(self):
        rho = plus_state()
        report = disturbance(rho, COMPUTATIONAL, EntropicIndices(2.0, 1.0))
        assert report.disturbance == pytest.approx(0.5)
        distance = hs_norm_sq(rho.matrix - dephase(rho, COMPUTATIONAL).matrix)
        assert report.disturbance == pytest.approx(distance / np.trace(rho.matrix @ rho.matrix).real)

    def test_plus_relative_entropy(self):
        rho = plus_state()
        report = disturbance(rho, COMPUTATIONAL, EntropicIndices.von_neumann())
        assert report.disturbance == pytest.approx(math.log(2))
        assert report.disturbance == pytest.approx(relative_entropy(rho, dephase(rho, COMPUTATIONAL)))

    @pytest.mark.parametrize('seed', range(5))
    def test_hilbert_schmidt_identity(self, seed):
        rho = random_state(seed, (3,))
        basis = ProjectiveBasis(haar_unitary(3, task_rng(seed, 1)))
        distance = hs_norm_sq(rho.matrix - dephase(rho, basis).matrix)
        report = disturbance(rho, basis, EntropicIndices(2.0, 1.0))
        assert report.disturbance == pytest.approx(distance / report.rescale, rel=1e-10)

    @pytest.mark.parametrize('idx', INDEX_GRID)
    def test_report_fields(self, idx):
        rho = random_state(32)
        report = disturbance(rho, _random_measurement(Side.AB, 32), idx)
        assert report.disturbance >= -1e-12
        assert report.disturbance == pytest.approx(report.entropy_gain / report.rescale, rel=1e-9, abs=1e-14)


class TestLift:

    @pytest.mark.parametrize('onto', (Side.A, Side.B))
    def test_lifted_measurement_keeps_disturbance(self, onto):
        rho = random_state(33)
        ancilla = random_density(2, task_rng(33, 1))
        m = _random_measurement(Side.AB, 33)
        block = (0,) if onto is Side.B else (0, 2)
        extended = bipartition(tensor(rho, ancilla), block)
        lifted = lift_measurement(m, ancilla, onto)
        idx = EntropicIndices.renyi(2.0)
        assert disturbance(extended, lifted, idx).disturbance == pytest.approx(
            disturbance(rho, m, idx).disturbance, rel=1e-10,
        )
