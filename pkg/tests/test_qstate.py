"""Tests for the two-qubit state layer."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st


def _random_unitary(seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestValueTypes:
    def test_singlet_amplitudes(self, singlet):
        r = 1 / np.sqrt(2)
        np.testing.assert_allclose(singlet.amplitudes, [0, r, -r, 0], atol=1e-15)

    def test_bell_states_orthonormal(self):
        from superdense_pingpong.qstate import BELL_LABELS, bell_state
        gram = np.array([[bell_state(a).inner(bell_state(b)) for b in BELL_LABELS] for a in BELL_LABELS])
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)

    def test_unnormalised_vector_rejected(self):
        from superdense_pingpong.errors import InvalidState
        from superdense_pingpong.qstate import StateVector
        with pytest.raises(InvalidState):
            StateVector(np.array([1, 1, 0, 0], dtype=complex))

    def test_wrong_dimension_rejected(self):
        from superdense_pingpong.errors import InvalidState
        from superdense_pingpong.qstate import StateVector
        with pytest.raises(InvalidState):
            StateVector(np.array([1, 0, 0], dtype=complex))

    @pytest.mark.parametrize("entries", [
        np.array([[0.5, 0.5j], [0.5j, 0.5]]),        # not Hermitian
        np.diag([0.6, 0.6]).astype(complex),           # trace 1.2
        np.diag([1.5, -0.5]).astype(complex),          # negative eigenvalue
    ])
    def test_invalid_density_matrices_rejected(self, entries):
        from superdense_pingpong.errors import InvalidState
        from superdense_pingpong.qstate import DensityMatrix
        with pytest.raises(InvalidState):
            DensityMatrix(entries)

    def test_states_are_read_only(self, singlet):
        with pytest.raises(ValueError):
            singlet.amplitudes[0] = 1.0

    def test_equals_up_to_phase(self, singlet):
        from superdense_pingpong.qstate import StateVector
        rotated = StateVector(1j * singlet.amplitudes)
        assert singlet.equals_up_to_phase(rotated)
        assert rotated.canonical().equals_up_to_phase(singlet)

    def test_basis_parse(self):
        from superdense_pingpong.qstate import Basis
        assert Basis.parse('b_x') is Basis.X
        assert Basis.parse('z') is Basis.Z
        with pytest.raises(ValueError):
            Basis.parse('Y')

    def test_ensemble_probabilities_must_sum_to_one(self):
        from superdense_pingpong.errors import InvalidDistribution
        from superdense_pingpong.qstate import DensityMatrix, Ensemble
        mixed = DensityMatrix.maximally_mixed()
        with pytest.raises(InvalidDistribution):
            Ensemble(((0.5, mixed), (0.4, mixed)))


class TestMeasurement:
    def test_singlet_travel_branches_are_even(self, singlet):
        from superdense_pingpong.qstate import TRAVEL, Basis, branch_probabilities
        for basis in Basis:
            np.testing.assert_allclose(branch_probabilities(singlet, TRAVEL, basis), [0.5, 0.5])

    def test_outcome_threshold_and_collapse(self, singlet):
        """Outcome 0 iff rand < p(0); the home qubit then anticorrelates."""
        from superdense_pingpong.qstate import HOME, TRAVEL, Basis, measure_qubit
        outcome, post = measure_qubit(singlet, TRAVEL, Basis.Z, 0.2)
        assert outcome == 0
        np.testing.assert_allclose(np.abs(post.amplitudes), [0, 0, 1, 0], atol=1e-12)
        home, _ = measure_qubit(post, HOME, Basis.Z, 0.999)
        assert home == 1
        assert measure_qubit(singlet, TRAVEL, Basis.Z, 0.7)[0] == 1

    def test_forced_impossible_branch(self, singlet):
        from superdense_pingpong.errors import DegenerateState
        from superdense_pingpong.qstate import HOME, TRAVEL, Basis, measure_qubit
        _, post = measure_qubit(singlet, TRAVEL, Basis.Z, outcome=0)
        with pytest.raises(DegenerateState):
            measure_qubit(post, HOME, Basis.Z, outcome=0)

    def test_measure_requires_rand_or_outcome(self, singlet):
        from superdense_pingpong.qstate import TRAVEL, Basis, measure_qubit
        with pytest.raises(ValueError):
            measure_qubit(singlet, TRAVEL, Basis.X)

    def test_bell_measure_of_bell_state_is_certain(self):
        from superdense_pingpong.qstate import BELL_LABELS, bell_measure, bell_state
        for label in BELL_LABELS:
            for rand in (0.0, 0.5, 0.999999):
                assert bell_measure(bell_state(label), rand)[0] == label

    def test_bell_measure_of_maximally_mixed_state(self, rng):
        from superdense_pingpong.qstate import BELL_LABELS, DensityMatrix, bell_measure, bell_probabilities
        mixed = DensityMatrix.maximally_mixed()
        np.testing.assert_allclose(bell_probabilities(mixed), [0.25] * 4, atol=1e-12)
        for rand, label in zip([0.1, 0.35, 0.6, 0.85], BELL_LABELS):
            assert bell_measure(mixed, rand)[0] == label

        n = 20_000
        labels = [bell_measure(mixed, r)[0] for r in rng.random(n)]
        sigma = np.sqrt(0.25 * 0.75 / n)
        for label in BELL_LABELS:
            assert abs(labels.count(label) / n - 0.25) <= 4 * sigma

    def test_vector_and_density_paths_agree(self, singlet):
        from superdense_pingpong.qstate import TRAVEL, Basis, as_density, measure_qubit
        _, vec_post = measure_qubit(singlet, TRAVEL, Basis.X, 0.3)
        _, rho_post = measure_qubit(as_density(singlet), TRAVEL, Basis.X, 0.3)
        assert as_density(vec_post).allclose(rho_post, atol=1e-12)


class TestInformationQuantities:
    def test_entropies(self, singlet):
        from superdense_pingpong.qstate import HOME, DensityMatrix, partial_trace, von_neumann_entropy
        assert von_neumann_entropy(singlet) == 0.0
        assert von_neumann_entropy(DensityMatrix.maximally_mixed()) == pytest.approx(2.0, abs=1e-12)
        assert von_neumann_entropy(partial_trace(singlet, HOME)) == pytest.approx(1.0, abs=1e-12)

    def test_gamma_of(self, singlet):
        from superdense_pingpong.qstate import DensityMatrix, bell_state, gamma_of
        assert gamma_of(singlet) == pytest.approx(0.0, abs=1e-12)
        assert gamma_of(DensityMatrix.maximally_mixed()) == pytest.approx(0.75, abs=1e-12)
        assert gamma_of(bell_state('phi_plus')) == pytest.approx(1.0, abs=1e-12)

    def test_holevo_of_bell_basis_is_two_bits(self):
        from superdense_pingpong.qstate import BELL_LABELS, Ensemble, as_density, bell_state, holevo
        ensemble = Ensemble.uniform([as_density(bell_state(label)) for label in BELL_LABELS])
        assert holevo(ensemble) == pytest.approx(2.0, abs=1e-12)

    def test_bell_diagonal_weights(self):
        from superdense_pingpong.errors import InvalidDistribution
        from superdense_pingpong.qstate import bell_diagonal, bell_probabilities
        rho = bell_diagonal([0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(bell_probabilities(rho), [0.1, 0.2, 0.3, 0.4], atol=1e-12)
        with pytest.raises(InvalidDistribution):
            bell_diagonal([0.5, 0.5, 0.5, -0.5])


class TestProperties:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_entropy_within_bounds(self, seed):
        from superdense_pingpong.qstate import random_density_matrix, von_neumann_entropy
        rho = random_density_matrix(np.random.default_rng(seed))
        assert 0.0 <= von_neumann_entropy(rho) <= 2.0

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=6))
    def test_holevo_nonnegative(self, seed, members):
        from superdense_pingpong.qstate import Ensemble, holevo, random_density_matrix
        rng = np.random.default_rng(seed)
        probs = rng.dirichlet(np.ones(members))
        probs[-1] = 1.0 - probs[:-1].sum()
        ensemble = Ensemble(tuple((p, random_density_matrix(rng)) for p in probs))
        chi = holevo(ensemble)
        assert chi >= -1e-12
        assert chi <= 2.0 + 1e-9

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from(['home', 'travel']),
           st.sampled_from(['Z', 'X']))
    def test_branch_probabilities_normalised(self, seed, which, basis):
        from superdense_pingpong.qstate import Basis, branch_probabilities, random_density_matrix
        rho = random_density_matrix(np.random.default_rng(seed))
        probs = branch_probabilities(rho, which, Basis.parse(basis))
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(probs >= 0)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_travel_unitary_preserves_state_invariants(self, seed):
        """Local unitaries keep trace, spectrum and the home marginal."""
        from superdense_pingpong.qstate import (
            HOME, DensityMatrix, apply_on_travel, partial_trace, random_density_matrix,
        )
        rho = random_density_matrix(np.random.default_rng(seed))
        out = apply_on_travel(_random_unitary(seed), rho)
        DensityMatrix(out.entries)  # validates Hermitian, trace 1, PSD
        np.testing.assert_allclose(np.sort(out.eigenvalues()), np.sort(rho.eigenvalues()), atol=1e-10)
        assert partial_trace(out, HOME).allclose(partial_trace(rho, HOME), atol=1e-10)

    def test_non_unitary_rejected(self, singlet):
        from superdense_pingpong.errors import NonUnitary
        from superdense_pingpong.qstate import apply_on_travel
        with pytest.raises(NonUnitary):
            apply_on_travel(np.array([[1, 0], [0, 0.5]]), singlet)
