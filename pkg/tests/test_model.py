import math

import numpy as np
import pytest
from hypothesis import given

from dst_tomo.errors import DegenerateProjection, DegenerateStrength, InvalidProbabilities, ValidationError
from dst_tomo.model import (
    BasisKind,
    MeasurementStrength,
    ProbabilitySet,
    biorthogonal_states,
    contract_pointer,
    coupling_oracle,
    effective_states,
    effective_states_theta,
    outcome_probabilities,
    pointer_bases,
    probabilities,
    reconstruct,
    reconstruct_matrices,
    s_value,
)
from dst_tomo.qubit import DensityMatrix, PureState, density_from_bloch, hs_distance_sq
from dst_tomo.sampling import RandomStream, sample_bures_batch

from strategies import LAMBDA_GRID, bloch_vectors_in_ball, lambdas

KET0 = PureState(np.array([1.0, 0.0]))
KET1 = PureState(np.array([0.0, 1.0]))


# ---------------------------------------------------------------------------
# Measurement strength
# ---------------------------------------------------------------------------

def test_strength_forms_agree():
    strength = MeasurementStrength.from_lambda(0.5)
    assert strength.theta == pytest.approx(math.pi / 6)
    assert MeasurementStrength.from_theta(math.pi / 4).lam == pytest.approx(0.0, abs=1e-16)


def test_strength_rejects_out_of_range_values():
    with pytest.raises(DegenerateStrength):
        MeasurementStrength.from_lambda(1.0)
    with pytest.raises(ValidationError):
        MeasurementStrength.from_lambda(-0.1)
    with pytest.raises(ValidationError):
        MeasurementStrength.from_lambda(float("nan"))
    with pytest.raises(ValidationError):
        MeasurementStrength(theta=0.1, lam=0.5)


def test_nearly_parallel_strength_is_not_complete():
    strength = MeasurementStrength.from_lambda(1.0 - 1e-13)
    with pytest.raises(DegenerateStrength):
        strength.require_complete()


# ---------------------------------------------------------------------------
# Bases
# ---------------------------------------------------------------------------

def test_effective_state_overlap_equals_lambda():
    states = effective_states(MeasurementStrength.from_lambda(0.5))
    for t in (1, 2):
        assert states[t, 0].inner(states[t, 1]) == pytest.approx(0.5)
    assert states.kind is BasisKind.EFFECTIVE


def test_strong_limit_gives_mutually_unbiased_bases():
    states = effective_states(MeasurementStrength.from_lambda(0.0))
    for t in range(3):
        for u in range(t + 1, 3):
            for k in (0, 1):
                for l in (0, 1):
                    assert abs(states[t, k].inner(states[u, l])) ** 2 == pytest.approx(0.5)


def test_parallel_limit_collapses_onto_ket0():
    states = effective_states(MeasurementStrength.parallel_limit())
    for t in (1, 2):
        for k in (0, 1):
            assert states[t, k].phase_distance(KET0) < 1e-15


@given(lambdas)
def test_theta_form_matches_lambda_form(lam):
    strength = MeasurementStrength.from_lambda(lam)
    lambda_form = effective_states(strength)
    theta_form = effective_states_theta(strength)
    for t in range(3):
        for k in (0, 1):
            assert lambda_form[t, k].phase_distance(theta_form[t, k]) < 1e-12


def test_pointer_bases_are_orthonormal():
    bases = pointer_bases()
    for t in range(3):
        assert abs(bases[t, 0].inner(bases[t, 1])) < 1e-15


def test_biorthogonality():
    strength = MeasurementStrength.from_lambda(0.5)
    psi = effective_states(strength)
    phi = biorthogonal_states(strength)
    for t in (1, 2):
        assert phi[t, 0].inner(psi[t, 0]) == pytest.approx(math.sqrt(0.75))
        assert abs(phi[t, 0].inner(psi[t, 1])) < 1e-15
        assert abs(phi[t, 1].inner(psi[t, 0])) < 1e-15


def test_biorthogonal_states_coincide_at_strong_limit():
    strength = MeasurementStrength.from_lambda(0.0)
    psi = effective_states(strength)
    phi = biorthogonal_states(strength)
    for t in range(3):
        for k in (0, 1):
            assert psi[t, k].phase_distance(phi[t, k]) < 1e-15


@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_biorthogonal_overlap_table(lam):
    phi = biorthogonal_states(MeasurementStrength.from_lambda(lam))
    for t in (1, 2):
        assert abs(phi[t, 0].inner(phi[t, 1])) ** 2 == pytest.approx(lam * lam, abs=1e-14)
        assert abs(phi[0, 0].inner(phi[t, 0])) ** 2 == pytest.approx((1 - lam) / 2, abs=1e-14)
        assert abs(phi[0, 1].inner(phi[t, 0])) ** 2 == pytest.approx((1 + lam) / 2, abs=1e-14)
    for k in (0, 1):
        for l in (0, 1):
            assert abs(phi[1, k].inner(phi[2, l])) ** 2 == pytest.approx((1 + lam * lam) / 2, abs=1e-14)


# ---------------------------------------------------------------------------
# Coupling oracle
# ---------------------------------------------------------------------------

def test_coupling_oracle_reproduces_the_effective_states():
    for theta in np.linspace(0.0, math.pi / 4, 101)[1:]:
        derived = coupling_oracle(theta)
        closed = effective_states(MeasurementStrength.from_theta(theta))
        for t in range(3):
            for k in (0, 1):
                assert derived[t, k].phase_distance(closed[t, k]) < 1e-12, (theta, t, k)


def test_coupling_oracle_at_strongest_coupling():
    plus = PureState.from_unnormalised([1, 1])
    assert coupling_oracle(math.pi / 4)[2, 0].phase_distance(plus) < 1e-12


def test_uncoupled_contraction():
    assert contract_pointer(0.0, 1, 0).phase_distance(KET0) < 1e-15
    with pytest.raises(DegenerateProjection):
        coupling_oracle(0.0)
    with pytest.raises(DegenerateProjection):
        contract_pointer(0.0, 0, 1)


def test_computational_outcome_one_is_ket1_for_any_coupling():
    for theta in (1e-3, 0.3, math.pi / 4):
        assert contract_pointer(theta, 0, 1).phase_distance(KET1) < 1e-12


# ---------------------------------------------------------------------------
# Probabilities
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_maximally_mixed_probabilities(lam):
    probs = probabilities(DensityMatrix.maximally_mixed(), MeasurementStrength.from_lambda(lam))
    assert np.allclose(probs.p, 0.5)
    assert probs.s == pytest.approx(1.0)


def test_ground_and_excited_state_probabilities(ground_state, excited_state, half_strength):
    probs = probabilities(ground_state, half_strength)
    assert probs.p00 == 1.0
    assert probs.get(0, 1) == pytest.approx(0.75)
    assert probs.get(1, 1) == pytest.approx(0.75)
    assert probs.s == pytest.approx(1.5)
    assert probabilities(excited_state, half_strength).s == pytest.approx(0.5)


def test_s_value_is_elementwise():
    strength = MeasurementStrength.from_lambda(0.5)
    assert s_value(np.array([0.0, 0.5, 1.0]), strength) == pytest.approx([0.5, 1.0, 1.5])


@given(bloch_vectors_in_ball, lambdas)
def test_probability_constraint_holds(vector, lam):
    strength = MeasurementStrength.from_lambda(lam)
    probs = probabilities(density_from_bloch(vector), strength)
    for t in (1, 2):
        assert probs.p[t].sum() == pytest.approx(1 - lam + 2 * lam * probs.p00, abs=1e-12)
    assert np.all(probs.p >= 0.0)


def test_probability_set_validation():
    with pytest.raises(InvalidProbabilities):
        ProbabilitySet.from_table([[0.5, 0.5], [0.5, 0.5], [0.2, 0.2]], 0.0)
    with pytest.raises(InvalidProbabilities):
        ProbabilitySet.from_table([[0.6, 0.6], [0.5, 0.5], [0.5, 0.5]], 0.0)
    with pytest.raises(InvalidProbabilities):
        ProbabilitySet.from_table([[1.0, 0.0]], 0.0)


def test_estimated_probability_set_drops_only_the_upper_bound():
    table = [[1.0, 0.0], [1.5, 0.0], [0.75, 0.75]]
    with pytest.raises(InvalidProbabilities):
        ProbabilitySet.from_table(table, 0.5)
    probs = ProbabilitySet.from_table(table, 0.5, estimate=True)
    assert probs.p[1, 0] == 1.5
    with pytest.raises(InvalidProbabilities):
        ProbabilitySet.from_table([[1.0, 0.0], [1.5, 0.5], [0.75, 0.75]], 0.5, estimate=True)
    with pytest.raises(InvalidProbabilities):
        ProbabilitySet.from_table([[1.0, 0.0], [1.6, -0.1], [0.75, 0.75]], 0.5, estimate=True)


def test_probability_set_accessors():
    probs = ProbabilitySet.from_table([[0.3, 0.7], [0.6, 0.4], [0.45, 0.55]], 0.0)
    assert probs.get(0, 2) == 0.45
    assert probs.p10 == 0.7
    assert probs.minimum() == 0.3
    assert probs.as_dict()["s"] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------

def test_reconstruct_examples(half_strength, ground_state):
    uniform = ProbabilitySet.from_table(np.full((3, 2), 0.5), 0.0)
    assert np.allclose(reconstruct(uniform, MeasurementStrength.from_lambda(0.0)).matrix, np.eye(2) / 2)

    table = [[1.0, 0.0], [0.75, 0.75], [0.75, 0.75]]
    rho = reconstruct(ProbabilitySet.from_table(table, 0.5), half_strength)
    assert np.max(np.abs(rho.matrix - ground_state.matrix)) < 1e-12


def test_reconstruct_at_strong_limit_is_the_mub_formula():
    strength = MeasurementStrength.from_lambda(0.0)
    table = np.array([[0.3, 0.7], [0.6, 0.4], [0.45, 0.55]])
    projectors = effective_states(strength).projectors()
    expected = np.einsum("tk,tkij->ij", table, projectors) - np.eye(2)
    rho = reconstruct(ProbabilitySet.from_table(table, 0.0), strength)
    assert np.max(np.abs(rho.matrix - expected)) < 1e-14
    assert not rho.physical


def test_reconstruct_rejects_mismatched_strength(half_strength):
    probs = probabilities(DensityMatrix.maximally_mixed(), MeasurementStrength.from_lambda(0.0))
    with pytest.raises(InvalidProbabilities):
        reconstruct(probs, half_strength)


def test_reconstruct_refuses_the_parallel_limit():
    strength = MeasurementStrength.from_lambda(1.0 - 1e-13)
    with pytest.raises(DegenerateStrength):
        reconstruct_matrices(np.full((3, 2), 0.5), strength)


@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_reconstruction_round_trip(lam):
    strength = MeasurementStrength.from_lambda(lam)
    states = sample_bures_batch(RandomStream(seed=20, counter=int(lam * 100)), 1000)
    recovered = reconstruct_matrices(outcome_probabilities(states, strength), strength)
    distances = np.sum(np.abs(recovered - states) ** 2, axis=(-2, -1))
    assert np.max(distances) < 1e-20


@given(bloch_vectors_in_ball, lambdas)
def test_reconstruct_inverts_probabilities(vector, lam):
    strength = MeasurementStrength.from_lambda(lam)
    rho = density_from_bloch(vector)
    assert hs_distance_sq(reconstruct(probabilities(rho, strength), strength), rho) < 1e-20
