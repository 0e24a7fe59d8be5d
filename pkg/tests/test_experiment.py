import math

import numpy as np
import pytest

from dst_tomo.crb import crb_closed, fisher_matrix
from dst_tomo.errors import InvalidProbabilities, SingularFisher, ValidationError
from dst_tomo.experiment import (
    CountRecord,
    EmpiricalResult,
    empirical_fisher,
    empirical_mse,
    estimate_state,
    estimate_tables,
    exact_counts,
    score_covariance,
    simulate_count_table,
    simulate_counts,
    success_probabilities,
)
from dst_tomo.model import MeasurementStrength, probabilities
from dst_tomo.qubit import DensityMatrix, density_from_bloch
from dst_tomo.sampling import RandomStream

INTERIOR_STATE = [0.3, -0.2, 0.4]


def strength(lam):
    return MeasurementStrength.from_lambda(lam)


# ---------------------------------------------------------------------------
# Count records
# ---------------------------------------------------------------------------

def test_count_record_validation():
    record = CountRecord(np.array([[3, 1], [2, 2], [4, 0]]), 4)
    assert record.get(0, 2) == 4
    with pytest.raises(ValidationError):
        CountRecord(np.array([[3, 1], [2, 1], [4, 0]]), 4)
    with pytest.raises(ValidationError):
        CountRecord(np.array([[3, 1], [2, 2]]), 4)
    with pytest.raises(ValidationError):
        CountRecord(np.array([[5, -1], [2, 2], [4, 0]]), 4)
    with pytest.raises(ValidationError):
        CountRecord(np.zeros((3, 2), dtype=int), 0)


def test_empirical_result_scaling():
    result = EmpiricalResult(mean_e2=1e-4, stderr=1e-6, runs=10, shots=1000)
    assert result.scaled == pytest.approx(0.1)
    assert result.scaled_stderr == pytest.approx(1e-3)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def test_ground_state_always_gives_outcome_zero_in_the_computational_basis(ground_state, half_strength):
    for seed in range(5):
        counts = simulate_counts(ground_state, half_strength, 100, RandomStream(seed))
        assert counts.get(0, 0) == 100


def test_simulation_is_reproducible(maximally_mixed, half_strength):
    a = simulate_counts(maximally_mixed, half_strength, 1000, RandomStream(3))
    b = simulate_counts(maximally_mixed, half_strength, 1000, RandomStream(3))
    assert np.array_equal(a.n, b.n)


@pytest.mark.parametrize("lam", [0.0, 0.5, 0.9])
def test_maximally_mixed_counts_are_balanced(maximally_mixed, lam):
    shots, runs = 100, 10000
    zeros = simulate_count_table(probabilities(maximally_mixed, strength(lam)), shots, runs, RandomStream(8))
    stderr = math.sqrt(shots * 0.25 / runs)
    assert np.all(np.abs(zeros.mean(axis=0) - shots / 2) < 4 * stderr)


@pytest.mark.parametrize("lam", [0.0, 0.3, 0.6, 0.9])
def test_count_moments(lam):
    shots, runs = 50, 20000
    s = strength(lam)
    probs = probabilities(density_from_bloch(INTERIOR_STATE), s)
    zeros = simulate_count_table(probs, shots, runs, RandomStream(seed=13, counter=int(10 * lam)))
    for t in range(3):
        total = 1.0 if t == 0 else probs.s
        for k, counts in enumerate((zeros[:, t], shots - zeros[:, t])):
            p = probs.p[t, k]
            first = shots * p / total
            second = shots * p / total ** 2 * ((shots - 1) * p + total)
            assert abs(counts.mean() - first) < 4 * counts.std(ddof=1) / math.sqrt(runs)
            squares = counts.astype(float) ** 2
            assert abs(squares.mean() - second) < 4 * squares.std(ddof=1) / math.sqrt(runs)


def test_success_probabilities(ground_state, half_strength):
    assert success_probabilities(probabilities(ground_state, half_strength)) == pytest.approx([1.0, 0.5, 0.5])


# ---------------------------------------------------------------------------
# Estimation
# ---------------------------------------------------------------------------

def test_balanced_counts_estimate_the_maximally_mixed_state():
    s = strength(0.0)
    counts = CountRecord(np.full((3, 2), 50), 100)
    probs, rho = estimate_state(counts, s)
    assert np.allclose(probs.p, 0.5)
    assert np.allclose(rho.matrix, np.eye(2) / 2)


def test_ground_state_counts(half_strength):
    counts = CountRecord(np.array([[100, 0], [50, 50], [50, 50]]), 100)
    probs, rho = estimate_state(counts, half_strength)
    assert probs.p00 == 1.0
    assert probs.s == pytest.approx(1.5)
    assert np.allclose(rho.matrix, [[1, 0], [0, 0]])


@pytest.mark.parametrize(
    "vector, lam, shots",
    [([0.0, 0.0, 0.0], 0.5, 10), ([0.0, 0.0, 1.0], 0.5, 4), ([0.0, 0.0, 0.0], 0.0, 2)],
)
def test_exact_proportions_reconstruct_the_state(vector, lam, shots):
    rho = density_from_bloch(vector)
    counts = exact_counts(probabilities(rho, strength(lam)), shots)
    _, estimate = estimate_state(counts, strength(lam))
    assert np.max(np.abs(estimate.matrix - rho.matrix)) < 1e-12


def test_exact_counts_need_integral_proportions(maximally_mixed, half_strength):
    with pytest.raises(InvalidProbabilities):
        exact_counts(probabilities(maximally_mixed, half_strength), 3)


def test_estimated_p00_is_unbiased():
    shots, runs = 200, 20000
    s = strength(0.6)
    probs = probabilities(density_from_bloch(INTERIOR_STATE), s)
    tables = estimate_tables(simulate_count_table(probs, shots, runs, RandomStream(21)), shots, s)
    for t in range(3):
        for k in range(2):
            values = tables[:, t, k]
            assert abs(values.mean() - probs.p[t, k]) < 4 * values.std(ddof=1) / math.sqrt(runs)


def test_estimate_may_be_unphysical():
    counts = CountRecord(np.array([[10, 0], [10, 0], [10, 0]]), 10)
    _, rho = estimate_state(counts, strength(0.0))
    assert not rho.physical


def test_estimated_probabilities_may_exceed_one(half_strength):
    counts = CountRecord(np.array([[10, 0], [10, 0], [10, 0]]), 10)
    probs, rho = estimate_state(counts, half_strength)
    assert probs.s == pytest.approx(1.5)
    assert probs.p[1, 0] == pytest.approx(1.5)
    assert np.real(np.trace(rho.matrix)) == pytest.approx(1.0)


@pytest.mark.parametrize("vector", [[0.0, 0.0, 1.0], INTERIOR_STATE])
def test_every_small_sample_experiment_can_be_estimated(vector, half_strength):
    rho = density_from_bloch(vector)
    for seed in range(200):
        counts = simulate_counts(rho, half_strength, 10, RandomStream(seed))
        probs, estimate = estimate_state(counts, half_strength)
        assert probs.estimate
        assert np.real(np.trace(estimate.matrix)) == pytest.approx(1.0)
    assert np.min(np.linalg.eigvalsh(rho.matrix)) < 0.0


# ---------------------------------------------------------------------------
# Efficiency
# ---------------------------------------------------------------------------

def test_empirical_mse_of_maximally_mixed_state(maximally_mixed):
    s = strength(0.0)
    result = empirical_mse(maximally_mixed, s, 10000, 20000, RandomStream(seed=2024))
    assert result.scaled == pytest.approx(1.5, rel=0.05)


@pytest.mark.parametrize("vector, lam", [([0.0, 0.0, 0.0], 0.5), (INTERIOR_STATE, 0.3), (INTERIOR_STATE, 0.8)])
def test_empirical_mse_approaches_the_bound(vector, lam):
    rho = density_from_bloch(vector)
    s = strength(lam)
    bound = crb_closed(probabilities(rho, s), s).bound
    result = empirical_mse(rho, s, 10000, 20000, RandomStream(seed=99, counter=int(10 * lam)))
    ratio = result.scaled / bound
    assert 0.95 <= ratio <= 1.10
    assert result.scaled >= bound * (1.0 - 4.0 * result.stderr / result.mean_e2)


def test_empirical_mse_needs_two_runs(maximally_mixed, half_strength):
    with pytest.raises(ValidationError):
        empirical_mse(maximally_mixed, half_strength, 100, 1, RandomStream(0))
    with pytest.raises(ValidationError):
        empirical_mse(maximally_mixed, half_strength, 0, 10, RandomStream(0))


@pytest.mark.slow
@pytest.mark.parametrize("lam", [0.0, 0.5])
def test_score_covariance_converges_to_the_fisher_matrix(maximally_mixed, lam):
    s = strength(lam)
    expected = fisher_matrix(probabilities(maximally_mixed, s), s)
    covariance, stderr = score_covariance(maximally_mixed, s, 1, 1000000, RandomStream(seed=55))
    assert np.all(np.abs(covariance - expected) <= np.maximum(4 * stderr, 1e-3))


def test_empirical_fisher_of_an_interior_state():
    s = strength(0.4)
    rho = density_from_bloch(INTERIOR_STATE)
    expected = fisher_matrix(probabilities(rho, s), s)
    covariance, stderr = score_covariance(rho, s, 5, 200000, RandomStream(seed=56))
    assert np.all(np.abs(covariance - expected) <= np.maximum(4 * stderr, 1e-3))
    assert np.array_equal(empirical_fisher(rho, s, 5, 1000, RandomStream(1)), score_covariance(rho, s, 5, 1000, RandomStream(1))[0])


def test_empirical_fisher_needs_interior_probabilities(ground_state, half_strength):
    with pytest.raises(SingularFisher):
        empirical_fisher(ground_state, half_strength, 10, 100, RandomStream(0))
