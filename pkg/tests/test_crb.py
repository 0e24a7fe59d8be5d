import math

import numpy as np
import pytest
from hypothesis import given
from scipy import integrate, optimize

from dst_tomo.crb import (
    CrbMethod,
    adjugate_inverse,
    closed_bound,
    crb_closed,
    crb_numeric,
    fisher_matrix,
    mub_mixed_average,
    pure_average,
    pure_crb,
    q_matrix,
)
from dst_tomo.errors import DegenerateStrength, SingularFisher
from dst_tomo.model import MeasurementStrength, outcome_probabilities, probabilities
from dst_tomo.qubit import DensityMatrix, density_from_bloch
from dst_tomo.sampling import Ensemble, RandomStream, sample_bures_batch, sample_pure_batch

from strategies import LAMBDA_GRID, bloch_vectors_in_ball, lambdas


def strength(lam):
    return MeasurementStrength.from_lambda(lam)


# ---------------------------------------------------------------------------
# Q and F
# ---------------------------------------------------------------------------

def test_q_matrix_examples():
    assert np.allclose(q_matrix(strength(0.0)), 2 * np.eye(3))
    expected = 8 / 3 * np.array([[1.25, -0.5, -0.5], [-0.5, 1, 0], [-0.5, 0, 1]])
    assert np.allclose(q_matrix(strength(0.5)), expected)


@given(lambdas)
def test_q_matrix_is_symmetric(lam):
    q = q_matrix(strength(lam))
    assert np.array_equal(q, q.T)


def test_q_matrix_refuses_the_parallel_limit():
    with pytest.raises(DegenerateStrength):
        q_matrix(strength(1.0 - 1e-13))


def test_fisher_matrix_of_maximally_mixed_state(maximally_mixed, half_strength):
    f = fisher_matrix(probabilities(maximally_mixed, half_strength), half_strength)
    assert np.allclose(f, [[6, -2, -2], [-2, 4, 0], [-2, 0, 4]])
    f0 = fisher_matrix(probabilities(maximally_mixed, strength(0.0)), strength(0.0))
    assert np.allclose(f0, 4 * np.eye(3))


def test_fisher_matrix_is_singular_on_the_boundary(ground_state, half_strength):
    with pytest.raises(SingularFisher):
        fisher_matrix(probabilities(ground_state, half_strength), half_strength)


def test_adjugate_inverse_matches_numpy():
    rng = np.random.default_rng(5)
    matrices = rng.normal(size=(50, 3, 3))
    inverse, determinant = adjugate_inverse(matrices)
    assert np.allclose(determinant, np.linalg.det(matrices))
    assert np.allclose(inverse, np.linalg.inv(matrices))


# ---------------------------------------------------------------------------
# Bounds for single states
# ---------------------------------------------------------------------------

def test_numeric_bound_examples(maximally_mixed, half_strength):
    assert crb_numeric(probabilities(maximally_mixed, strength(0.0)), strength(0.0)).bound == pytest.approx(1.5)
    report = crb_numeric(probabilities(maximally_mixed, half_strength), half_strength)
    assert report.bound == pytest.approx(11 / 6, rel=1e-12)
    assert report.method is CrbMethod.NUMERIC_INVERSION

    equator = density_from_bloch([1.0, 0.0, 0.0])
    assert crb_numeric(probabilities(equator, half_strength), half_strength).bound == pytest.approx(1.458333333333333)


def test_numeric_bound_fails_on_the_boundary(ground_state, half_strength):
    with pytest.raises(SingularFisher):
        crb_numeric(probabilities(ground_state, half_strength), half_strength)


def test_closed_bound_examples(maximally_mixed, ground_state, half_strength):
    assert crb_closed(probabilities(maximally_mixed, strength(0.0)), strength(0.0)).bound == pytest.approx(1.5)
    assert crb_closed(probabilities(maximally_mixed, half_strength), half_strength).bound == pytest.approx(11 / 6)

    report = crb_closed(probabilities(ground_state, half_strength), half_strength)
    assert report.bound == pytest.approx(3.0)
    assert report.fisher is None
    assert report.e_min == pytest.approx(math.sqrt(3.0))
    assert report.as_dict()["method"] == "closed"


@pytest.mark.slow
@pytest.mark.parametrize("lam", np.round(np.arange(0.0, 1.0, 0.1), 1))
def test_closed_form_matches_numeric_inversion(lam):
    s = strength(float(lam))
    states = sample_bures_batch(RandomStream(seed=7, counter=3), 10000)
    tables = outcome_probabilities(states, s)
    closed = closed_bound(tables, s)
    checked = 0
    for state, table, value in zip(states, tables, closed):
        if table.min() < 1e-3:
            continue
        numeric = crb_numeric(probabilities(DensityMatrix(state), s), s).bound
        assert value == pytest.approx(numeric, rel=1e-9)
        checked += 1
    assert checked > 9000


@given(bloch_vectors_in_ball, lambdas)
def test_closed_bound_is_finite_everywhere(vector, lam):
    s = strength(lam)
    report = crb_closed(probabilities(density_from_bloch(vector), s), s)
    assert math.isfinite(report.bound)
    assert report.bound >= 0.0


# ---------------------------------------------------------------------------
# Pure states
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("lam", LAMBDA_GRID)
def test_pure_formula_matches_closed_form(lam):
    s = strength(lam)
    amplitudes = sample_pure_batch(RandomStream(seed=9), 500)
    matrices = np.einsum("ni,nj->nij", amplitudes, np.conj(amplitudes))
    closed = closed_bound(outcome_probabilities(matrices, s), s)
    pure = pure_crb(np.abs(amplitudes[:, 0]) ** 2, s)
    assert np.allclose(closed, pure, rtol=0.0, atol=1e-10)


def test_pure_crb_examples():
    assert pure_crb(0.5, strength(0.5)) == pytest.approx(1.458333333333333)
    assert pure_crb(1.0, strength(0.5)) == pytest.approx(3.0)
    assert pure_crb(0.3, strength(0.0)) == pytest.approx(1.0)


def test_pure_average_examples():
    assert pure_average(strength(0.0)) == 1.0
    assert pure_average(strength(0.5)) == pytest.approx(1.519437, abs=1e-5)
    assert pure_average(strength(0.82)) == pytest.approx(4.003094, abs=1e-5)


@pytest.mark.parametrize("lam", [1e-3, 5e-3, 0.05, 0.2, 0.5, 0.8, 0.95])
def test_pure_average_matches_quadrature(lam):
    s = strength(lam)
    reference, _ = integrate.quad(lambda x: pure_crb(x, s), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    assert pure_average(s) == pytest.approx(reference, abs=1e-8)


def test_pure_average_series_joins_the_closed_form():
    below = pure_average(strength(0.01 - 1e-12))
    above = pure_average(strength(0.01))
    assert below == pytest.approx(above, abs=1e-10)
    assert pure_average(strength(1e-4)) == pytest.approx(1.0 + 1.6e-8, abs=1e-12)


def test_pure_average_is_increasing():
    values = [pure_average(strength(lam)) for lam in np.linspace(0.0, 0.99, 100)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_pure_average_weak_limit():
    lam = 0.999
    assert (1 - lam * lam) * pure_average(strength(lam)) == pytest.approx(4 / 3, rel=0.01)


def test_pure_crossover_bracket():
    root = optimize.brentq(lambda lam: pure_average(strength(lam)) - 4.0, 0.5, 0.95, xtol=1e-12)
    assert 0.815 < root < 0.825
    assert pure_average(strength(0.81)) < 4.0 < pure_average(strength(0.82))


# ---------------------------------------------------------------------------
# Ensemble references
# ---------------------------------------------------------------------------

def test_strong_limit_mixed_references():
    assert mub_mixed_average() == pytest.approx(1.125)
    assert mub_mixed_average(Ensemble.PURE_HAAR) == pytest.approx(1.0)
    assert mub_mixed_average(Ensemble.PARAMETRIC_MIXED) == pytest.approx(13 / 12)


@given(bloch_vectors_in_ball)
def test_strong_limit_bound_depends_only_on_radius(vector):
    s = strength(0.0)
    bound = crb_closed(probabilities(density_from_bloch(vector), s), s).bound
    assert bound == pytest.approx((3.0 - float(np.dot(vector, vector))) / 2.0, abs=1e-12)
