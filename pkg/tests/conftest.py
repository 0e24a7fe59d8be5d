import pytest
from hypothesis import HealthCheck, settings

from dst_tomo import DensityMatrix, MeasurementStrength, density_from_bloch
from dst_tomo.ResultsDatabase import ResultsDatabase

settings.register_profile("fast", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile("fast")


@pytest.fixture
def maximally_mixed():
    return DensityMatrix.maximally_mixed()


@pytest.fixture
def ground_state():
    return density_from_bloch([0.0, 0.0, 1.0])


@pytest.fixture
def excited_state():
    return density_from_bloch([0.0, 0.0, -1.0])


@pytest.fixture
def half_strength():
    return MeasurementStrength.from_lambda(0.5)


@pytest.fixture
def sqlite_url(tmp_path):
    yield f"sqlite:///{tmp_path / 'results.db'}"
    ResultsDatabase.close_all()
