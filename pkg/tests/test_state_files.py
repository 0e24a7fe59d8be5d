import json

import numpy as np
import pytest

from dst_tomo.errors import BlochOutOfBall, InvalidProbabilities, InvalidState
from dst_tomo.model import MeasurementStrength, probabilities
from dst_tomo.qubit import density_from_bloch
from dst_tomo.state_files import (
    load_probabilities,
    load_state,
    probabilities_from_document,
    state_document,
    state_from_document,
    write_json,
)


def write(path, document):
    path.write_text(document if isinstance(document, str) else json.dumps(document))
    return str(path)


def test_bloch_document():
    rho = state_from_document({"bloch": [0.0, 0.0, 1.0]})
    assert np.allclose(rho.matrix, [[1, 0], [0, 0]])


def test_matrix_document():
    rho = state_from_document({"matrix": {"re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}})
    assert rho.bloch_vector() == pytest.approx([1.0, 0.0, 0.0])
    assert state_from_document({"matrix": {"re": [[1, 0], [0, 0]]}}).purity() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "document",
    [
        {},
        {"bloch": [0.0, 1.0]},
        {"bloch": ["x", 0, 0]},
        {"matrix": {"re": [[1, 0]]}},
        {"matrix": [[1, 0], [0, 0]]},
        {"matrix": {"re": [[0.5, 0.4], [0.0, 0.5]]}},
    ],
)
def test_malformed_state_documents(document):
    with pytest.raises(InvalidState):
        state_from_document(document)


def test_bloch_vector_outside_the_ball():
    with pytest.raises(BlochOutOfBall):
        state_from_document({"bloch": [1.0, 1.0, 0.0]})


def test_state_file_round_trip(tmp_path):
    rho = density_from_bloch([0.2, -0.3, 0.4])
    path = str(tmp_path / "state.json")
    write_json(state_document(rho), path)
    loaded = load_state(path)
    assert np.allclose(loaded.matrix, rho.matrix)


def test_state_file_errors(tmp_path):
    with pytest.raises(InvalidState):
        load_state(write(tmp_path / "broken.json", "{not json"))
    with pytest.raises(InvalidState):
        load_state(write(tmp_path / "list.json", "[1, 2, 3]"))
    with pytest.raises(OSError):
        load_state(str(tmp_path / "missing.json"))


def test_probability_file(tmp_path):
    rho = density_from_bloch([0.0, 0.6, 0.0])
    strength = MeasurementStrength.from_lambda(0.4)
    path = write(tmp_path / "probs.json", probabilities(rho, strength).as_dict())
    probs = load_probabilities(path)
    assert probs.lam == 0.4
    assert np.allclose(probs.p, probabilities(rho, strength).p)


def test_malformed_probability_documents(tmp_path):
    with pytest.raises(InvalidProbabilities):
        probabilities_from_document({"p": [[1, 0], [0.5, 0.5], [0.5, 0.5]]})
    with pytest.raises(InvalidProbabilities):
        probabilities_from_document({"lambda": 0.0, "p": [[1, 0], [0.5, 0.5], [0.9, 0.5]]})
    with pytest.raises(InvalidProbabilities):
        load_probabilities(write(tmp_path / "broken.json", "]"))
