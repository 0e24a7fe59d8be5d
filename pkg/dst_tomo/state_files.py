#!/usr/bin/env python

"""
JSON files for states and probability tables.

A state file holds either a Bloch vector or a density matrix::

    {"bloch": [bx, by, bz]}
    {"matrix": {"re": [[a, b], [c, d]], "im": [[0, e], [f, 0]]}}

A probability file holds the six DST probabilities indexed ``[t][k]``::

    {"lambda": 0.5, "p": [[p00, p10], [p01, p11], [p02, p12]]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import InvalidProbabilities, InvalidState
from .model import ProbabilitySet
from .qubit import DensityMatrix, density_from_bloch

PathLike = Union[str, Path]


def _read_json(path: PathLike, kind: str) -> dict:
    try:
        with open(path) as handle:
            document = json.load(handle)
    except json.JSONDecodeError as e:
        raise (InvalidState if kind == "state" else InvalidProbabilities)(
            f"The {kind} file '{path}' is not valid JSON: {e}"
        ) from e
    if not isinstance(document, dict):
        raise (InvalidState if kind == "state" else InvalidProbabilities)(
            f"The {kind} file '{path}' must contain a JSON object."
        )
    return document


def state_from_document(document: dict) -> DensityMatrix:
    '''
    :raises InvalidState: for a malformed document or a non-physical state
    :raises BlochOutOfBall: for a Bloch vector longer than one
    '''
    if "bloch" in document:
        bloch = document["bloch"]
        if not (isinstance(bloch, list) and len(bloch) == 3):
            raise InvalidState(f"'bloch' must be a list of three numbers, found {bloch!r}.")
        try:
            vector = np.array(bloch, dtype=float)
        except (TypeError, ValueError) as e:
            raise InvalidState(f"'bloch' must be a list of three numbers, found {bloch!r}.") from e
        return density_from_bloch(vector)
    if "matrix" in document:
        matrix = document["matrix"]
        try:
            real = np.array(matrix["re"], dtype=float)
            imaginary = np.array(matrix.get("im", np.zeros((2, 2))), dtype=float)
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise InvalidState(f"'matrix' must hold 2x2 're' and 'im' arrays, found {matrix!r}.") from e
        if real.shape != (2, 2) or imaginary.shape != (2, 2):
            raise InvalidState(f"'matrix' must hold 2x2 're' and 'im' arrays, found shapes {real.shape}, {imaginary.shape}.")
        return DensityMatrix(real + 1j * imaginary)
    raise InvalidState("A state file needs either a 'bloch' or a 'matrix' entry.")


def load_state(path: PathLike) -> DensityMatrix:
    return state_from_document(_read_json(path, "state"))


def state_document(rho: DensityMatrix) -> dict:
    return {
        "matrix": {"re": np.real(rho.matrix).tolist(), "im": np.imag(rho.matrix).tolist()},
        "bloch": rho.bloch_vector().tolist(),
    }


def probabilities_from_document(document: dict) -> ProbabilitySet:
    '''
    :raises InvalidProbabilities: for a malformed table or one violating the S constraint
    '''
    try:
        lam = float(document["lambda"])
        p = np.array(document["p"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidProbabilities(
            "A probability file needs 'lambda' and 'p' = [[p00, p10], [p01, p11], [p02, p12]]."
        ) from e
    return ProbabilitySet.from_table(p, lam)


def load_probabilities(path: PathLike) -> ProbabilitySet:
    return probabilities_from_document(_read_json(path, "probability"))


def write_json(document: dict, path: PathLike):
    with open(path, "w") as handle:
        json.dump(document, handle, indent=2)
        handle.write("\n")


__all__ = [
    "state_from_document",
    "load_state",
    "state_document",
    "probabilities_from_document",
    "load_probabilities",
    "write_json",
]
