#!/usr/bin/env python

"""
SIC-POVM baseline: the qubit tetrahedron measurement, its reconstruction and
its Cramer-Rao bound, used as the reference DST is compared against.

The frame is the canonical tetrahedron ``Pi_k = (I + n_k.sigma)/2`` with
``n_k`` = (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1) over sqrt(3). The projectors
sum to 2I, outcomes are ``p_k = Tr(rho Pi_k)/2`` and ``rho = 3 sum_k p_k Pi_k - I``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .crb import PROBABILITY_FLOOR, adjugate_inverse
from .errors import IllConditioned, InvalidProbabilities, SingularFisher
from .qubit import IDENTITY, DensityMatrix, _frozen, matrices_from_bloch
from .sampling import Ensemble

logger = logging.getLogger("dst_tomo.sic")

FRAME_TOLERANCE = 1e-12
PROBABILITY_TOLERANCE = 1e-10

TETRAHEDRON = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ]
) / np.sqrt(3.0)

# Q_kl = 6 (1 + delta_kl) over the independent p1, p2, p3
SIC_Q = 6.0 * (np.eye(3) + np.ones((3, 3)))


@dataclass(frozen=True, eq=False)
class SicFrame:
    ''' Four rank-one projectors with pairwise ``Tr(Pi_k Pi_l) = 1/3``. '''
    projectors: np.ndarray

    def __post_init__(self):
        projectors = np.asarray(self.projectors, dtype=complex)
        if projectors.shape != (4, 2, 2):
            raise ValueError(f"A qubit SIC frame holds four 2x2 projectors, received shape {projectors.shape}.")
        overlaps = np.real(np.einsum("kij,lji->kl", projectors, projectors))
        expected = np.full((4, 4), 1.0 / 3.0)
        np.fill_diagonal(expected, 1.0)
        if np.max(np.abs(overlaps - expected)) > FRAME_TOLERANCE:
            raise ValueError(f"Projectors do not form a SIC frame; Tr(Pi_k Pi_l) =\n{overlaps}")
        if np.max(np.abs(projectors.sum(axis=0) - 2.0 * IDENTITY)) > FRAME_TOLERANCE:
            raise ValueError("SIC projectors must sum to 2I.")
        object.__setattr__(self, "projectors", _frozen(projectors))


@dataclass(frozen=True, eq=False)
class SicProbabilities:
    ''' The four outcome probabilities, each in [0, 1/2], summing to one. '''
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (4,) or not np.all(np.isfinite(p)):
            raise InvalidProbabilities(f"Expected four finite SIC probabilities, received {p!r}.")
        if np.any(p < -PROBABILITY_TOLERANCE) or np.any(p > 0.5 + PROBABILITY_TOLERANCE):
            raise InvalidProbabilities(f"SIC probabilities must lie in [0, 1/2], received {p.tolist()}.")
        if abs(p.sum() - 1.0) > PROBABILITY_TOLERANCE:
            raise InvalidProbabilities(f"SIC probabilities must sum to 1, they sum to {p.sum()!r}.")
        object.__setattr__(self, "p", _frozen(p))


def sic_frame() -> SicFrame:
    return SicFrame(matrices_from_bloch(TETRAHEDRON))


def sic_probability_table(bloch: np.ndarray) -> np.ndarray:
    ''' Vectorised ``p_k = (1 + n_k . b)/4`` for Bloch vectors of shape ``(..., 3)``. '''
    return 0.25 * (1.0 + np.asarray(bloch, dtype=float) @ TETRAHEDRON.T)


def sic_probabilities(rho: DensityMatrix) -> SicProbabilities:
    frame = sic_frame()
    p = 0.5 * np.real(np.einsum("ij,kji->k", rho.matrix, frame.projectors))
    return SicProbabilities(p)


def sic_reconstruct(probs: SicProbabilities) -> DensityMatrix:
    ''' ``rho = 3 sum_k p_k Pi_k - I``; the exact inverse of :func:`sic_probabilities`. '''
    frame = sic_frame()
    rho = 3.0 * np.einsum("k,kij->ij", probs.p, frame.projectors) - IDENTITY
    return DensityMatrix(rho, physical=False)


def sic_bound_table(p: np.ndarray) -> np.ndarray:
    '''
    Vectorised ``Tr(Q F^-1)`` for SIC probabilities of shape ``(..., 4)`` with
    ``F_kl = 1/p4 + delta_kl/p_k`` over k, l = 1..3. Entries with a probability
    below the floor come back as NaN.
    '''
    p = np.asarray(p, dtype=float)
    interior = np.all(p >= PROBABILITY_FLOOR, axis=-1)
    safe = np.where(interior[..., None], p, 0.25)
    fisher = np.ones(p.shape[:-1] + (3, 3)) / safe[..., 3, None, None]
    fisher = fisher + np.einsum("...k,kl->...kl", 1.0 / safe[..., :3], np.eye(3))
    inverse, determinant = adjugate_inverse(fisher)
    bound = np.einsum("kl,...lk->...", SIC_Q, inverse)
    return np.where(interior & (np.abs(determinant) >= 1e-300), bound, np.nan)


def sic_crb(rho: DensityMatrix) -> float:
    '''
    Cramer-Rao bound of SIC tomography for one state.

    :raises SingularFisher: if an outcome probability is below 1e-12
    '''
    probs = sic_probabilities(rho)
    if np.min(probs.p) < PROBABILITY_FLOOR:
        raise SingularFisher(
            f"SIC Fisher matrix is singular: outcome probability {np.min(probs.p):.3g} is below {PROBABILITY_FLOOR:g}."
        )
    bound = float(sic_bound_table(probs.p))
    if not np.isfinite(bound):
        raise IllConditioned("SIC Fisher matrix could not be inverted.")
    return bound


def sic_mixed_average(ensemble: Ensemble = Ensemble.BURES_MIXED) -> float:
    '''
    Exact ensemble mean of the SIC bound. For one qubit the bound equals
    ``6(1 - sum_k p_k^2) = 9/2 - r^2/2``; ``<r^2> = 3/4`` under the Bures measure.
    '''
    return 4.5 - ensemble.mean_bloch_radius_sq() / 2.0


__all__ = [
    "TETRAHEDRON",
    "SicFrame",
    "SicProbabilities",
    "sic_frame",
    "sic_probability_table",
    "sic_probabilities",
    "sic_reconstruct",
    "sic_bound_table",
    "sic_crb",
    "sic_mixed_average",
]
