#!/usr/bin/env python

"""
Finite-shot simulation of the DST experiment.

Each of the three pointer bases is post-selected ``N`` times. In basis ``t`` the
count ``n_0t`` is binomial with ``N`` trials and success probability ``p_0t/S``
(``p_00`` for the computational basis), so ``<n_kt> = N p_kt/S``. The plug-in
estimator turns the frequencies back into a constrained probability table and
reconstructs the state by linear inversion; the estimate is not projected onto
the positive cone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidProbabilities, SingularFisher, ValidationError
from .model import MeasurementStrength, ProbabilitySet, probabilities, reconstruct, reconstruct_matrices
from .qubit import DensityMatrix, RealMatrix3, as_real_matrix3
from .sampling import RandomStream

logger = logging.getLogger("dst_tomo.experiment")

FISHER_PROBABILITY_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class CountRecord:
    '''
    Outcome counts ``n[t, k]`` with ``n_0t + n_1t = shots`` in every basis.
    '''
    n: np.ndarray
    shots: int

    def __post_init__(self):
        n = np.asarray(self.n)
        if n.shape != (3, 2):
            raise ValidationError(f"Counts are indexed [t][k] with shape (3, 2), received {n.shape}.")
        if not np.issubdtype(n.dtype, np.integer) or np.any(n < 0):
            raise ValidationError(f"Counts must be non-negative integers, received {n.tolist()}.")
        if self.shots < 1:
            raise ValidationError(f"Each basis needs at least one post-selected shot, received {self.shots}.")
        if np.any(n.sum(axis=1) != self.shots):
            raise ValidationError(f"Every basis must hold exactly {self.shots} counts, received {n.tolist()}.")
        frozen = n.astype(np.int64)
        frozen.setflags(write=False)
        object.__setattr__(self, "n", frozen)

    def get(self, k: int, t: int) -> int:
        return int(self.n[t, k])


@dataclass(frozen=True)
class EmpiricalResult:
    ''' Sample mean and standard error of ``E^2`` over independent runs. '''
    mean_e2: float
    stderr: float
    runs: int
    shots: int

    def __post_init__(self):
        if self.mean_e2 < 0.0 or self.stderr < 0.0:
            raise ValueError(f"Mean error and its standard error must be non-negative: {self}.")

    @property
    def scaled(self) -> float:
        ''' ``shots * mean_e2``, comparable with the bound per trial. '''
        return self.shots * self.mean_e2

    @property
    def scaled_stderr(self) -> float:
        return self.shots * self.stderr


def _check_shots(shots: int, runs: int = 1, min_runs: int = 1):
    if int(shots) < 1:
        raise ValidationError(f"shots must be at least 1, received {shots}.")
    if int(runs) < min_runs:
        raise ValidationError(f"runs must be at least {min_runs}, received {runs}.")


def success_probabilities(probs: ProbabilitySet) -> np.ndarray:
    ''' ``(p_00, p_01/S, p_02/S)``: the probability of outcome k = 0 in each basis. '''
    p = probs.p
    return np.clip(np.array([p[0, 0], p[1, 0] / probs.s, p[2, 0] / probs.s]), 0.0, 1.0)


def simulate_count_table(probs: ProbabilitySet, shots: int, runs: int, stream: RandomStream) -> np.ndarray:
    '''
    Counts of outcome 0 for ``runs`` independent experiments, shape ``(runs, 3)``.
    '''
    _check_shots(shots, runs)
    return stream.generator().binomial(int(shots), success_probabilities(probs), size=(int(runs), 3))


def simulate_counts(
    rho: DensityMatrix, strength: MeasurementStrength, shots: int, stream: RandomStream
) -> CountRecord:
    '''
    One simulated experiment: three independent binomial draws.

    :param shots: post-selected trials per basis
    '''
    zeros = simulate_count_table(probabilities(rho, strength), shots, 1, stream)[0]
    return CountRecord(np.stack([zeros, shots - zeros], axis=-1), int(shots))


def estimate_tables(zeros: np.ndarray, shots: int, strength: MeasurementStrength) -> np.ndarray:
    '''
    Vectorised plug-in estimate for counts of shape ``(..., 3)``::

        p00 = n00/N,  S = 1 - l + 2 l p00,  p_kt = S n_kt/N  (t = 1, 2)

    :return: probability tables of shape ``(..., 3, 2)``
    '''
    frequencies = np.asarray(zeros, dtype=float) / shots
    table = np.stack([frequencies, 1.0 - frequencies], axis=-1)
    s = 1.0 - strength.lam + 2.0 * strength.lam * table[..., 0, 0]
    table[..., 1:, :] *= s[..., None, None]
    return table


def estimate_state(counts: CountRecord, strength: MeasurementStrength) -> Tuple[ProbabilitySet, DensityMatrix]:
    '''
    Plug-in (maximum-likelihood) estimate of the probabilities and the state.

    :raises DegenerateStrength: for lambda >= 1 - 1e-12
    '''
    strength.require_complete()
    table = estimate_tables(counts.n[:, 0], counts.shots, strength)
    probs = ProbabilitySet.from_table(table, strength.lam, estimate=True)
    return probs, reconstruct(probs, strength)


def _squared_errors(rho: DensityMatrix, strength: MeasurementStrength, shots: int, runs: int, stream: RandomStream):
    zeros = simulate_count_table(probabilities(rho, strength), shots, runs, stream)
    estimates = reconstruct_matrices(estimate_tables(zeros, shots, strength), strength)
    difference = estimates - rho.matrix
    return np.real(np.einsum("nij,nij->n", difference, np.conj(difference)))


def empirical_mse(
    rho: DensityMatrix, strength: MeasurementStrength, shots: int, runs: int, stream: RandomStream
) -> EmpiricalResult:
    '''
    Mean and standard error of ``Tr[(rho - rho_hat)^2]`` over independent runs.

    :param shots: post-selected trials per basis and run
    :param runs: number of repetitions, at least 2
    '''
    _check_shots(shots, runs, min_runs=2)
    strength.require_complete()
    errors = _squared_errors(rho, strength, int(shots), int(runs), stream)
    result = EmpiricalResult(
        mean_e2=float(np.mean(errors)),
        stderr=float(np.std(errors, ddof=1) / math.sqrt(runs)),
        runs=int(runs),
        shots=int(shots),
    )
    logger.debug(f"empirical MSE at lambda={strength.lam:.6g}: N*E2 = {result.scaled:.6g} +- {result.scaled_stderr:.2g}")
    return result


def scores(zeros: np.ndarray, shots: int, probs: ProbabilitySet, strength: MeasurementStrength) -> np.ndarray:
    '''
    Score vectors ``d lnL / d(p00, p01, p02)`` for counts of shape ``(runs, 3)``,
    with ``p10 = 1 - p00``, ``p1t = S - p0t`` and the ``S^-N`` normalisation
    substituted::

        s_0 = n00/p00 - n10/p10 + sum_t (2 l n1t/p1t - 2 l N/S)
        s_t = n0t/p0t - n1t/p1t
    '''
    lam, s, p = strength.lam, probs.s, probs.p
    n0 = np.asarray(zeros, dtype=float)
    n1 = shots - n0
    result = np.empty_like(n0)
    result[:, 0] = n0[:, 0] / p[0, 0] - n1[:, 0] / p[0, 1]
    for t in (1, 2):
        result[:, 0] += 2.0 * lam * n1[:, t] / p[t, 1] - 2.0 * lam * shots / s
        result[:, t] = n0[:, t] / p[t, 0] - n1[:, t] / p[t, 1]
    return result


def score_covariance(
    rho: DensityMatrix, strength: MeasurementStrength, shots: int, runs: int, stream: RandomStream
) -> Tuple[RealMatrix3, RealMatrix3]:
    '''
    Empirical Fisher matrix per trial and the standard error of each entry.

    :raises SingularFisher: if any outcome probability is below 1e-6
    '''
    _check_shots(shots, runs, min_runs=2)
    probs = probabilities(rho, strength)
    if probs.minimum() < FISHER_PROBABILITY_FLOOR:
        raise SingularFisher(
            f"The empirical Fisher matrix needs interior probabilities; the smallest is {probs.minimum():.3g} "
            f"(< {FISHER_PROBABILITY_FLOOR:g})."
        )
    zeros = simulate_count_table(probs, shots, runs, stream)
    centred = scores(zeros, int(shots), probs, strength)
    centred = centred - centred.mean(axis=0)
    covariance = np.zeros((3, 3))
    stderr = np.zeros((3, 3))
    for i in range(3):
        for j in range(i, 3):
            products = centred[:, i] * centred[:, j]
            covariance[i, j] = covariance[j, i] = products.mean() / shots
            stderr[i, j] = stderr[j, i] = products.std(ddof=1) / math.sqrt(runs) / shots
    return as_real_matrix3(covariance), as_real_matrix3(stderr)


def empirical_fisher(
    rho: DensityMatrix, strength: MeasurementStrength, shots: int, runs: int, stream: RandomStream
) -> RealMatrix3:
    ''' Per-trial covariance of the score vector; converges to ``fisher_matrix``. '''
    return score_covariance(rho, strength, shots, runs, stream)[0]


def exact_counts(probs: ProbabilitySet, shots: int) -> CountRecord:
    '''
    Counts in exact proportion ``n_kt = N p_kt/S``; only valid when those are integers.
    '''
    expected = np.array(shots * success_probabilities(probs))
    rounded = np.rint(expected)
    if np.max(np.abs(expected - rounded)) > 1e-9:
        raise InvalidProbabilities(f"N p/S is not integral for N={shots}: {expected.tolist()}.")
    zeros = rounded.astype(np.int64)
    return CountRecord(np.stack([zeros, shots - zeros], axis=-1), int(shots))


__all__ = [
    "CountRecord",
    "EmpiricalResult",
    "success_probabilities",
    "simulate_count_table",
    "simulate_counts",
    "estimate_tables",
    "estimate_state",
    "empirical_mse",
    "scores",
    "score_covariance",
    "empirical_fisher",
    "exact_counts",
]
