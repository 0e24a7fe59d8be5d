#!/usr/bin/env python

"""
Seeded random qubit ensembles.

Randomness comes from :class:`RandomStream`, a ``(seed, counter)`` pair that
maps to a NumPy ``Philox`` generator. Philox is counter-based: the draws are a
pure function of the key (the seed) and the counter, so any block of samples
can be regenerated independently, on any worker, in any order. Parallel code
hands disjoint counters to its workers and obtains the same numbers a single
process would.

Ensembles
---------
``PURE_HAAR``
    Unitarily invariant pure states (two complex Gaussians, normalised).
``BURES_MIXED``
    Bures-measure mixed states: eigenvalue ``x`` with density
    ``p(x) = (2/pi)(1 - 2x)^2/sqrt(x(1 - x))`` and a Haar-random eigenbasis.
``PARAMETRIC_MIXED``
    ``x|r0><r0| + (1 - x)|r1><r1|`` with ``|r0> = cos(d/2)|0> + e^{i e0} sin(d/2)|1>``,
    ``|r1> = sin(d/2)|0> + e^{i e1} cos(d/2)|1>``, measure ``p(x) sin(d) dx dd de0 de1/(8 pi^2)``.
    The two vectors are not orthogonal in general, so this is *not* the Bures
    ensemble; it is kept for comparison.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .qubit import DensityMatrix, PureState, bloch_vectors, canonical_phase, matrices_from_bloch

logger = logging.getLogger("dst_tomo.sampling")

UINT64_LIMIT = 2 ** 64
ICDF_TOLERANCE = 1e-12
ICDF_MAX_ITERATIONS = 200

# Alternative command-line names.
ENSEMBLE_ALIASES = {"paper-literal": "parametric"}


class Ensemble(enum.Enum):
    PURE_HAAR = "pure"
    BURES_MIXED = "bures"
    PARAMETRIC_MIXED = "parametric"

    @classmethod
    def from_name(cls, name: str) -> "Ensemble":
        try:
            return cls(ENSEMBLE_ALIASES.get(name, name))
        except ValueError:
            raise ValidationError(
                f"Unknown ensemble '{name}'. Choose one of: {', '.join(cls.choices())}."
            ) from None

    @classmethod
    def choices(cls) -> list:
        ''' Names accepted by :meth:`from_name`, aliases included. '''
        return [e.value for e in cls] + list(ENSEMBLE_ALIASES)

    @property
    def mixed(self) -> bool:
        return self is not Ensemble.PURE_HAAR

    def mean_bloch_radius_sq(self) -> float:
        '''
        Exact ensemble mean of ``r^2 = 2 Tr(rho^2) - 1``. With ``<x(1 - x)> = 1/16``
        under the Bures eigenvalue density: 3/4 for Bures states; the parametrised
        states add ``2x(1 - x)|<r0|r1>|^2`` with mean overlap 1/3, giving 5/6.
        '''
        return {Ensemble.PURE_HAAR: 1.0, Ensemble.BURES_MIXED: 0.75, Ensemble.PARAMETRIC_MIXED: 5.0 / 6.0}[self]


@dataclass(frozen=True)
class RandomStream:
    '''
    A position in a counter-based random sequence.

    :param seed: 64-bit unsigned key
    :param counter: 64-bit unsigned block index
    '''
    seed: int
    counter: int = 0

    def __post_init__(self):
        for name, value in (("seed", self.seed), ("counter", self.counter)):
            if not isinstance(value, (int, np.integer)) or not (0 <= int(value) < UINT64_LIMIT):
                raise ValidationError(f"Random stream {name} must be an integer in [0, 2^64), received {value!r}.")

    def generator(self) -> np.random.Generator:
        ''' A fresh generator positioned at the start of this block. '''
        # counter in the highest Philox word: blocks are 2^192 draws apart
        bit_generator = np.random.Philox(key=int(self.seed), counter=int(self.counter) << 192)
        return np.random.Generator(bit_generator)

    def advance(self, blocks: int) -> "RandomStream":
        return RandomStream(self.seed, (int(self.counter) + int(blocks)) % UINT64_LIMIT)


@dataclass(frozen=True)
class MixedParam:
    '''
    Parameters of one parametrised mixed state.

    :param x: eigenvalue weight in [0, 1]
    :param delta: polar angle in [0, pi]
    :param eta0: phase in [0, 2 pi)
    :param eta1: phase in [0, 2 pi)
    '''
    x: float
    delta: float
    eta0: float
    eta1: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.delta <= math.pi):
            raise ValidationError(f"Mixed-state parameters out of range: {self}.")
        if not (0.0 <= self.eta0 < 2 * math.pi and 0.0 <= self.eta1 < 2 * math.pi):
            raise ValidationError(f"Phases must lie in [0, 2 pi): {self}.")

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(
            _parametric_matrices(
                np.array([self.x]), np.array([self.delta]), np.array([self.eta0]), np.array([self.eta1])
            )[0]
        )


# ---------------------------------------------------------------------------
# Bures eigenvalue distribution
# ---------------------------------------------------------------------------

def bures_cdf(x):
    '''
    Cumulative distribution of the Bures eigenvalue density. With
    ``x = (1 - cos(phi))/2`` it is ``(phi + sin(phi) cos(phi))/pi``.
    '''
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    phi = np.arccos(1.0 - 2.0 * x)
    value = (phi + np.sin(phi) * np.cos(phi)) / math.pi
    return float(value) if value.ndim == 0 else value


def bures_icdf(u):
    '''
    Inverse of :func:`bures_cdf` by guarded Newton iteration in ``phi``.

    Starts at ``phi = pi u``; steps leaving the current bracket (the CDF
    derivative ``(2/pi) cos^2(phi)`` vanishes at the ends and at pi/2) are
    replaced by bisection. Accepts scalars or arrays of ``u`` in [0, 1].
    '''
    u = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(u)) or np.any(u < 0.0) or np.any(u > 1.0):
        raise ValidationError("bures_icdf requires u in [0, 1].")

    lo = np.zeros_like(u)
    hi = np.full_like(u, math.pi)
    phi = math.pi * u
    for iteration in range(ICDF_MAX_ITERATIONS):
        residual = (phi + np.sin(phi) * np.cos(phi)) / math.pi - u
        if np.all(np.abs(residual) < ICDF_TOLERANCE):
            break
        lo = np.where(residual < 0.0, phi, lo)
        hi = np.where(residual > 0.0, phi, hi)
        slope = 2.0 * np.cos(phi) ** 2 / math.pi
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = phi - residual / slope
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        phi = np.where(np.abs(residual) < ICDF_TOLERANCE, phi, np.where(inside, newton, 0.5 * (lo + hi)))
    else:
        logger.debug(f"bures_icdf stopped after {ICDF_MAX_ITERATIONS} iterations")

    x = np.clip(0.5 * (1.0 - np.cos(phi)), 0.0, 1.0)
    return float(x) if x.ndim == 0 else x


# ---------------------------------------------------------------------------
# Batch samplers (arrays)
# ---------------------------------------------------------------------------

def sample_pure_batch(stream: RandomStream, count: int) -> np.ndarray:
    ''' ``count`` Haar-random pure states as an amplitude array of shape ``(count, 2)``. '''
    gaussians = stream.generator().standard_normal((count, 4))
    amplitudes = gaussians[:, 0:2] + 1j * gaussians[:, 2:4]
    return amplitudes / np.linalg.norm(amplitudes, axis=1, keepdims=True)


def _pure_matrices(amplitudes: np.ndarray) -> np.ndarray:
    return np.einsum("ni,nj->nij", amplitudes, np.conj(amplitudes))


def sample_bures_batch(stream: RandomStream, count: int) -> np.ndarray:
    ''' ``count`` Bures-random density matrices, shape ``(count, 2, 2)``. '''
    generator = stream.generator()
    x = bures_icdf(generator.random(count))
    gaussians = generator.standard_normal((count, 4))
    amplitudes = gaussians[:, 0:2] + 1j * gaussians[:, 2:4]
    amplitudes = amplitudes / np.linalg.norm(amplitudes, axis=1, keepdims=True)
    # x |v0><v0| + (1 - x)|v1><v1| has Bloch vector (2x - 1) n(v0)
    directions = bloch_vectors(_pure_matrices(amplitudes))
    return matrices_from_bloch((2.0 * np.asarray(x) - 1.0)[:, None] * directions)


def _parametric_matrices(x, delta, eta0, eta1) -> np.ndarray:
    half = 0.5 * delta
    r0 = np.stack([np.cos(half), np.exp(1j * eta0) * np.sin(half)], axis=-1)
    r1 = np.stack([np.sin(half), np.exp(1j * eta1) * np.cos(half)], axis=-1)
    return x[:, None, None] * _pure_matrices(r0) + (1.0 - x)[:, None, None] * _pure_matrices(r1)


def sample_mixed_param_batch(stream: RandomStream, count: int):
    ''' Arrays ``(x, delta, eta0, eta1)`` drawn from the parametrised eigenframe measure. '''
    generator = stream.generator()
    uniforms = generator.random((count, 4))
    x = np.atleast_1d(bures_icdf(uniforms[:, 0]))
    delta = np.arccos(1.0 - 2.0 * uniforms[:, 1])
    eta0 = 2.0 * math.pi * uniforms[:, 2]
    eta1 = 2.0 * math.pi * uniforms[:, 3]
    return x, delta, eta0, eta1


def sample_parametric_batch(stream: RandomStream, count: int) -> np.ndarray:
    return _parametric_matrices(*sample_mixed_param_batch(stream, count))


def sample_matrices(ensemble: Ensemble, stream: RandomStream, count: int) -> np.ndarray:
    ''' Density matrices of shape ``(count, 2, 2)`` from any ensemble. '''
    if count < 1:
        raise ValidationError(f"Sample count must be at least 1, received {count}.")
    if ensemble is Ensemble.PURE_HAAR:
        return _pure_matrices(sample_pure_batch(stream, count))
    if ensemble is Ensemble.BURES_MIXED:
        return sample_bures_batch(stream, count)
    if ensemble is Ensemble.PARAMETRIC_MIXED:
        return sample_parametric_batch(stream, count)
    raise ValidationError(f"Unsupported ensemble {ensemble!r}.")


# ---------------------------------------------------------------------------
# Single draws
# ---------------------------------------------------------------------------

def sample_pure(stream: RandomStream) -> PureState:
    return PureState(canonical_phase(sample_pure_batch(stream, 1)[0]))


def sample_bures(stream: RandomStream) -> DensityMatrix:
    return DensityMatrix(sample_bures_batch(stream, 1)[0])


def sample_mixed_param(stream: RandomStream) -> MixedParam:
    x, delta, eta0, eta1 = sample_mixed_param_batch(stream, 1)
    return MixedParam(float(x[0]), float(delta[0]), float(eta0[0]), float(eta1[0]))


__all__ = [
    "Ensemble",
    "RandomStream",
    "MixedParam",
    "bures_cdf",
    "bures_icdf",
    "sample_pure_batch",
    "sample_bures_batch",
    "sample_mixed_param_batch",
    "sample_parametric_batch",
    "sample_matrices",
    "sample_pure",
    "sample_bures",
    "sample_mixed_param",
]
