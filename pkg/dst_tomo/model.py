#!/usr/bin/env python

"""
The direct state tomography (DST) measurement model for one qubit.

A system qubit is coupled to a pointer qubit (prepared in ``|0>``) through
``U(theta) = exp(-i theta sx (x) sx)``, post-selected on ``|0>_s`` and the pointer
is measured in three bases ``t = 0, 1, 2``. Every outcome probability is the
expectation value of an *effective projection state* ``|psi_k^t>`` of the system,
so the scheme is a projective tomography in non-orthogonal (equidistant) bases:

    |psi_k^t(lambda)> = sqrt((1+lambda)/2) |0> + (-1)^k (-i)^(t+2) sqrt((1-lambda)/2) |1>,   t = 1, 2
    |psi_0^0> = |0>,  |psi_1^0> = |1>

with ``lambda = cos(2 theta)``. lambda = 0 is the strong (mutually unbiased) limit and
lambda -> 1 the weak, near-parallel limit. The probabilities obey

    p_0t + p_1t = 1 - lambda + 2 lambda p_00 = S,   t = 1, 2

and the state is recovered by linear inversion in the biorthogonal bases
``|phi_k^t(lambda)> = |psi_k^t(-lambda)>``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ConstraintViolation, DegenerateProjection, DegenerateStrength, InvalidProbabilities, ValidationError
from .qubit import SIGMA_X, DensityMatrix, PureState, TwoQubitUnitary, _frozen, canonical_phase

logger = logging.getLogger("dst_tomo.model")

STRENGTH_TOLERANCE = 1e-12
DEGENERATE_LAMBDA = 1.0 - 1e-12
PROBABILITY_TOLERANCE = 1e-10
CLAMP_TOLERANCE = 1e-14
CONTRACTION_TOLERANCE = 1e-12

BASES = (0, 1, 2)
OUTCOMES = (0, 1)

# (-i)^(t+2), tabulated so the amplitudes are exact
_PHASE = {1: 1j, 2: 1.0}


class BasisKind(enum.Enum):
    EFFECTIVE = "effective"
    BIORTHOGONAL = "biorthogonal"
    POINTER = "pointer"


@dataclass(frozen=True)
class MeasurementStrength:
    '''
    The coupling strength, held in both of its forms.

    ``theta`` is in radians, ``lam = cos(2 theta)``. Public constructors accept
    ``lam`` in ``[0, 1)``; the parallel limit ``lam = 1`` is only available through
    :meth:`parallel_limit` because the bases are not informationally complete there.
    '''
    theta: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.lam)):
            raise ValidationError(f"Measurement strength must be finite, received theta={self.theta}, lambda={self.lam}.")
        if abs(math.cos(2.0 * self.theta) - self.lam) > STRENGTH_TOLERANCE:
            raise ValidationError(
                f"Inconsistent measurement strength: cos(2*{self.theta}) = {math.cos(2.0 * self.theta)!r} "
                f"but lambda = {self.lam!r}."
            )
        if not (0.0 <= self.lam <= 1.0):
            raise ValidationError(f"lambda must lie in [0, 1), received {self.lam!r}.")

    @classmethod
    def from_lambda(cls, lam: float) -> "MeasurementStrength":
        '''
        :param lam: lambda in [0, 1)
        :raises DegenerateStrength: for lambda = 1 (parallel bases)
        :raises ValidationError: for lambda outside [0, 1]
        '''
        lam = float(lam)
        if not (0.0 <= lam <= 1.0):
            raise ValidationError(f"lambda must lie in [0, 1), received {lam!r}.")
        if lam >= 1.0:
            raise DegenerateStrength(
                "lambda = 1 gives parallel effective bases, which are not informationally complete; "
                "choose lambda in [0, 1)."
            )
        return cls(theta=0.5 * math.acos(lam), lam=lam)

    @classmethod
    def from_theta(cls, theta: float) -> "MeasurementStrength":
        '''
        :param theta: coupling angle in (0, pi/4]
        '''
        theta = float(theta)
        if not (0.0 <= theta <= math.pi / 4 + STRENGTH_TOLERANCE):
            raise ValidationError(f"theta must lie in [0, pi/4], received {theta!r}.")
        theta = min(theta, math.pi / 4)
        lam = max(0.0, math.cos(2.0 * theta))
        if lam >= 1.0:
            raise DegenerateStrength("theta = 0 (no coupling) gives parallel effective bases.")
        return cls(theta=theta, lam=lam)

    @classmethod
    def parallel_limit(cls) -> "MeasurementStrength":
        ''' lambda = 1, theta = 0; for evaluating the bases in the weak limit only. '''
        return cls(theta=0.0, lam=1.0)

    def require_complete(self):
        ''' :raises DegenerateStrength: if lambda is numerically 1. '''
        if self.lam >= DEGENERATE_LAMBDA:
            raise DegenerateStrength(
                f"lambda = {self.lam!r} is too close to 1: the reconstruction and the error bounds have a "
                f"(1 - lambda)^-1 pole there."
            )


@dataclass(frozen=True, eq=False)
class BasisSet:
    '''
    Six qubit vectors indexed by basis ``t`` (0..2) and outcome ``k`` (0..1).

    ``vectors[t][k]`` is a :class:`PureState`. :meth:`amplitudes` returns the same
    data as an array of shape ``(3, 2, 2)`` for vectorised use.
    '''
    vectors: Tuple[Tuple[PureState, PureState], ...]
    kind: BasisKind
    strength: Optional[MeasurementStrength] = None

    def __post_init__(self):
        if len(self.vectors) != 3 or any(len(pair) != 2 for pair in self.vectors):
            raise ValidationError("A basis set holds exactly three bases of two vectors each.")
        if self.kind is BasisKind.EFFECTIVE and self.strength is not None:
            if abs(self[0, 0].inner(self[0, 1])) > STRENGTH_TOLERANCE:
                raise ValidationError("The computational basis (t = 0) must be orthogonal.")
            for t in (1, 2):
                overlap = abs(self[t, 0].inner(self[t, 1]))
                if abs(overlap - self.strength.lam) > STRENGTH_TOLERANCE:
                    raise ValidationError(
                        f"Basis t={t} is not equidistant: |<psi_0|psi_1>| = {overlap!r}, lambda = {self.strength.lam!r}."
                    )

    def __getitem__(self, index: Tuple[int, int]) -> PureState:
        t, k = index
        return self.vectors[t][k]

    def amplitudes(self) -> np.ndarray:
        return np.array([[self.vectors[t][k].amplitudes for k in OUTCOMES] for t in BASES])

    def projectors(self) -> np.ndarray:
        ''' Array of shape (3, 2, 2, 2): ``[t, k]`` -> ``|v><v|``. '''
        amplitudes = self.amplitudes()
        return np.einsum("tki,tkj->tkij", amplitudes, np.conj(amplitudes))


@dataclass(frozen=True, eq=False)
class ProbabilitySet:
    '''
    The six outcome probabilities ``p[t, k]`` measured at strength ``lam``, and
    their constrained sum ``s = p_0t + p_1t`` for the non-orthogonal bases.

    Plug-in estimates from counts set ``estimate``: ``S`` times a frequency may exceed 1,
    so only the lower bound and the sum constraints are checked.
    '''
    p: np.ndarray
    lam: float
    s: float
    estimate: bool = False

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (3, 2):
            raise InvalidProbabilities(f"Expected probabilities indexed [t][k] with shape (3, 2), received {p.shape}.")
        if not np.all(np.isfinite(p)):
            raise InvalidProbabilities(f"Probabilities must be finite, received {p.tolist()}.")
        if np.any(p < -PROBABILITY_TOLERANCE):
            raise InvalidProbabilities(f"Probabilities must be non-negative, received {p.tolist()}.")
        if not self.estimate and np.any(p > 1.0 + PROBABILITY_TOLERANCE):
            raise InvalidProbabilities(f"Probabilities must lie in [0, 1], received {p.tolist()}.")
        if abs(p[0, 0] + p[0, 1] - 1.0) > PROBABILITY_TOLERANCE:
            raise InvalidProbabilities(
                f"Computational-basis probabilities must sum to 1: p00 + p10 = {p[0, 0] + p[0, 1]!r}."
            )
        expected = 1.0 - self.lam + 2.0 * self.lam * p[0, 0]
        for t in (1, 2):
            total = p[t, 0] + p[t, 1]
            if abs(total - expected) > PROBABILITY_TOLERANCE or abs(total - self.s) > PROBABILITY_TOLERANCE:
                raise InvalidProbabilities(
                    f"Basis t={t} violates p0t + p1t = 1 - lambda + 2 lambda p00: "
                    f"{total!r} != {expected!r} (lambda = {self.lam!r})."
                )
        object.__setattr__(self, "p", _frozen(np.clip(p, 0.0, None if self.estimate else 1.0)))

    @classmethod
    def from_table(cls, p, lam: float, estimate: bool = False) -> "ProbabilitySet":
        '''
        Build and validate a set from a ``[t][k]`` table; ``s`` is taken from basis 1.
        '''
        p = np.asarray(p, dtype=float)
        if p.shape != (3, 2):
            raise InvalidProbabilities(f"Expected probabilities indexed [t][k] with shape (3, 2), received {p.shape}.")
        return cls(p=p, lam=float(lam), s=float(p[1, 0] + p[1, 1]), estimate=estimate)

    def get(self, k: int, t: int) -> float:
        ''' Return p_kt (outcome first, as the probabilities are usually written). '''
        return float(self.p[t, k])

    @property
    def p00(self) -> float:
        return float(self.p[0, 0])

    @property
    def p10(self) -> float:
        return float(self.p[0, 1])

    def minimum(self) -> float:
        return float(np.min(self.p))

    def as_dict(self) -> dict:
        return {"lambda": self.lam, "p": self.p.tolist(), "s": self.s}


# ---------------------------------------------------------------------------
# Bases
# ---------------------------------------------------------------------------

def _computational_pair() -> Tuple[PureState, PureState]:
    return PureState(np.array([1, 0], dtype=complex)), PureState(np.array([0, 1], dtype=complex))


def _lambda_form_amplitudes(lam: float) -> np.ndarray:
    ''' Amplitudes (3, 2, 2) of the lambda-form bases; lam may be negative (biorthogonal set). '''
    c = math.sqrt((1.0 + lam) / 2.0)
    s = math.sqrt((1.0 - lam) / 2.0)
    amplitudes = np.zeros((3, 2, 2), dtype=complex)
    amplitudes[0, 0] = [1, 0]
    amplitudes[0, 1] = [0, 1]
    for t in (1, 2):
        for k in OUTCOMES:
            amplitudes[t, k] = [c, (-1) ** k * _PHASE[t] * s]
    return amplitudes


def _basis_set(amplitudes: np.ndarray, kind: BasisKind, strength=None) -> BasisSet:
    vectors = tuple(tuple(PureState(amplitudes[t, k]) for k in OUTCOMES) for t in BASES)
    return BasisSet(vectors=vectors, kind=kind, strength=strength)


def pointer_bases() -> BasisSet:
    '''
    The three pointer bases the experiment measures in: computational, sx and sy
    eigenbases, ``|e_k^1> = (|0> +- |1>)/sqrt2``, ``|e_k^2> = (|0> -+ i|1>)/sqrt2``.
    '''
    r = 1 / math.sqrt(2)
    amplitudes = np.array(
        [
            [[1, 0], [0, 1]],
            [[r, r], [r, -r]],
            [[r, -1j * r], [r, 1j * r]],
        ],
        dtype=complex,
    )
    return _basis_set(amplitudes, BasisKind.POINTER)


def effective_states(strength: MeasurementStrength) -> BasisSet:
    '''
    The effective projection states ``|psi_k^t(lambda)>`` (lambda form).

    Valid at the parallel limit, where every t = 1, 2 vector equals ``|0>``.
    '''
    return _basis_set(_lambda_form_amplitudes(strength.lam), BasisKind.EFFECTIVE, strength)


def effective_states_theta(strength: MeasurementStrength) -> BasisSet:
    '''
    The same states in theta form:
    ``cos(theta)|0> + (-1)^k i sin(theta)|1>`` (t = 1) and
    ``cos(theta)|0> + (-1)^k sin(theta)|1>`` (t = 2).
    '''
    c, s = math.cos(strength.theta), math.sin(strength.theta)
    amplitudes = np.zeros((3, 2, 2), dtype=complex)
    amplitudes[0] = [[1, 0], [0, 1]]
    for k in OUTCOMES:
        sign = (-1) ** k
        amplitudes[1, k] = [c, sign * 1j * s]
        amplitudes[2, k] = [c, sign * s]
    return _basis_set(amplitudes, BasisKind.EFFECTIVE, strength)


def biorthogonal_states(strength: MeasurementStrength) -> BasisSet:
    '''
    The dual bases ``|phi_k^t(lambda)> = |psi_k^t(-lambda)>`` with
    ``<phi_k^t|psi_l^t> = sqrt(1 - lambda^2) delta_kl``; t = 0 is the computational basis.
    '''
    return _basis_set(_lambda_form_amplitudes(-strength.lam), BasisKind.BIORTHOGONAL, strength)


# ---------------------------------------------------------------------------
# Coupling oracle
# ---------------------------------------------------------------------------

def coupling_unitary(theta: float) -> TwoQubitUnitary:
    ''' ``U(theta) = cos(theta) I - i sin(theta) sx (x) sx`` (system (x) pointer). '''
    return TwoQubitUnitary(
        math.cos(theta) * np.eye(4, dtype=complex) - 1j * math.sin(theta) * np.kron(SIGMA_X, SIGMA_X)
    )


def contract_pointer(theta: float, t: int, k: int) -> PureState:
    '''
    One effective state derived from the coupling:
    ``N_kt (I_s (x) <0|_p) U^dagger(theta) (|0>_s (x) |e_k^t>_p)``, normalised and
    with the canonical global phase.

    :raises DegenerateProjection: if the contracted vector vanishes (t=0, k=1 at theta=0)
    '''
    pointer = pointer_bases()[t, k].amplitudes
    joint = np.kron(np.array([1, 0], dtype=complex), pointer)
    evolved = coupling_unitary(theta).dagger().matrix @ joint
    # rows: system index, columns: pointer index
    system = evolved.reshape(2, 2)[:, 0]
    norm = float(np.linalg.norm(system))
    if norm < CONTRACTION_TOLERANCE:
        raise DegenerateProjection(
            f"Pointer contraction for (t={t}, k={k}) vanishes at theta={theta!r}; "
            f"this outcome is never post-selected without coupling."
        )
    return PureState(canonical_phase(system / norm))


def coupling_oracle(theta: float) -> BasisSet:
    '''
    Derive all six effective states from the two-qubit coupling.

    :param theta: measurement strength in [0, pi/4]
    :raises DegenerateProjection: at theta = 0
    '''
    theta = float(theta)
    if not (0.0 <= theta <= math.pi / 4 + STRENGTH_TOLERANCE):
        raise ValidationError(f"theta must lie in [0, pi/4], received {theta!r}.")
    vectors = tuple(tuple(contract_pointer(theta, t, k) for k in OUTCOMES) for t in BASES)
    strength = MeasurementStrength(theta=theta, lam=max(0.0, math.cos(2.0 * theta)))
    logger.debug(f"Coupling oracle evaluated at theta={theta:.6g} (lambda={strength.lam:.6g})")
    return BasisSet(vectors=vectors, kind=BasisKind.EFFECTIVE, strength=strength)


# ---------------------------------------------------------------------------
# Probabilities and reconstruction
# ---------------------------------------------------------------------------

def s_value(p00, strength: MeasurementStrength):
    ''' ``S = 1 - lambda + 2 lambda p00`` (works elementwise on arrays). '''
    return 1.0 - strength.lam + 2.0 * strength.lam * p00


def outcome_probabilities(matrices: np.ndarray, strength: MeasurementStrength) -> np.ndarray:
    '''
    Vectorised ``p[..., t, k] = <psi_k^t| rho |psi_k^t>`` for a stack of density
    matrices of shape ``(..., 2, 2)``. Tiny negative round-off is clamped to zero.
    '''
    amplitudes = _lambda_form_amplitudes(strength.lam)
    p = np.real(np.einsum("tki,...ij,tkj->...tk", np.conj(amplitudes), matrices, amplitudes))
    return np.where((p < 0.0) & (p >= -CLAMP_TOLERANCE), 0.0, p)


def probabilities(rho: DensityMatrix, strength: MeasurementStrength) -> ProbabilitySet:
    '''
    The six outcome probabilities of a (physical) state.

    :raises ConstraintViolation: if the S sum and ``1 - lambda + 2 lambda p00`` disagree
    '''
    if not rho.physical:
        raise ValidationError("Outcome probabilities are only defined for physical (PSD) states.")
    p = outcome_probabilities(rho.matrix, strength)
    s = p[1, 0] + p[1, 1]
    expected = s_value(p[0, 0], strength)
    for t in (1, 2):
        if abs(p[t, 0] + p[t, 1] - expected) > PROBABILITY_TOLERANCE:
            raise ConstraintViolation(
                f"Sum of probabilities in basis t={t} is {p[t, 0] + p[t, 1]!r} but "
                f"1 - lambda + 2 lambda p00 = {expected!r}."
            )
    return ProbabilitySet(p=p, lam=strength.lam, s=float(s))


def reconstruct_matrices(p: np.ndarray, strength: MeasurementStrength) -> np.ndarray:
    '''
    Vectorised linear inversion for tables ``p`` of shape ``(..., 3, 2)``::

        rho = (1 - l^2)^-1 sum_{t=1,2; k} p_kt |phi_k^t><phi_k^t|
              + (1-l)/(1+l) (p00 - 1) |0><0| - (1+l)/(1-l) p00 |1><1|
    '''
    strength.require_complete()
    lam = strength.lam
    p = np.asarray(p, dtype=float)
    phi = _lambda_form_amplitudes(-lam)[1:]
    projectors = np.einsum("tki,tkj->tkij", phi, np.conj(phi))
    p00 = p[..., 0, 0]

    rho = np.einsum("...tk,tkij->...ij", p[..., 1:, :], projectors) / (1.0 - lam * lam)
    rho = rho.astype(complex)
    rho[..., 0, 0] += (1.0 - lam) / (1.0 + lam) * (p00 - 1.0)
    rho[..., 1, 1] -= (1.0 + lam) / (1.0 - lam) * p00
    return 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))


def reconstruct(probs: ProbabilitySet, strength: MeasurementStrength) -> DensityMatrix:
    '''
    Reconstruct the state from its six probabilities by linear inversion in
    the biorthogonal bases. The result is Hermitian with unit trace but is not
    guaranteed to be positive for noisy (estimated) probabilities.

    :raises DegenerateStrength: if lambda >= 1 - 1e-12
    '''
    strength.require_complete()
    if abs(probs.lam - strength.lam) > STRENGTH_TOLERANCE:
        raise InvalidProbabilities(
            f"Probabilities were taken at lambda = {probs.lam!r} but reconstruction was asked for "
            f"lambda = {strength.lam!r}."
        )
    return DensityMatrix(reconstruct_matrices(probs.p, strength), physical=False)


__all__ = [
    "BasisKind",
    "MeasurementStrength",
    "BasisSet",
    "ProbabilitySet",
    "pointer_bases",
    "effective_states",
    "effective_states_theta",
    "biorthogonal_states",
    "coupling_unitary",
    "contract_pointer",
    "coupling_oracle",
    "s_value",
    "outcome_probabilities",
    "probabilities",
    "reconstruct_matrices",
    "reconstruct",
]
