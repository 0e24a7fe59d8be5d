#!/usr/bin/env python

"""
Small, exact linear algebra for a single qubit.

The values defined here are immutable: arrays are copied on construction and
marked read-only, so states can be shared freely between worker processes and
threads. Amplitudes are plain Python/NumPy ``complex`` numbers.

Conventions
-----------
* Computational basis ``|0>, |1>``; Pauli matrices in the usual representation.
* A density matrix is written ``rho = (I + b.sigma)/2`` with Bloch vector ``b``.
* The global phase of a state vector is fixed by making its first non-zero
  amplitude real and non-negative (see :func:`canonical_phase`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import BlochOutOfBall, InvalidState

logger = logging.getLogger("dst_tomo.qubit")

NORM_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
ESTIMATE_TRACE_TOLERANCE = 1e-10
PSD_TOLERANCE = -1e-9
BLOCH_TOLERANCE = 1e-12

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])

RealMatrix3 = np.ndarray


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def canonical_phase(amplitudes: np.ndarray) -> np.ndarray:
    '''
    Return ``amplitudes`` multiplied by the global phase that makes the first
    non-zero amplitude real and non-negative.
    '''
    amplitudes = np.asarray(amplitudes, dtype=complex)
    for index, a in enumerate(amplitudes):
        modulus = abs(a)
        if modulus > NORM_TOLERANCE:
            rotated = amplitudes * (np.conj(a) / modulus)
            rotated[index] = modulus
            return rotated
    return amplitudes


def as_real_matrix3(values) -> RealMatrix3:
    '''
    Validate and return a finite, real 3x3 matrix (the carrier used for the
    cost matrix Q and the Fisher matrix F).
    '''
    matrix = np.asarray(values, dtype=float)
    if matrix.shape != (3, 3):
        raise ValueError(f"Expected a 3x3 matrix, received shape {matrix.shape}.")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"Matrix entries must be finite, received:\n{matrix}")
    return _frozen(matrix)


@dataclass(frozen=True, eq=False)
class PureState:
    '''
    A normalised qubit state ``amp0|0> + amp1|1>``.

    :param amplitudes: two complex amplitudes; |amp0|^2 + |amp1|^2 must equal 1 within 1e-12
    '''
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (2,):
            raise InvalidState(f"A qubit state needs exactly two amplitudes, received shape {amplitudes.shape}.")
        if not np.all(np.isfinite(amplitudes)):
            raise InvalidState(f"Amplitudes must be finite, received {amplitudes}.")
        norm = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise InvalidState(
                f"State is not normalised: |amp0|^2 + |amp1|^2 = {norm!r} (tolerance {NORM_TOLERANCE})."
            )
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))

    @classmethod
    def from_unnormalised(cls, amplitudes, fix_phase: bool = True) -> "PureState":
        '''
        Normalise ``amplitudes`` (and optionally fix the global phase).

        :raises InvalidState: if the vector is (numerically) zero
        '''
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = float(np.linalg.norm(amplitudes))
        if norm < NORM_TOLERANCE:
            raise InvalidState(f"Cannot normalise the zero vector {amplitudes}.")
        amplitudes = amplitudes / norm
        if fix_phase:
            amplitudes = canonical_phase(amplitudes)
        return cls(amplitudes)

    @property
    def amp0(self) -> complex:
        return complex(self.amplitudes[0])

    @property
    def amp1(self) -> complex:
        return complex(self.amplitudes[1])

    def inner(self, other: "PureState") -> complex:
        ''' Return <self|other>. '''
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        ''' Return |self><self| as a 2x2 array. '''
        return np.outer(self.amplitudes, np.conj(self.amplitudes))

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())

    def phase_distance(self, other: "PureState") -> float:
        '''
        Largest amplitude deviation between the two states once both have the
        canonical global phase.
        '''
        return float(np.max(np.abs(canonical_phase(self.amplitudes) - canonical_phase(other.amplitudes))))

    def __repr__(self):
        return f"PureState({self.amp0:.6g}, {self.amp1:.6g})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    '''
    A 2x2 Hermitian, unit-trace matrix.

    True states (``physical=True``) must also be positive semidefinite, with
    eigenvalues allowed down to -1e-9 to absorb round-trip noise. Estimates
    produced by linear inversion are built with ``physical=False``: they keep
    the Hermiticity and trace checks but may have a negative eigenvalue.
    '''
    matrix: np.ndarray
    physical: bool = field(default=True)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise InvalidState(f"A qubit density matrix must be 2x2, received shape {matrix.shape}.")
        if not np.all(np.isfinite(matrix)):
            raise InvalidState(f"Density matrix entries must be finite, received:\n{matrix}")
        hermitian_error = float(np.max(np.abs(matrix - matrix.conj().T)))
        if hermitian_error > HERMITIAN_TOLERANCE:
            raise InvalidState(
                f"Density matrix is not Hermitian (max |rho - rho^dagger| = {hermitian_error:.3g}):\n{matrix}"
            )
        trace_tolerance = TRACE_TOLERANCE if self.physical else ESTIMATE_TRACE_TOLERANCE
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > trace_tolerance:
            raise InvalidState(f"Density matrix trace is {trace!r}, expected 1 (tolerance {trace_tolerance}).")
        if self.physical:
            smallest = float(np.min(eigenvalues(matrix)))
            if smallest < PSD_TOLERANCE:
                raise InvalidState(
                    f"Density matrix is not positive semidefinite: smallest eigenvalue {smallest:.3g} "
                    f"(tolerance {PSD_TOLERANCE})."
                )
        object.__setattr__(self, "matrix", _frozen(matrix))

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(IDENTITY / 2)

    def bloch_vector(self) -> np.ndarray:
        ''' Return ``(Tr[rho sx], Tr[rho sy], Tr[rho sz])``. '''
        return bloch_vectors(self.matrix)

    def purity(self) -> float:
        ''' Return Tr[rho^2]. '''
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, state: PureState) -> float:
        ''' Return <psi|rho|psi> for a pure state psi. '''
        return float(np.real(np.vdot(state.amplitudes, self.matrix @ state.amplitudes)))

    def __getitem__(self, index):
        return complex(self.matrix[index])

    def __repr__(self):
        b = self.bloch_vector()
        kind = "" if self.physical else ", estimate"
        return f"DensityMatrix(bloch=({b[0]:.6g}, {b[1]:.6g}, {b[2]:.6g}){kind})"


@dataclass(frozen=True, eq=False)
class TwoQubitUnitary:
    '''
    A 4x4 unitary acting on system (first factor) and pointer (second factor).
    '''
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError(f"A two-qubit unitary must be 4x4, received shape {matrix.shape}.")
        error = float(np.max(np.abs(matrix @ matrix.conj().T - np.eye(4))))
        if error > NORM_TOLERANCE:
            raise ValueError(f"Matrix is not unitary (max |U U^dagger - I| = {error:.3g}).")
        object.__setattr__(self, "matrix", _frozen(matrix))

    def dagger(self) -> "TwoQubitUnitary":
        return TwoQubitUnitary(self.matrix.conj().T)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def eigenvalues(matrix: np.ndarray) -> np.ndarray:
    '''
    Closed-form eigenvalues of a 2x2 Hermitian matrix, ascending.
    '''
    matrix = np.asarray(matrix, dtype=complex)
    half_trace = 0.5 * float(np.real(matrix[0, 0] + matrix[1, 1]))
    half_gap = 0.5 * float(np.real(matrix[0, 0] - matrix[1, 1]))
    radius = float(np.hypot(half_gap, abs(matrix[0, 1])))
    return np.array([half_trace - radius, half_trace + radius])


def bloch_vectors(matrices: np.ndarray) -> np.ndarray:
    '''
    Bloch components ``b_i = Tr[rho sigma_i]`` of one ``(2, 2)`` matrix or a
    stack of shape ``(..., 2, 2)``.
    '''
    matrices = np.asarray(matrices, dtype=complex)
    off_diagonal = matrices[..., 0, 1]
    return np.stack(
        [
            2.0 * np.real(off_diagonal),
            -2.0 * np.imag(off_diagonal),
            np.real(matrices[..., 0, 0] - matrices[..., 1, 1]),
        ],
        axis=-1,
    )


def matrices_from_bloch(bloch: np.ndarray) -> np.ndarray:
    ''' Inverse of :func:`bloch_vectors` for unit-trace matrices; accepts ``(..., 3)``. '''
    bloch = np.asarray(bloch, dtype=float)
    return 0.5 * (IDENTITY + np.einsum("...i,ijk->...jk", bloch, PAULI))


def density_from_bloch(b) -> DensityMatrix:
    '''
    Build ``(I + b.sigma)/2``.

    :param b: three real components with |b| <= 1 (+1e-12)
    :raises BlochOutOfBall: if |b| exceeds 1 beyond tolerance
    '''
    b = np.asarray(b, dtype=float)
    if b.shape != (3,) or not np.all(np.isfinite(b)):
        raise BlochOutOfBall(f"A Bloch vector needs three finite components, received {b!r}.")
    length = float(np.linalg.norm(b))
    if length > 1.0 + BLOCH_TOLERANCE:
        raise BlochOutOfBall(f"Bloch vector {b.tolist()} has length {length!r} > 1; it does not describe a state.")
    return DensityMatrix(matrices_from_bloch(b))


def hs_distance_sq(a: DensityMatrix, b: DensityMatrix) -> float:
    '''
    Squared Hilbert-Schmidt distance ``Tr[(a - b)^2]``.

    Computed entrywise as ``sum |a_ij - b_ij|^2``, which is identical for
    Hermitian arguments and never negative. Estimates need not be PSD.
    '''
    difference = np.asarray(a.matrix) - np.asarray(b.matrix)
    return float(np.sum(np.abs(difference) ** 2))


def spectral_decompose(rho: DensityMatrix) -> Tuple[float, PureState, PureState]:
    '''
    Closed-form spectral decomposition ``rho = x |v0><v0| + (1-x) |v1><v1|``.

    ``x`` is the larger eigenvalue, ``(1 + |b|)/2``. For a degenerate spectrum
    (``rho = I/2``) the computational basis is returned. Both eigenvectors carry
    the canonical global phase.
    '''
    b = rho.bloch_vector()
    radius = float(np.linalg.norm(b))
    x = min(1.0, 0.5 * (1.0 + radius))

    if radius < NORM_TOLERANCE:
        return x, PureState(np.array([1, 0], dtype=complex)), PureState(np.array([0, 1], dtype=complex))

    nx, ny, nz = b / radius
    # Two (parallel) unnormalised eigenvectors of n.sigma; use the better conditioned one.
    upper = np.array([1.0 + nz, nx + 1j * ny])
    lower = np.array([nx - 1j * ny, 1.0 - nz])
    candidate = upper if np.linalg.norm(upper) >= np.linalg.norm(lower) else lower

    v0 = PureState.from_unnormalised(candidate)
    v1 = PureState.from_unnormalised(np.array([-np.conj(v0.amplitudes[1]), np.conj(v0.amplitudes[0])]))
    return x, v0, v1
