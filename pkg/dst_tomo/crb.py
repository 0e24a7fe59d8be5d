#!/usr/bin/env python

"""
Cramer-Rao analysis of the DST reconstruction error.

The error of an estimate is the squared Hilbert-Schmidt distance
``E^2 = Tr[(rho - rho_hat)^2]``. Written in the three independent probability
deviations ``(dp00, dp01, dp02)`` it is the quadratic form ``dp^T Q dp``; the
Cramer-Rao inequality then bounds the mean error per trial by ``Tr(Q F^-1)``
where ``F`` is the Fisher matrix per trial of the (constrained) likelihood.

Both the numeric route (build Q and F, invert F exactly) and the closed form
are available; they agree to rounding for interior probabilities, and the
closed form stays finite when a probability reaches the boundary.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import IllConditioned, SingularFisher
from .model import MeasurementStrength, ProbabilitySet
from .qubit import RealMatrix3, as_real_matrix3
from .sampling import Ensemble

logger = logging.getLogger("dst_tomo.crb")

PROBABILITY_FLOOR = 1e-12
DETERMINANT_FLOOR = 1e-300
SERIES_THRESHOLD = 1e-2
SERIES_TERMS = 10


class CrbMethod(enum.Enum):
    NUMERIC_INVERSION = "numeric"
    CLOSED_FORM = "closed"


@dataclass(frozen=True, eq=False)
class CrbReport:
    '''
    Result of one bound evaluation.

    :param q: cost matrix Q
    :param fisher: Fisher matrix per trial; ``None`` when a probability is on the boundary
        (only possible for the closed form)
    :param bound: minimum mean squared HS distance per trial, ``<E^2_min>``
    :param method: how ``bound`` was obtained
    '''
    q: RealMatrix3
    fisher: Optional[RealMatrix3]
    bound: float
    method: CrbMethod

    def __post_init__(self):
        if not np.allclose(self.q, self.q.T, rtol=0.0, atol=1e-12):
            raise ValueError("The cost matrix Q must be symmetric.")
        if not (math.isfinite(self.bound) and self.bound >= 0.0):
            raise ValueError(f"Cramer-Rao bound must be finite and non-negative, received {self.bound!r}.")

    @property
    def e_min(self) -> float:
        ''' Root of the bound, the quantity plotted against lambda. '''
        return math.sqrt(self.bound)

    def as_dict(self) -> dict:
        return {
            "method": self.method.value,
            "bound": self.bound,
            "e_min": self.e_min,
            "q": self.q.tolist(),
            "fisher": None if self.fisher is None else self.fisher.tolist(),
        }


def adjugate_inverse(matrix: np.ndarray):
    '''
    Exact inverse of a 3x3 matrix (or a stack ``(..., 3, 3)``) through its
    adjugate: with columns a, b, c the rows of the inverse are
    ``b x c``, ``c x a``, ``a x b`` divided by ``det = a . (b x c)``.

    :return: ``(inverse, determinant)``
    '''
    matrix = np.asarray(matrix, dtype=float)
    a, b, c = matrix[..., :, 0], matrix[..., :, 1], matrix[..., :, 2]
    rows = np.stack([np.cross(b, c), np.cross(c, a), np.cross(a, b)], axis=-2)
    determinant = np.einsum("...i,...i->...", a, np.cross(b, c))
    with np.errstate(divide="ignore", invalid="ignore"):
        inverse = rows / determinant[..., None, None]
    return inverse, determinant


def q_matrix(strength: MeasurementStrength) -> RealMatrix3:
    '''
    ``Q = 2/(1 - l^2) [[1 + l^2, -l, -l], [-l, 1, 0], [-l, 0, 1]]``.

    :raises DegenerateStrength: for lambda >= 1 - 1e-12
    '''
    strength.require_complete()
    lam = strength.lam
    q = np.array(
        [
            [1.0 + lam * lam, -lam, -lam],
            [-lam, 1.0, 0.0],
            [-lam, 0.0, 1.0],
        ]
    )
    return as_real_matrix3(2.0 / (1.0 - lam * lam) * q)


def fisher_matrix(probs: ProbabilitySet, strength: MeasurementStrength, floor: float = PROBABILITY_FLOOR) -> RealMatrix3:
    '''
    Fisher matrix per trial with respect to ``(p00, p01, p02)``::

        F00 = 1/p00 + 1/p10 + (4 l^2/S)(1/p11 + 1/p12) - 8 l^2/S^2
        F0t = Ft0 = -2 l/(S p1t)
        Ftr = (1/S)(1/p0t + 1/p1t) delta_tr,   t, r = 1, 2

    :raises SingularFisher: if any probability is below ``floor``
    '''
    if probs.minimum() < floor:
        raise SingularFisher(
            f"Fisher matrix is singular: smallest outcome probability {probs.minimum():.3g} is below {floor:g}. "
            f"The state is (nearly) aligned with an effective basis vector; use the closed-form bound instead."
        )
    lam, s, p = strength.lam, probs.s, probs.p
    f = np.zeros((3, 3))
    f[0, 0] = (
        1.0 / p[0, 0]
        + 1.0 / p[0, 1]
        + 4.0 * lam * lam / s * (1.0 / p[1, 1] + 1.0 / p[2, 1])
        - 8.0 * lam * lam / (s * s)
    )
    for t in (1, 2):
        f[0, t] = f[t, 0] = -2.0 * lam / (s * p[t, 1])
        f[t, t] = (1.0 / p[t, 0] + 1.0 / p[t, 1]) / s
    return as_real_matrix3(f)


def crb_numeric(probs: ProbabilitySet, strength: MeasurementStrength) -> CrbReport:
    '''
    ``Tr(Q F^-1)`` with F inverted exactly.

    :raises SingularFisher: for boundary probabilities
    :raises IllConditioned: if ``|det F| < 1e-300``
    '''
    q = q_matrix(strength)
    f = fisher_matrix(probs, strength)
    inverse, determinant = adjugate_inverse(f)
    if abs(determinant) < DETERMINANT_FLOOR:
        raise IllConditioned(f"Fisher matrix determinant {determinant:.3g} is too small to invert.")
    bound = float(np.trace(q @ inverse))
    return CrbReport(q=q, fisher=f, bound=bound, method=CrbMethod.NUMERIC_INVERSION)


def closed_bound(p: np.ndarray, strength: MeasurementStrength) -> np.ndarray:
    '''
    Vectorised closed-form bound for probability tables of shape ``(..., 3, 2)``::

        2/(1 - l^2) [ (1 + l^2) p00 p10 + p01 p11 + p02 p12
                      - (4 l^2/S^2) p00 p10 (p01 p11 + p02 p12) ]
    '''
    strength.require_complete()
    lam = strength.lam
    p = np.asarray(p, dtype=float)
    computational = p[..., 0, 0] * p[..., 0, 1]
    non_orthogonal = p[..., 1, 0] * p[..., 1, 1] + p[..., 2, 0] * p[..., 2, 1]
    s = 1.0 - lam + 2.0 * lam * p[..., 0, 0]
    return (2.0 / (1.0 - lam * lam)) * (
        (1.0 + lam * lam) * computational + non_orthogonal - 4.0 * lam * lam / (s * s) * computational * non_orthogonal
    )


def crb_closed(probs: ProbabilitySet, strength: MeasurementStrength) -> CrbReport:
    '''
    Closed-form bound; needs no inversion, so it is finite on the boundary.

    :raises DegenerateStrength: for lambda >= 1 - 1e-12
    '''
    q = q_matrix(strength)
    fisher = fisher_matrix(probs, strength) if probs.minimum() >= PROBABILITY_FLOOR else None
    bound = float(closed_bound(probs.p, strength))
    return CrbReport(q=q, fisher=fisher, bound=bound, method=CrbMethod.CLOSED_FORM)


def pure_crb(x, strength: MeasurementStrength):
    '''
    Bound for a pure state with ``x = |<0|psi>|^2``::

        S^2/(1 - l^2) + 8 l^2 x^2 (1 - x)^2 / S^2,   S = 1 - l + 2 l x

    Elementwise on arrays.
    '''
    strength.require_complete()
    lam = strength.lam
    x = np.asarray(x, dtype=float)
    s = 1.0 - lam + 2.0 * lam * x
    value = s * s / (1.0 - lam * lam) + 8.0 * lam * lam * x * x * (1.0 - x) ** 2 / (s * s)
    return float(value) if value.ndim == 0 else value


def _arctanh(lam: float) -> float:
    return 0.5 * (math.log1p(lam) - math.log1p(-lam))


def pure_average(strength: MeasurementStrength) -> float:
    '''
    Bound averaged over Haar-random pure states::

        (3 + l^2)/(3(1 - l^2)) + 2(3 - 2 l^2)/(3 l^2) - 2(1 - l^2) arctanh(l)/l^3

    The lambda -> 0 singularity is removable; the value there is exactly 1 and
    small lambda uses the series ``1 + sum_n [4/3 + 4/((2n+1)(2n+3))] l^(2n)``,
    avoiding the cancellation between the last two terms.
    '''
    strength.require_complete()
    lam = strength.lam
    if lam == 0.0:
        return 1.0
    if lam < SERIES_THRESHOLD:
        return 1.0 + sum(
            (4.0 / 3.0 + 4.0 / ((2 * n + 1) * (2 * n + 3))) * lam ** (2 * n) for n in range(1, SERIES_TERMS + 1)
        )
    lam2 = lam * lam
    return (
        (3.0 + lam2) / (3.0 * (1.0 - lam2))
        + 2.0 * (3.0 - 2.0 * lam2) / (3.0 * lam2)
        - 2.0 * (1.0 - lam2) / lam ** 3 * _arctanh(lam)
    )


def mub_mixed_average(ensemble: Ensemble = Ensemble.BURES_MIXED) -> float:
    '''
    Exact ensemble mean of the lambda = 0 bound.

    At lambda = 0 the bound is ``(3 - r^2)/2`` in the Bloch radius r, so only
    ``<r^2>`` matters: 9/8 for Bures states, 1 for pure states.
    '''
    return (3.0 - ensemble.mean_bloch_radius_sq()) / 2.0


__all__ = [
    "CrbMethod",
    "CrbReport",
    "adjugate_inverse",
    "q_matrix",
    "fisher_matrix",
    "crb_numeric",
    "closed_bound",
    "crb_closed",
    "pure_crb",
    "pure_average",
    "mub_mixed_average",
]
