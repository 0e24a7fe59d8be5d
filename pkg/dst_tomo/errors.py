#!/usr/bin/env python

"""Exception hierarchy for dst-tomo.

Everything raised on purpose by the package derives from :class:`DSTError`.
Bad inputs additionally derive from ``ValueError`` and numerical failures from
``ArithmeticError`` so callers that do not know about this module still catch
them sensibly. The command line maps the two families onto exit codes 2 and 3.
"""


class DSTError(Exception):
    """Base class for all dst-tomo errors."""


# ---------------------------------------------------------------------------
# Validation errors (exit code 2)
# ---------------------------------------------------------------------------

class ValidationError(DSTError, ValueError):
    """An input value is outside of what the model accepts."""


class BlochOutOfBall(ValidationError):
    """A Bloch vector with length greater than one was supplied."""


class InvalidState(ValidationError):
    """A state vector or density matrix fails its invariants."""


class InvalidProbabilities(ValidationError):
    """A probability set fails range or normalisation checks."""


class InvalidConfig(ValidationError):
    """A sweep configuration or option file value is not usable."""


# ---------------------------------------------------------------------------
# Numerical errors (exit code 3)
# ---------------------------------------------------------------------------

class NumericalError(DSTError, ArithmeticError):
    """A computation cannot be carried out for the given values."""


class DegenerateStrength(NumericalError):
    """lambda is at (or numerically at) 1, where the bases are not informationally complete."""


class DegenerateProjection(NumericalError):
    """A pointer contraction produced a (numerically) zero vector."""


class ConstraintViolation(NumericalError):
    """Two independent evaluations of the sum S disagree; signals an internal bug."""


class SingularFisher(NumericalError):
    """An outcome probability is below the floor, so the Fisher matrix does not exist."""


class IllConditioned(NumericalError):
    """The Fisher matrix determinant is too small to invert."""


class NoCrossover(NumericalError):
    """The DST and SIC curves do not change order on the search bracket."""


# ---------------------------------------------------------------------------
# I/O errors (exit code 4)
# ---------------------------------------------------------------------------

class ResultStoreError(DSTError, OSError):
    """The sweep result database could not be reached or written."""
