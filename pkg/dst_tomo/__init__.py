"""
dst-tomo
========

Direct state tomography (DST) of a qubit: the measurement as projections onto
non-orthogonal effective bases, linear-inversion reconstruction, Cramer-Rao
bounds for any measurement strength, and Monte-Carlo sweeps comparing DST with
SIC-POVM tomography.

Main components:
- qubit: PureState, DensityMatrix and small closed-form 2x2 linear algebra
- model: MeasurementStrength, effective/biorthogonal bases, the coupling oracle,
  probabilities and reconstruction
- crb: Q and Fisher matrices, numeric and closed-form bounds, pure-state average
- sic: the tetrahedron SIC-POVM baseline
- sampling: counter-based RandomStream, Haar pure and Bures mixed ensembles
- experiment: finite-shot simulation, plug-in estimator, empirical MSE and Fisher
- sweep: ensemble averages over lambda grids, crossover search, CSV/SVG output
- ResultsDatabase: optional SQLAlchemy store for sweep results

Example usage:
    >>> from dst_tomo import MeasurementStrength, DensityMatrix, probabilities, reconstruct, crb_closed
    >>>
    >>> strength = MeasurementStrength.from_lambda(0.5)
    >>> rho = DensityMatrix.maximally_mixed()
    >>> probs = probabilities(rho, strength)
    >>> round(crb_closed(probs, strength).bound, 6)  # 11/6
    1.833333
    >>>
    >>> # Average over 10^5 Haar-random pure states
    >>> from dst_tomo import Ensemble, RandomStream, ensemble_average
    >>> mean, stderr = ensemble_average(strength, Ensemble.PURE_HAAR, 100000, RandomStream(seed=1))
"""

__version__ = "0.1.0"
__author__ = "dst-tomo developers"

from .errors import (
    DSTError,
    ValidationError,
    NumericalError,
    BlochOutOfBall,
    InvalidState,
    InvalidProbabilities,
    InvalidConfig,
    DegenerateStrength,
    DegenerateProjection,
    ConstraintViolation,
    SingularFisher,
    IllConditioned,
    NoCrossover,
    ResultStoreError,
)
from .qubit import (
    PureState,
    DensityMatrix,
    TwoQubitUnitary,
    density_from_bloch,
    hs_distance_sq,
    spectral_decompose,
)
from .model import (
    MeasurementStrength,
    BasisSet,
    ProbabilitySet,
    effective_states,
    biorthogonal_states,
    coupling_oracle,
    probabilities,
    reconstruct,
)
from .crb import (
    CrbReport,
    q_matrix,
    fisher_matrix,
    crb_numeric,
    crb_closed,
    pure_crb,
    pure_average,
)
from .sic import sic_probabilities, sic_reconstruct, sic_crb
from .sampling import Ensemble, RandomStream, MixedParam, sample_pure, sample_bures, sample_mixed_param, bures_icdf
from .experiment import CountRecord, EmpiricalResult, simulate_counts, estimate_state, empirical_mse, empirical_fisher
from .sweep import (
    SweepConfig,
    SweepRow,
    ensemble_average,
    sic_ensemble_average,
    find_crossover,
    find_mixed_crossover,
    run_sweep,
)

__all__ = [
    "DSTError",
    "ValidationError",
    "NumericalError",
    "BlochOutOfBall",
    "InvalidState",
    "InvalidProbabilities",
    "InvalidConfig",
    "DegenerateStrength",
    "DegenerateProjection",
    "ConstraintViolation",
    "SingularFisher",
    "IllConditioned",
    "NoCrossover",
    "ResultStoreError",
    "PureState",
    "DensityMatrix",
    "TwoQubitUnitary",
    "density_from_bloch",
    "hs_distance_sq",
    "spectral_decompose",
    "MeasurementStrength",
    "BasisSet",
    "ProbabilitySet",
    "effective_states",
    "biorthogonal_states",
    "coupling_oracle",
    "probabilities",
    "reconstruct",
    "CrbReport",
    "q_matrix",
    "fisher_matrix",
    "crb_numeric",
    "crb_closed",
    "pure_crb",
    "pure_average",
    "sic_probabilities",
    "sic_reconstruct",
    "sic_crb",
    "Ensemble",
    "RandomStream",
    "MixedParam",
    "sample_pure",
    "sample_bures",
    "sample_mixed_param",
    "bures_icdf",
    "CountRecord",
    "EmpiricalResult",
    "simulate_counts",
    "estimate_state",
    "empirical_mse",
    "empirical_fisher",
    "SweepConfig",
    "SweepRow",
    "ensemble_average",
    "sic_ensemble_average",
    "find_crossover",
    "find_mixed_crossover",
    "run_sweep",
]
