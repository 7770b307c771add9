"""Quasiprobability distributions of a truncated harmonic oscillator and
Wigner-map reconstruction from displaced-oscillator autocorrelations."""

from . import kernels
from .campaign import CampaignPlan, ReconstructionReport, error_metrics, reconstruct
from .config import Tolerances, override, tolerances
from .errors import QuasiphaseError, ToleranceError, TruncationError, ValidationError
from .fock_core import (
    DensityMatrix,
    Operator,
    StateVector,
    TruncatedFockSpace,
    annihilation_matrix,
    coherent_state,
    creation_matrix,
    displaced_number_state,
    displacement_matrix,
    displacement_matrix_laguerre,
    matrix_exponential,
    number_matrix,
    number_state,
    parity_matrix,
    required_dim,
)
from .formats import StateSpec, export_map, read_csv, read_json
from .protocol import (
    CALIBRATED_SIGN,
    AutocorrelationSample,
    OscillatorParams,
    ShotEstimate,
    autocorrelation,
    build_hamiltonian,
    calibrate_sign,
    evolve_exact,
    evolve_factored,
    parity_shot_estimator,
    wigner_point_via_autocorr,
)
from .quasiprob import (
    GridSpec,
    QuasiDistributionMap,
    UncontrolledRegimeWarning,
    evaluate_grid,
    f_pure,
    f_series,
    f_trace,
    husimi_q,
    wigner_parity,
)

__version__ = "0.1.0"
BACKEND = kernels.BACKEND
