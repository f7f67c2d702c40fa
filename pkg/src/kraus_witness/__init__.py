"""Fidelity-difference witness of memory in open quantum dynamics.

The package bundles a self-contained Hermitian linear algebra core, Kraus
channel machinery with small-time structure probes, four exactly solvable
reference models, and the witness layer that scans fidelity differences and
trace-distance revivals.
"""
from .channels import (
    KrausChannel,
    LindbladSet,
    apply,
    channel_defect,
    compose,
    lgks_rhs,
    semigroup_defect,
    validate_cptp,
)
from .errors import (
    CutoffTooSmall,
    DegenerateDenominator,
    DimensionMismatch,
    FidelityOvershoot,
    FitDegenerate,
    GridTooCoarse,
    InvalidChannel,
    InvalidInitialState,
    KrausWitnessError,
    NegativeTime,
    NoConvergence,
    NonHermitian,
    NotHermitian,
    NotPSD,
    NumericalError,
    OracleMismatch,
    ParamOutOfRange,
    TraceNotOne,
    UsageError,
)
from .linalg import (
    Spectrum,
    fidelity,
    hermitian_eig,
    psd_sqrt,
    trace_distance,
    validate_density,
)
from .models import (
    CKDephase,
    DecayFunctions,
    JCMPhoton,
    JCMQubit,
    MODEL_CLASSES,
    ModelSpec,
    YEMarkov,
    YENonMarkov,
    build_model,
    ck_channel,
    ck_fidelity,
    ck_lindblad,
    ck_map_state,
    coherent_amplitudes,
    default_fock_cutoff,
    default_grid,
    default_tau,
    jcm_photon_channel,
    jcm_photon_initial,
    jcm_photon_state,
    jcm_qubit_channel,
    jcm_qubit_state,
    jcm_vacuum_fidelity,
    model_channel,
    model_closed_fidelity,
    model_lindblad,
    model_rate,
    model_state,
    ye_markov_channel,
    ye_markov_fidelity,
    ye_markov_lindblad,
    ye_markov_state,
    ye_nonmarkov_channel,
    ye_nonmarkov_decay,
    ye_nonmarkov_fidelity,
    ye_nonmarkov_state,
)
from .probes import (
    CONST_IDENTITY_DEFICIT,
    LINEAR_T,
    SQRT_T,
    UNCLASSIFIED,
    ExponentReport,
    OperatorFit,
    default_small_time_grid,
    lgks_residual,
    small_time_exponents,
)
from .witnesses import (
    DEFAULT_WITNESS_TOL,
    NO_VIOLATION_FOUND,
    NON_MARKOVIAN_WITNESSED,
    BlpEstimate,
    ScanResult,
    Verdict,
    blp_measure,
    default_blp_grid,
    default_blp_pairs,
    fidelity_difference,
    make_grid,
    markovianity_verdict,
    memory_fidelity,
    scan_G,
)

__version__ = "0.1.0"
