"""One-count (quantum jump) operators in a truncated single-mode Fock space."""

from .errors import NoAcceptedTrials, ZeroJumpWeight
from .experiment import (
    DiscriminationResult,
    EstimateReport,
    ExperimentConfig,
    TrialRecord,
    absorption_trial,
    discriminate,
    run_experiment,
    sample_initial,
)
from .figures import SweepTable, sweep_figure
from .fock import (
    DensityMatrix,
    PhotonStatistics,
    StatePrep,
    absorption_rate,
    photon_statistics,
    prepare_coherent,
    prepare_fock,
    prepare_squeezed_vacuum,
    prepare_thermal,
)
from .jc import JCParams, conditioned_field_state, excitation_probability, jc_unitary
from .jumps import (
    A,
    E,
    N,
    Beta,
    H,
    JumpModel,
    JumpOutcome,
    LoweringOperator,
    apply_jump,
    chi0_branches,
    lowering_operator,
    mean_after_jump,
    predict_distribution,
    predict_pn,
)

__version__ = "0.1.0"
