"""Tightened quantum speed limits from basis-resolved uncertainty relations.

The package computes Mandelstam-Tamm style bounds together with their
tightened versions for pure and mixed states under unitary evolution, and
ships experiment runners that reproduce the delta = tau_tqsl - tau_mt >= 0
sweeps for random Hamiltonians and a small interacting spin chain.
"""

from .bounds import (
    BOUND_CSV_HEADER,
    BoundReport,
    OptimizerConfig,
    QuadratureInfo,
    bound_series,
    combined_bound_orthogonal,
    correction_samples,
    integrate_correction,
    mixed_geodesic_term,
    mt_bound_pure,
    optimize_basis,
    tqsl_mixed,
    tqsl_pure,
)
from .dynamics import (
    Trajectory,
    bargmann_angle_mixed,
    bargmann_angle_pure,
    evolve_mixed,
    evolve_pure,
    sample_trajectory,
)
from .ensembles import (
    GueConfig,
    SpinChainConfig,
    random_basis,
    sample_gue,
    sample_gue_batch,
    spin_chain_evolved_state,
    spin_chain_hamiltonian,
)
from .errors import (
    BlockIndexOutOfRange,
    BoundViolation,
    ConfigError,
    DenominatorUnderflow,
    DimensionMismatch,
    InvalidBasis,
    NonFiniteSample,
    NonHermitianInput,
    NonPositiveMeanEnergy,
    NonRealExpectation,
    NotPositiveSemidefinite,
    NotProductState,
    QslError,
    SingularIntegrand,
    ValidityExceeded,
    ZeroEnergyVariance,
)
from .experiments import (
    ExperimentConfig,
    default_initial_state,
    run_experiment_gue,
    run_experiment_spin,
    run_property_suite,
)
from .linalg import (
    EigenDecomposition,
    eigh,
    expm_i_hermitian,
    hermitian_defect,
    kron,
    sqrtm_psd,
)
from .states import (
    DensityMatrix,
    Observable,
    OrthonormalBasis,
    PureState,
    basis_from_observable,
    centered,
    expectation,
    ket_from_json,
    ket_to_json,
    matrix_from_json,
    matrix_to_json,
    purity,
    variance,
)
from .uncertainty import (
    UncertaintyReport,
    correction_k_mixed,
    correction_k_pure,
    cross_term,
    moment_identity_residual,
    robertson_schrodinger_bound,
    tighter_bound_mixed,
    tighter_bound_pure,
    uncertainty_report,
)

__version__ = "0.1.0"
