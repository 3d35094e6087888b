"""kpilab: pseudo-spectral KP-I simulator and verification laboratory."""

from .errors import (
    BlowupDetected,
    ComputeError,
    ConstraintViolation,
    ContractError,
    ConvergenceFailure,
    DegenerateDerivative,
    DomainError,
    DomainTooSmall,
    FormatError,
    GridIncompatible,
    HyperplaneViolation,
    KpilabError,
    SymmetryViolation,
)
from .spectral import (
    FrequencyPair,
    Grid,
    RealField,
    SpectralField,
    apply_linear_group,
    bump_chi,
    dispersion_symbol,
    energy,
    energy_norm,
    forward_transform,
    hamiltonian_c,
    inverse_transform,
    l2_norm,
    lp_projector,
    lp_projector_leq,
    mass,
    project_zero_x_mean,
    weight_p,
    x_antiderivative,
    x_derivative,
    y_derivative,
)
from .solver import (
    DiagnosticsRecord,
    SolverConfig,
    evolve,
    nonlinear_term,
    rescale,
    stationarity_residual,
    step,
)
from .soliton import (
    CRITICAL_SPEED,
    SolitonParams,
    SpectrumResult,
    StabilityRunConfig,
    StabilityRunResult,
    critical_speed_scan,
    hessian_form,
    linearized_operator_matrix,
    min_eigenvalue,
    orbital_distance,
    run_stability_experiment,
    soliton_profile,
    verify_exact_eigenfunction,
)
from .analysis import (
    LevelSetQuery,
    ResonanceTriple,
    SectionedSet,
    anisotropic_sobolev_check,
    level_set_measure,
    parabola_level_measure,
    random_band_limited_field,
    resonance,
    resonance_gradient_q1,
    run_verify,
    section_projection_measure,
)

__version__ = "0.1.0"
