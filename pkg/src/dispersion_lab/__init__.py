"""Dispersive Lorentz media: constitutive laws, Herglotz measures, dispersion
branches, modal evolution and energy decay."""

from .errors import (
    AssumptionViolated,
    BranchSwapSuspected,
    ClusterSeparationFailure,
    DerivativeVanishes,
    DispersionLabError,
    IllConditioned,
    NonConvergent,
    PoleHit,
    QuadratureFailure,
    RegressionUnstable,
    SchemaError,
    StepTooLarge,
    TruncationError,
    ValidationError,
)
from .material import (
    VACUUM,
    MaterialSpec,
    Oscillator,
    classify_dissipativity,
    dispersion_symbol,
    eval_epsilon,
    eval_mu,
    herglotz_sample,
    load_spec,
    log_polar_grid,
    parse_spec,
    poles_and_zeros,
    validate_assumptions,
)
from .measure import (
    atom_weight,
    kernel_transform,
    kernel_transform_check,
    measure_of,
    reconstruct,
    stieltjes_window,
    susceptibility_kernel,
)
from .dispersion import (
    asymptotic_coefficients,
    band_structure,
    characterization_check,
    group_velocity,
    roots_at_k,
    trace_branches,
    verify_asymptotics,
)
from .modal import build_modal, evolve, rk4_reference, spectral_decomposition, spectrum_consistency
from .decay import (
    InitialDataProfile,
    energy_trace,
    fit_decay_exponent,
    predicted_exponent,
    total_energy,
)

__version__ = "0.1.0"
