"""Stochastic sulphation simulations.

A bounded mean-reverting diffusion drives the left boundary of a
nonlinear reaction-diffusion system for gypsum concentration and calcite
density.  The package provides the boundary-preserving SDE scheme, the
explicit splitting scheme for the coupled fields, and the Monte Carlo
estimators (strong errors, spatial orders, field statistics, RMSD maps)
on top, plus a CLI that writes plot-ready CSV artifacts.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .ensemble import (
    AccuracyStudy,
    ConvergenceStudy,
    EnsembleResult,
    FieldStatistics,
    KsResult,
    field_statistics,
    fit_order,
    ks_invariant,
    rmsd,
    run_ensemble,
    spatial_accuracy,
    strong_errors,
)
from .errors import (
    ConfigParseError,
    DomainViolation,
    GammaNotBelowEta,
    GridMismatch,
    GridsNotNested,
    InitialCalciteTooLarge,
    InsufficientPaths,
    NonFiniteState,
    NonPositiveCoefficient,
    NuConditionViolated,
    ParameterError,
    SimulationError,
    StabilityViolated,
    StepTooLarge,
    TimeStepTooLarge,
)
from .heat import Grid1D, grid_norm, solve_heat, spectral_bound_check, step_heat
from .lamperti import LampertiDrift, coefficients, drift, drift_derivative, forward, inverse
from .lsst import (
    SdePath,
    TruncationSpec,
    delta_star,
    deterministic_boundary,
    em_step,
    make_truncation,
    sample_path,
    sample_paths,
    truncated_drift,
)
from .pearson import (
    BoundaryClassification,
    PearsonParams,
    classify_boundaries,
    invariant_cdf,
    invariant_density,
    scale_density,
    speed_density,
    validate,
)
from .sulphation import (
    BoundaryPair,
    Diagnostics,
    MaterialParams,
    SolutionFields,
    boundary_pair,
    calcite_closed_form,
    check_conditions,
    porosity,
    solve_direct,
    solve_many,
    solve_system,
    step_sc,
    step_vc,
    validate_material,
)
from .config import ExperimentConfig, config_hash, load_config

__all__ = [name for name in dir() if not name.startswith("_")]
