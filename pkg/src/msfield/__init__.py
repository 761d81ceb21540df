"""Pseudospectral fixed-point solver for magnetic Schrodinger / vector wave dynamics."""

from .config import RunConfig, build_run, load_config, parse_config
from .coupler import (
    AdaptiveResult,
    InitialData,
    PicardConfig,
    adaptive_horizon,
    picard_solve,
    z_metric,
)
from .errors import ConfigError, HorizonTooLarge, IterationLimitExceeded, NumericalAbort
from .fields import (
    FieldState,
    PhysicalParams,
    TrajectoryPair,
    WaveFunction,
    exchange_symmetrize,
    load_snapshot,
    marginal_integrate,
    normalize,
    save_snapshot,
)
from .runner import RunResult, run_scenario
from .schrodinger import CoulombSpec, StepperConfig, evolve_schrodinger
from .spectral import (
    ScalarField,
    SpectralGrid,
    VectorField,
    apply_multiplier,
    lebesgue_norm,
    sobolev_norm,
    spacetime_norm,
)

__all__ = [
    "RunConfig",
    "build_run",
    "load_config",
    "parse_config",
    "AdaptiveResult",
    "InitialData",
    "PicardConfig",
    "adaptive_horizon",
    "picard_solve",
    "z_metric",
    "RunResult",
    "run_scenario",
    "CoulombSpec",
    "StepperConfig",
    "evolve_schrodinger",
    "ConfigError",
    "HorizonTooLarge",
    "IterationLimitExceeded",
    "NumericalAbort",
    "FieldState",
    "PhysicalParams",
    "TrajectoryPair",
    "WaveFunction",
    "exchange_symmetrize",
    "load_snapshot",
    "marginal_integrate",
    "normalize",
    "save_snapshot",
    "ScalarField",
    "SpectralGrid",
    "VectorField",
    "apply_multiplier",
    "lebesgue_norm",
    "sobolev_norm",
    "spacetime_norm",
]

__version__ = "0.1.0"
