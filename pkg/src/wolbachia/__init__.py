"""Simulation and analysis toolkit for a stochastic two-type mosquito model."""

from .model import (
    DerivedQuantities,
    Equilibria,
    GammaLaw,
    InvalidParamsError,
    ModelParams,
    NoStationaryLawError,
    NotApplicableError,
    Regime,
    RegimeTag,
    Species,
    State,
    classify,
    classify_with_tolerance,
    derive,
    drift,
    equilibria,
    gamma_moment,
    long_run_mean,
    predicted_extinction_exponent,
    stationary_law,
)
from .rng import NoiseStream, path_generator
from .sde import (
    CoupledTrajectories,
    NonFiniteError,
    SimConfig,
    Trajectory,
    simulate_boundary,
    simulate_coupled,
    simulate_path,
    truncated_em_step,
)
from .analysis import (
    EmptyWindowError,
    KsResult,
    OccupationHistogram,
    SlopeEstimate,
    TooFewSamplesError,
    gamma_cdf,
    ks_test,
    lyapunov_exponent,
    min_statistic,
    occupation_measure,
    spaced_samples,
    time_average,
)
from .experiments import (
    Check,
    CheckResult,
    EnsembleSummary,
    Scenario,
    UnknownScenarioError,
    Verdict,
    builtin_scenarios,
    ensemble_summary,
    get_scenario,
    run_scenario,
    verdict_as_dict,
)
from .config import ConfigError, RunConfig, load_run_config

__version__ = "0.1.0"

__all__ = [
    "DerivedQuantities",
    "Equilibria",
    "GammaLaw",
    "InvalidParamsError",
    "ModelParams",
    "NoStationaryLawError",
    "NotApplicableError",
    "Regime",
    "RegimeTag",
    "Species",
    "State",
    "classify",
    "classify_with_tolerance",
    "derive",
    "drift",
    "equilibria",
    "gamma_moment",
    "long_run_mean",
    "predicted_extinction_exponent",
    "stationary_law",
    "NoiseStream",
    "path_generator",
    "CoupledTrajectories",
    "NonFiniteError",
    "SimConfig",
    "Trajectory",
    "simulate_boundary",
    "simulate_coupled",
    "simulate_path",
    "truncated_em_step",
    "EmptyWindowError",
    "KsResult",
    "OccupationHistogram",
    "SlopeEstimate",
    "TooFewSamplesError",
    "gamma_cdf",
    "ks_test",
    "lyapunov_exponent",
    "min_statistic",
    "occupation_measure",
    "spaced_samples",
    "time_average",
    "Check",
    "CheckResult",
    "EnsembleSummary",
    "Scenario",
    "UnknownScenarioError",
    "Verdict",
    "builtin_scenarios",
    "ensemble_summary",
    "get_scenario",
    "run_scenario",
    "verdict_as_dict",
    "ConfigError",
    "RunConfig",
    "load_run_config",
    "__version__",
]
