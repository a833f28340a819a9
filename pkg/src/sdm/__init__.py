"""Signal diffusion mapping: forecasting with time-varying lags.

A grid-based recursive Bayes filter over the lags linking a leading series
``x`` to a lagging series ``y``, plus the synthetic benchmark families used to
evaluate it.
"""

__version__ = "0.1.0"

from .belief import (
    FLOOR,
    DiffusionEstimator,
    RateEstimator,
    estimate_theta,
    floor_normalize,
    init_beliefs,
    observe_transition_error,
    predict,
    update,
)
from .errors import ConfigurationError, DataError, DegenerateUpdateError, SDMError
from .filter import FilterState, FitResult, StepDiagnostics, run_filter, step
from .metrics import (
    BenchmarkReport,
    ForecastRecord,
    fe_stat,
    rmse,
    run_benchmark,
    run_trial,
)
from .simulation import SimConfig, SimulatedPair, make_pair

__all__ = [
    "FLOOR", "DiffusionEstimator", "RateEstimator", "estimate_theta", "floor_normalize",
    "init_beliefs", "observe_transition_error", "predict", "update",
    "ConfigurationError", "DataError", "DegenerateUpdateError", "SDMError",
    "FilterState", "FitResult", "StepDiagnostics", "run_filter", "step",
    "BenchmarkReport", "ForecastRecord", "fe_stat", "rmse", "run_benchmark", "run_trial",
    "SimConfig", "SimulatedPair", "make_pair",
]
