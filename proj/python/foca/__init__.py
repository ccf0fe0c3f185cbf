"""Feature-ODE caching schemes and diagnostics.

Thin wrapper around the C++ core: cache schedules, the reuse / Taylor /
BDF2 / forecast-then-calibrate predictors, cached-run execution, and the
error-bound diagnostics.
"""

from foca._core import (
    BoundaryError,
    CacheSchedule,
    CacheState,
    ConfigError,
    HistoryError,
    NumericError,
    PredictorKind,
    Prop1Report,
    RangeError,
    RunReport,
    StepRecord,
    TrajectorySource,
    denoiser_source,
    estimate_derivative,
    finite_differences,
    foca_step,
    linear_source,
    local_truncation_error,
    mmd_sample_quality,
    predict_bdf2,
    predict_reuse,
    predict_taylor,
    relative_error,
    run_cached_sampler,
    stiffness_index,
    train_denoiser,
    verify_proposition1,
)

__all__ = [
    "BoundaryError",
    "CacheSchedule",
    "CacheState",
    "ConfigError",
    "HistoryError",
    "NumericError",
    "PredictorKind",
    "Prop1Report",
    "RangeError",
    "RunReport",
    "StepRecord",
    "TrajectorySource",
    "denoiser_source",
    "estimate_derivative",
    "finite_differences",
    "foca_step",
    "linear_source",
    "local_truncation_error",
    "mmd_sample_quality",
    "predict_bdf2",
    "predict_reuse",
    "predict_taylor",
    "relative_error",
    "run_cached_sampler",
    "stiffness_index",
    "train_denoiser",
    "verify_proposition1",
]
