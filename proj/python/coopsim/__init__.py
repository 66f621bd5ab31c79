"""Python front end for the coopsim C++ core."""

from ._coopsim import (
    ConfigError,
    ModelParams,
    PowerSet,
    RunMetrics,
    StationaryPolicy,
    UnstableChainError,
    admit,
    busy_period_moments,
    compute_d,
    drift_constants,
    exact_busy_period_moments,
    frame_length_bounds,
    generator,
    grid_search,
    optimal_two_point,
    reference_params,
    run_episode,
    solve_frame,
    steady_state,
    sweep_v,
    throughput_lower_bound,
    two_point_params,
)

__all__ = [
    "ConfigError",
    "ModelParams",
    "PowerSet",
    "RunMetrics",
    "StationaryPolicy",
    "UnstableChainError",
    "admit",
    "busy_period_moments",
    "compute_d",
    "drift_constants",
    "exact_busy_period_moments",
    "frame_length_bounds",
    "generator",
    "grid_search",
    "optimal_two_point",
    "reference_params",
    "run_episode",
    "solve_frame",
    "steady_state",
    "sweep_v",
    "throughput_lower_bound",
    "two_point_params",
]
