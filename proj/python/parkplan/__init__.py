"""Parking maneuver planning by successive convexification."""

from parkplan._core import (  # noqa: F401
    CarControl,
    CarState,
    CostWeights,
    IterationRecord,
    ModelParams,
    MultiSegmentSolution,
    RsPath,
    Scenario,
    ScvxParams,
    SegmentTrajectory,
    ViolationReport,
    dynamics,
    eta_star,
    foh_coefficients,
    jacobians,
    parallel_parking,
    reverse_parking,
    rs_sample,
    rs_shortest_path,
    sample_start,
    scenario_from_json,
    scvx_run,
    validate_trajectory,
)

__all__ = [name for name in dir() if not name.startswith("_")]
