"""Adaptive burst control of a pendulum: harmonic balance, simulation, slow model and tuning."""

from ._core import (
    AdaptationRule,
    AdaptiveParams,
    CostBranch,
    DesignPoint,
    Error,
    HBSolution,
    InitialCondition,
    Objectives,
    PlantParams,
    SimTrace,
    SlowGains,
    SlowRegime,
    SlowVerdict,
    TuningReport,
    UncertaintyInterval,
    WorstCase,
    amplitude_curve,
    bifurcation_gamma,
    classify,
    cost,
    describing_fn,
    fixed_point,
    freq_response,
    gamma_opt,
    hb_amplitude,
    iterate,
    make_gains,
    measure_objectives,
    predicted_amplitude_error,
    run_closed_loop,
    solve_design_point,
    solve_hb,
    step_error,
    tune,
    worst_case,
)

__all__ = [name for name in dir() if not name.startswith("_")]
