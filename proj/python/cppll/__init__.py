"""Charge-pump PLL discrete-time models."""

from ._core import (
    AllowedArea,
    InvalidArgument,
    LoopParameters,
    NormalizedGains,
    PllState,
    ReducedParams,
    ReducedState,
    allowed_area,
    classify,
    compare_models,
    from_reduced,
    gains_from_fn_zeta,
    normalized_gains,
    original_step,
    reduced_step,
    run_trajectory,
    simulate_oracle,
    step,
    sweep,
    to_reduced,
)

__all__ = [
    "AllowedArea",
    "InvalidArgument",
    "LoopParameters",
    "NormalizedGains",
    "PllState",
    "ReducedParams",
    "ReducedState",
    "allowed_area",
    "classify",
    "compare_models",
    "from_reduced",
    "gains_from_fn_zeta",
    "normalized_gains",
    "original_step",
    "reduced_step",
    "run_trajectory",
    "simulate_oracle",
    "step",
    "sweep",
    "to_reduced",
]
