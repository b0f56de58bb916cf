"""Exact and Monte Carlo tools for the random walk on the d-dimensional Manhattan lattice."""

from .exact import (
    BudgetExceeded,
    PathDistribution,
    enumerate_paths,
    evolve,
    exact_distribution,
    exact_mean,
    exact_msd,
    return_probability,
    srw_coupling_check,
)
from .formulas import (
    diffusive_limit,
    increment_mean,
    mean_coefficient,
    msd,
    numerator_divisibility,
    parity_prob_even,
    recurrence_residual,
)
from .lattice import (
    CustomTable,
    IIDCoin,
    Manhattan,
    OrientationRule,
    Step,
    check_line_consistency,
    env_census,
    is_directed_edge,
    local_env,
    out_steps,
)
from .walk import SimConfig, SampleMoments, WalkerState, simulate, step
from .rng import chain_seed

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "PathDistribution", "enumerate_paths", "evolve",
    "exact_distribution", "exact_mean", "exact_msd", "return_probability",
    "srw_coupling_check", "diffusive_limit", "increment_mean", "mean_coefficient",
    "msd", "numerator_divisibility", "parity_prob_even", "recurrence_residual",
    "CustomTable", "IIDCoin", "Manhattan", "OrientationRule", "Step",
    "check_line_consistency", "env_census", "is_directed_edge", "local_env",
    "out_steps", "SimConfig", "SampleMoments", "WalkerState", "simulate", "step",
    "chain_seed",
]
