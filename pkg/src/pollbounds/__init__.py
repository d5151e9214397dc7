"""Midpoint estimates and total margin of error for polls with nonresponse."""

from .core import (
    ErrorBudget,
    LevelBound,
    NoKnowledge,
    PollDesign,
    ResponseTally,
    ShiftBound,
    State,
    StratifiedPoll,
    Stratum,
    bayes_stratum_rate,
    resolve_response_rate,
    stratify,
    two_party_share,
)
from .estimators import (
    conventional_max_squared_bias,
    error_budget,
    identification_interval,
    margin_of_sampling_error,
    max_squared_bias,
    max_variance,
    midpoint_estimate,
    stratified_budget,
    stratified_interval,
)
from .models import NonresponseMidpointEstimator, StratifiedMidpointEstimator
from .oracle import (
    AffineEstimator,
    exact_estimator_mse,
    grid_max_mse,
    minimax_offset_scan,
    monte_carlo_mse,
    stratified_grid_max_mse,
)
from .pollfile import load_poll_spec
from .report import emit_report, tme_sweep

__version__ = "0.1.0"

__all__ = [
    "AffineEstimator",
    "ErrorBudget",
    "LevelBound",
    "NoKnowledge",
    "NonresponseMidpointEstimator",
    "PollDesign",
    "ResponseTally",
    "ShiftBound",
    "State",
    "StratifiedMidpointEstimator",
    "StratifiedPoll",
    "Stratum",
    "bayes_stratum_rate",
    "conventional_max_squared_bias",
    "emit_report",
    "error_budget",
    "exact_estimator_mse",
    "grid_max_mse",
    "identification_interval",
    "load_poll_spec",
    "margin_of_sampling_error",
    "max_squared_bias",
    "max_variance",
    "midpoint_estimate",
    "minimax_offset_scan",
    "monte_carlo_mse",
    "resolve_response_rate",
    "stratified_budget",
    "stratified_grid_max_mse",
    "stratified_interval",
    "stratify",
    "tme_sweep",
    "two_party_share",
]
