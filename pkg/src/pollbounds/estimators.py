"""Closed-form identification intervals, midpoint estimates and error budgets."""

from __future__ import annotations

import math
import warnings
from typing import Tuple

from .core import (
    ErrorBudget,
    LevelBound,
    NoKnowledge,
    PollDesign,
    Regime,
    ResponseTally,
    ShiftBound,
    StratifiedPoll,
    _check_count,
    _check_proportion,
    _check_real,
    resolve_response_rate,
    two_party_share,
)
from .exceptions import FeasibilityWarning, ValidationError

DEFAULT_CONFIDENCE = 1.96


def _check_rate(rate):
    rate = _check_real(rate, "rate")
    if not 0.0 < rate <= 1.0:
        raise ValidationError(f"rate must lie in (0, 1], got {rate!r}", "rate")
    return rate


def _clip(value: float) -> Tuple[float, bool]:
    if value < 0.0:
        return 0.0, True
    if value > 1.0:
        return 1.0, True
    return value, False


def regime_bounds(regime: Regime) -> Tuple[float, float]:
    """Endpoints of the assumed bound: lambdas, deltas, or (0, 1) for no knowledge."""
    if isinstance(regime, NoKnowledge):
        return 0.0, 1.0
    if isinstance(regime, LevelBound):
        return regime.lambda0, regime.lambda1
    if isinstance(regime, ShiftBound):
        return regime.delta0, regime.delta1
    raise ValidationError(f"unknown regime {regime!r}", "regime")


def midpoint_coefficients(rate: float, regime: Regime) -> Tuple[float, float]:
    """Slope on the respondent share and offset of the midpoint estimate.

    The midpoint estimate is ``slope * m + offset``: the slope is the response
    rate for level-type knowledge and 1 for shift bounds.
    """
    rate = _check_rate(rate)
    lo, hi = regime_bounds(regime)
    slope = 1.0 if isinstance(regime, ShiftBound) else rate
    return slope, 0.5 * (lo + hi) * (1.0 - rate)


def _check_share_feasible(m: float, regime: Regime) -> None:
    if isinstance(regime, ShiftBound):
        lo, hi = regime.feasible_range()
        if not lo <= m <= hi:
            warnings.warn(
                f"respondent share {m:.6g} lies outside the feasible range [{lo:.6g}, {hi:.6g}] "
                f"implied by the shift bounds",
                FeasibilityWarning,
                stacklevel=3,
            )


def _raw_interval(m: float, rate: float, regime: Regime) -> Tuple[float, float]:
    lo, hi = regime_bounds(regime)
    base = m if isinstance(regime, ShiftBound) else m * rate
    return base + lo * (1.0 - rate), base + hi * (1.0 - rate)


def identification_interval(m_or_theta1, rate, regime: Regime, *, return_clipped=False):
    """Interval of population preference consistent with the respondent share.

    Ends are clipped into [0, 1]. With ``return_clipped=True`` the result is
    ``((lo, hi), clipped)``.
    """
    m = _check_proportion(m_or_theta1, "m")
    rate = _check_rate(rate)
    _check_share_feasible(m, regime)
    lo, hi = _raw_interval(m, rate, regime)
    lo, c_lo = _clip(lo)
    hi, c_hi = _clip(hi)
    if return_clipped:
        return (lo, hi), c_lo or c_hi
    return lo, hi


def midpoint_estimate(m, rate, regime: Regime) -> Tuple[float, bool]:
    """Midpoint of the identification interval, clipped into [0, 1].

    Returns ``(estimate, clipped)``.
    """
    m = _check_proportion(m, "m")
    slope, offset = midpoint_coefficients(rate, regime)
    _check_share_feasible(m, regime)
    return _clip(slope * m + offset)


def max_squared_bias(rate, regime: Regime) -> float:
    """Worst-case squared bias of the unclipped midpoint estimate."""
    rate = _check_rate(rate)
    lo, hi = regime_bounds(regime)
    return 0.25 * (hi - lo) ** 2 * (1.0 - rate) ** 2


def variance_maximizer(regime: Regime) -> float:
    """Feasible respondent preference closest to one half (lower value on ties)."""
    if isinstance(regime, ShiftBound):
        lo, hi = regime.feasible_range()
        return min(max(0.5, lo), hi)
    return 0.5


def max_variance(rate, n, regime: Regime) -> float:
    rate = _check_rate(rate)
    n = _check_count(n, "n", 1)
    theta = variance_maximizer(regime)
    slope = 1.0 if isinstance(regime, ShiftBound) else rate
    return slope**2 * theta * (1.0 - theta) / n


def margin_of_sampling_error(n, design_effect=1.0, confidence_multiplier=DEFAULT_CONFIDENCE):
    """Conventional margin of sampling error at maximum binomial variance.

    >>> round(margin_of_sampling_error(1532), 4)
    0.025
    """
    n = _check_count(n, "n", 1)
    design_effect = _check_real(design_effect, "design_effect")
    if design_effect < 1.0:
        raise ValidationError("design_effect must be >= 1", "design_effect")
    confidence_multiplier = _check_real(confidence_multiplier, "confidence_multiplier")
    if confidence_multiplier <= 0.0:
        raise ValidationError("confidence_multiplier must be positive", "confidence_multiplier")
    return confidence_multiplier * math.sqrt(design_effect * 0.25 / n)


def conventional_max_squared_bias(m, rate) -> float:
    """Worst-case squared bias of reporting the raw respondent share ``m``."""
    m = _check_proportion(m, "m")
    rate = _check_rate(rate)
    miss = 1.0 - rate
    return max((m * miss) ** 2, ((1.0 - m) * miss) ** 2)


def _check_multiplier(multiplier):
    multiplier = _check_real(multiplier, "multiplier")
    if multiplier <= 0.0:
        raise ValidationError("multiplier must be positive", "multiplier")
    return multiplier


def budget_from_share(m, rate, n, regime: Regime, multiplier=1.0, design_effect=1.0,
                      confidence_multiplier=DEFAULT_CONFIDENCE) -> ErrorBudget:
    """Error budget from an already computed respondent share."""
    m = _check_proportion(m, "m")
    rate = _check_rate(rate)
    multiplier = _check_multiplier(multiplier)
    _check_share_feasible(m, regime)
    raw_lo, raw_hi = _raw_interval(m, rate, regime)
    lo, c_lo = _clip(raw_lo)
    hi, c_hi = _clip(raw_hi)
    slope, offset = midpoint_coefficients(rate, regime)
    raw_mid = slope * m + offset
    mid, c_mid = _clip(raw_mid)
    var = max_variance(rate, n, regime)
    bias2 = max_squared_bias(rate, regime)
    mse = var + bias2
    return ErrorBudget(
        interval_lo=lo,
        interval_hi=hi,
        midpoint=mid,
        clipped=c_lo or c_hi or c_mid,
        max_variance=var,
        max_squared_bias=bias2,
        max_mse=mse,
        tme=multiplier * math.sqrt(mse),
        mose=margin_of_sampling_error(n, design_effect, confidence_multiplier),
        multiplier=multiplier,
        midpoint_unclipped=raw_mid,
        interval_unclipped=(raw_lo, raw_hi),
    )


def error_budget(poll: PollDesign, tally: ResponseTally, regime: Regime, multiplier=1.0,
                 confidence_multiplier=DEFAULT_CONFIDENCE) -> ErrorBudget:
    """Full error budget for an unstratified poll.

    ``tme`` is ``multiplier * sqrt(max_mse)``; the default multiplier of 1
    reports the plain root of the worst-case mean square error.
    """
    rate = resolve_response_rate(poll)
    m = two_party_share(tally)
    return budget_from_share(m, rate, poll.respondents, regime, multiplier,
                             poll.design_effect, confidence_multiplier)


def _stratum_weights(strata: StratifiedPoll):
    kind = strata.regime_kind
    rows = []
    for s in strata.strata:
        lo, hi = regime_bounds(s.regime)
        p = s.population_share
        miss = (1.0 - s.response_rate) * p
        weight = p if kind == "shift" else s.response_rate * p
        rows.append((s, weight, miss, lo, hi))
    return kind, rows


def stratified_interval(strata: StratifiedPoll, *, return_clipped=False):
    """Identification interval assembled cell by cell."""
    lo, hi, _, clipped = _stratified_interval(strata)
    if return_clipped:
        return (lo, hi), clipped
    return lo, hi


def _stratified_interval(strata):
    kind, rows = _stratum_weights(strata)
    base = math.fsum(w * s.share for s, w, _, _, _ in rows)
    for s, *_ in rows:
        _check_share_feasible(s.share, s.regime)
    raw_lo = base + math.fsum(lo * miss for _, _, miss, lo, _ in rows)
    raw_hi = base + math.fsum(hi * miss for _, _, miss, _, hi in rows)
    lo, c_lo = _clip(raw_lo)
    hi, c_hi = _clip(raw_hi)
    return lo, hi, (raw_lo, raw_hi), c_lo or c_hi


def stratified_budget(strata: StratifiedPoll, multiplier=1.0,
                      confidence_multiplier=DEFAULT_CONFIDENCE) -> ErrorBudget:
    """Error budget of the stratified midpoint estimate.

    Cell shares are independent given the cell sizes, so the worst-case
    variance adds up cell by cell. Bias is worst when every cell sits at the
    same end of its bound, so the per-cell half-widths add before squaring.
    """
    multiplier = _check_multiplier(multiplier)
    kind, rows = _stratum_weights(strata)
    lo, hi, raw, clipped = _stratified_interval(strata)
    raw_mid = math.fsum(w * s.share for s, w, _, _, _ in rows) + math.fsum(
        0.5 * (b0 + b1) * miss for _, _, miss, b0, b1 in rows
    )
    mid, c_mid = _clip(raw_mid)
    var = math.fsum(
        w**2 * variance_maximizer(s.regime) * (1.0 - variance_maximizer(s.regime)) / s.respondents
        for s, w, _, _, _ in rows
    )
    bias2 = 0.25 * math.fsum((b1 - b0) * miss for _, _, miss, b0, b1 in rows) ** 2
    mse = var + bias2
    return ErrorBudget(
        interval_lo=lo,
        interval_hi=hi,
        midpoint=mid,
        clipped=clipped or c_mid,
        max_variance=var,
        max_squared_bias=bias2,
        max_mse=mse,
        tme=multiplier * math.sqrt(mse),
        mose=margin_of_sampling_error(strata.respondents, strata.design_effect,
                                      confidence_multiplier),
        multiplier=multiplier,
        midpoint_unclipped=raw_mid,
        interval_unclipped=raw,
    )
