"""Brute-force checks of the closed-form error budgets.

Nothing in this module calls the closed-form maxima in
:mod:`pollbounds.estimators`. MSE is evaluated exactly at each state of the
binomial sampling model and maximized by enumeration; Monte Carlo simulates the
sampling process itself.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import stats

from .core import (
    LevelBound,
    NoKnowledge,
    Regime,
    ShiftBound,
    State,
    StratifiedPoll,
    _check_count,
    _check_real,
)
from .exceptions import TooManyStrataForOracle, ValidationError

DEFAULT_GRID = 2001
DEFAULT_REPLICATIONS = 100_000
MC_BLOCK = 8192
MAX_ORACLE_STRATA = 3


@dataclass(frozen=True)
class AffineEstimator:
    """Estimator ``slope * m + offset`` of population preference."""

    slope: float
    offset: float

    @classmethod
    def midpoint(cls, rate: float, regime: Regime) -> "AffineEstimator":
        lo, hi = _bounds(regime)
        slope = 1.0 if isinstance(regime, ShiftBound) else rate
        return cls(slope, 0.5 * (lo + hi) * (1.0 - rate))

    @classmethod
    def conventional(cls) -> "AffineEstimator":
        return cls(1.0, 0.0)


@dataclass(frozen=True)
class MSE:
    variance: float
    squared_bias: float
    mse: float


@dataclass(frozen=True)
class GridMax:
    max_mse: float
    argmax_state: State
    variance: float
    squared_bias: float
    grid_points: int


@dataclass(frozen=True)
class OffsetScan:
    best_offset: float
    best_max_mse: float
    midpoint_offset: float
    midpoint_max_mse: float
    step: float

    @property
    def offset_gap(self) -> float:
        return abs(self.best_offset - self.midpoint_offset)

    @property
    def within_one_step(self) -> bool:
        return self.offset_gap <= self.step * (1.0 + 1e-9) + 1e-15


@dataclass(frozen=True)
class MonteCarloMSE:
    mse_estimate: float
    standard_error: float
    replications: int


@dataclass(frozen=True)
class StratifiedGridMax:
    max_mse: float
    argmax_states: Tuple[State, ...]
    variance: float
    squared_bias: float


def _bounds(regime):
    if isinstance(regime, NoKnowledge):
        return 0.0, 1.0
    if isinstance(regime, LevelBound):
        return regime.lambda0, regime.lambda1
    if isinstance(regime, ShiftBound):
        return regime.delta0, regime.delta1
    raise ValidationError(f"unknown regime {regime!r}", "regime")


def _respondent_range(regime):
    if isinstance(regime, ShiftBound):
        return regime.feasible_range()
    return 0.0, 1.0


def _as_estimator(estimator):
    if isinstance(estimator, AffineEstimator):
        return estimator
    slope, offset = estimator
    return AffineEstimator(float(slope), float(offset))


def _check_rate(rate):
    rate = _check_real(rate, "rate")
    if not 0.0 < rate <= 1.0:
        raise ValidationError(f"rate must lie in (0, 1], got {rate!r}", "rate")
    return rate


def _clipped_moments(theta1, estimator, n):
    """First two moments of clip(slope * m + offset) under binomial sampling."""
    k = np.arange(n + 1)
    values = np.clip(estimator.slope * k / n + estimator.offset, 0.0, 1.0)
    pmf = stats.binom.pmf(k[None, :], n, np.atleast_1d(theta1)[:, None])
    return pmf @ values, pmf @ values**2


def _moments(theta1, estimator, n, clip):
    theta1 = np.asarray(theta1, dtype=float)
    if clip:
        return _clipped_moments(theta1, estimator, n)
    mean = estimator.slope * theta1 + estimator.offset
    var = estimator.slope**2 * theta1 * (1.0 - theta1) / n
    return mean, var + mean**2


def exact_estimator_mse(state: State, estimator, n, rate, clip=False) -> MSE:
    """Exact variance, squared bias and MSE of an affine estimator at one state.

    With ``clip=True`` the estimate is clipped into [0, 1] before scoring and
    the moments are summed over the binomial distribution of the sample count.
    """
    estimator = _as_estimator(estimator)
    n = _check_count(n, "n", 1)
    rate = _check_rate(rate)
    truth = state.population_share(rate)
    m1, m2 = _moments(np.array([state.theta1]), estimator, n, clip)
    m1, m2 = float(m1[0]), float(m2[0])
    variance = max(m2 - m1**2, 0.0) if clip else estimator.slope**2 * state.theta1 * (
        1.0 - state.theta1) / n
    bias2 = (m1 - truth) ** 2
    return MSE(variance, bias2, variance + bias2)


def _state_axes(regime, grid_points):
    t_lo, t_hi = _respondent_range(regime)
    b_lo, b_hi = _bounds(regime)
    return np.linspace(t_lo, t_hi, grid_points), np.linspace(b_lo, b_hi, grid_points)


def grid_max_mse(regime: Regime, estimator, n, rate, grid_points=DEFAULT_GRID,
                 clip=False, chunk=256) -> GridMax:
    """Maximize exact MSE over a uniform grid of the feasible state box.

    The box is respondent preference times non-respondent preference for
    level-type knowledge, and respondent preference times the preference gap
    for shift bounds. The first maximizing grid point in row-major order wins.
    """
    estimator = _as_estimator(estimator)
    n = _check_count(n, "n", 1)
    rate = _check_rate(rate)
    grid_points = _check_count(grid_points, "grid_points", 2)
    theta1, second = _state_axes(regime, grid_points)
    shift = isinstance(regime, ShiftBound)
    m1, m2 = _moments(theta1, estimator, n, clip)
    var = m2 - m1**2

    best = (-np.inf, 0, 0)
    for start in range(0, grid_points, chunk):
        rows = slice(start, start + chunk)
        t = theta1[rows, None]
        theta0 = t + second[None, :] if shift else np.broadcast_to(second, (t.shape[0], grid_points))
        truth = t * rate + theta0 * (1.0 - rate)
        mse = m2[rows, None] - 2.0 * truth * m1[rows, None] + truth**2
        idx = int(np.argmax(mse))
        i, j = divmod(idx, grid_points)
        if mse[i, j] > best[0]:
            best = (float(mse[i, j]), start + i, j)

    _, i, j = best
    t1 = float(theta1[i])
    t0 = t1 + float(second[j]) if shift else float(second[j])
    t0 = min(max(t0, 0.0), 1.0)
    truth = t1 * rate + t0 * (1.0 - rate)
    bias2 = float((m1[i] - truth) ** 2)
    variance = float(max(var[i], 0.0))
    return GridMax(variance + bias2, State(t1, t0), variance, bias2, grid_points)


def _offset_span(regime, rate):
    lo, hi = _bounds(regime)
    span = (lo * (1.0 - rate), hi * (1.0 - rate))
    if span[1] - span[0] < 1e-12:
        center = 0.5 * (span[0] + span[1])
        span = (center - 0.5, center + 0.5)
    return span


def minimax_offset_scan(regime: Regime, n, rate, offset_grid=201, grid_points=201,
                        clip=False) -> OffsetScan:
    """Scan offsets of the midpoint's slope family for the smallest worst-case MSE.

    Offsets range over the values that are unbiased in some feasible state
    (widened to a unit span when that range collapses to a point, as with a
    full response). Ties go to the smallest offset.
    """
    rate = _check_rate(rate)
    offset_grid = _check_count(offset_grid, "offset_grid", 3)
    mid = AffineEstimator.midpoint(rate, regime)
    lo, hi = _offset_span(regime, rate)
    offsets = np.linspace(lo, hi, offset_grid)
    worst = np.array([
        grid_max_mse(regime, AffineEstimator(mid.slope, float(c)), n, rate, grid_points,
                     clip=clip).max_mse
        for c in offsets
    ])
    k = int(np.argmin(worst))
    mid_worst = grid_max_mse(regime, mid, n, rate, grid_points, clip=clip).max_mse
    return OffsetScan(
        best_offset=float(offsets[k]),
        best_max_mse=float(worst[k]),
        midpoint_offset=mid.offset,
        midpoint_max_mse=mid_worst,
        step=float(offsets[1] - offsets[0]),
    )


def _mc_block(block, seed, replications, state, estimator, n, rate, clip):
    start = block * MC_BLOCK
    size = min(MC_BLOCK, replications - start)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    counts = rng.binomial(n, state.theta1, size=size)
    est = estimator.slope * counts / n + estimator.offset
    if clip:
        est = np.clip(est, 0.0, 1.0)
    err2 = (est - state.population_share(rate)) ** 2
    return math.fsum(err2), math.fsum(err2**2)


def monte_carlo_mse(state: State, estimator, n, rate, replications=DEFAULT_REPLICATIONS,
                    seed=0, n_jobs=1, clip=False) -> MonteCarloMSE:
    """Simulated MSE with its standard error.

    Replications are drawn in fixed blocks, each seeded from ``(seed, block)``,
    so the result does not depend on ``n_jobs``.
    """
    estimator = _as_estimator(estimator)
    n = _check_count(n, "n", 1)
    rate = _check_rate(rate)
    replications = _check_count(replications, "replications", 100)
    seed = _check_count(seed, "seed")
    blocks = range(math.ceil(replications / MC_BLOCK))
    args = (seed, replications, state, estimator, n, rate, clip)
    if n_jobs == 1:
        parts = [_mc_block(b, *args) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda b: _mc_block(b, *args), blocks))
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / replications
    sample_var = max(total_sq - replications * mean**2, 0.0) / (replications - 1)
    return MonteCarloMSE(mean, math.sqrt(sample_var / replications), replications)


def stratified_grid_max_mse(strata: StratifiedPoll, grid_points=201,
                            bound_points=2) -> StratifiedGridMax:
    """Worst-case MSE of the stratified midpoint estimate by enumeration.

    Respondent preference in every cell runs over ``grid_points`` values and the
    non-respondent coordinate over ``bound_points`` values per cell, including
    both ends; the squared bias is convex in the latter so its maximum lies on
    the ends. Variance is that of a weighted sum of independent cell shares.
    """
    cells = strata.strata
    if len(cells) > MAX_ORACLE_STRATA:
        raise TooManyStrataForOracle(
            f"oracle enumerates at most {MAX_ORACLE_STRATA} strata, got {len(cells)}"
        )
    grid_points = _check_count(grid_points, "grid_points", 2)
    bound_points = _check_count(bound_points, "bound_points", 2)
    kind = strata.regime_kind
    shift = kind == "shift"

    t_axes, b_axes, var_terms, offset_terms = [], [], [], []
    for s in cells:
        p, r = s.population_share, s.response_rate
        lo, hi = _bounds(s.regime)
        t = np.linspace(*_respondent_range(s.regime), grid_points)
        w = p if shift else r * p
        t_axes.append(t)
        b_axes.append(np.linspace(lo, hi, bound_points))
        var_terms.append(w**2 * t * (1.0 - t) / s.respondents)
        offset_terms.append(0.5 * (lo + hi) * (1.0 - r) * p)
    offset = math.fsum(offset_terms)
    k = len(cells)

    def spread(arrays):
        # sum of per-cell 1-d terms over the joint grid
        total = np.zeros((1,) * k)
        for axis, a in enumerate(arrays):
            shape = [1] * k
            shape[axis] = a.size
            total = total + a.reshape(shape)
        return total

    var = spread(var_terms)
    best = (-np.inf, None, None)
    for corner in itertools.product(*b_axes):
        # mean of the estimate minus the true share, cell by cell
        gaps = []
        for s, t, b in zip(cells, t_axes, corner):
            p, r = s.population_share, s.response_rate
            w = p if shift else r * p
            theta0 = t + b if shift else np.full_like(t, b)
            gaps.append(w * t - p * (r * t + (1.0 - r) * theta0))
        mse = var + (offset + spread(gaps)) ** 2
        i = int(np.argmax(mse))
        if mse.flat[i] > best[0]:
            best = (float(mse.flat[i]), np.unravel_index(i, mse.shape), corner)

    value, idx, corner = best
    variance = float(var[idx])
    states = []
    for t, j, b in zip(t_axes, idx, corner):
        t1 = float(t[j])
        t0 = t1 + float(b) if shift else float(b)
        states.append(State(t1, min(max(t0, 0.0), 1.0)))
    return StratifiedGridMax(value, tuple(states), variance, value - variance)
