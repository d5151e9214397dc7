"""Randomized invariants of the closed forms."""

import math

from hypothesis import assume, given, settings, strategies as st

from pollbounds import (
    LevelBound,
    NoKnowledge,
    ResponseTally,
    ShiftBound,
    bayes_stratum_rate,
    conventional_max_squared_bias,
    identification_interval,
    max_squared_bias,
    max_variance,
    midpoint_estimate,
    two_party_share,
)
from pollbounds.estimators import _raw_interval, budget_from_share, midpoint_coefficients

CASES = settings(max_examples=1000, deadline=None)

unit = st.floats(0.0, 1.0, allow_nan=False)
rates = st.floats(1e-4, 1.0, allow_nan=False)
counts = st.integers(1, 100_000)


@st.composite
def level_bounds(draw):
    a, b = sorted((draw(unit), draw(unit)))
    return LevelBound(a, b)


@st.composite
def shift_bounds(draw):
    d0 = draw(st.floats(-0.5, 0.5))
    d1 = draw(st.floats(d0, 0.5))
    return ShiftBound(d0, d1)


regimes = st.one_of(st.just(NoKnowledge()), level_bounds(), shift_bounds())


def raw_midpoint(m, r, regime):
    slope, offset = midpoint_coefficients(r, regime)
    return slope * m + offset


@CASES
@given(unit, rates, regimes)
def test_interval_width_identities(m, r, regime):
    lo, hi = _raw_interval(m, r, regime)
    if isinstance(regime, NoKnowledge):
        width = 1.0 - r
    elif isinstance(regime, LevelBound):
        width = regime.width * (1.0 - r)
    else:
        width = regime.width * (1.0 - r)
    assert math.isclose(hi - lo, width, abs_tol=1e-12)


@CASES
@given(unit, rates, regimes)
def test_midpoint_is_interval_center(m, r, regime):
    lo, hi = _raw_interval(m, r, regime)
    assert math.isclose(raw_midpoint(m, r, regime), 0.5 * (lo + hi), abs_tol=1e-12)


@CASES
@given(unit, rates)
def test_shrinkage_toward_half(m, r):
    mid, _ = midpoint_estimate(m, r, NoKnowledge())
    assert math.isclose(mid - 0.5, r * (m - 0.5), abs_tol=1e-12)
    assert abs(mid - 0.5) <= abs(m - 0.5) + 1e-15
    if r < 1.0 - 1e-9 and abs(m - 0.5) > 1e-6:
        assert abs(mid - 0.5) < abs(m - 0.5)


@CASES
@given(unit, rates, unit)
def test_symmetric_lambda_matches_no_knowledge(m, r, a):
    a = min(a, 1.0 - a)
    assert math.isclose(raw_midpoint(m, r, LevelBound(a, 1.0 - a)),
                        raw_midpoint(m, r, NoKnowledge()), abs_tol=1e-12)


@CASES
@given(unit, rates, st.floats(0.0, 0.5), counts)
def test_symmetric_shift(m, r, d, n):
    regime = ShiftBound(-d, d)
    assert math.isclose(raw_midpoint(m, r, regime), m, abs_tol=1e-15)
    assert max_variance(r, n, regime) == 0.25 / n
    assert max_squared_bias(r, ShiftBound(0.0, 0.0)) == 0.0


@st.composite
def nested_levels(draw):
    outer = draw(level_bounds())
    a = draw(st.floats(outer.lambda0, outer.lambda1))
    b = draw(st.floats(a, outer.lambda1))
    return outer, LevelBound(a, b)


@st.composite
def nested_shifts(draw):
    outer = draw(shift_bounds())
    a = draw(st.floats(outer.delta0, outer.delta1))
    b = draw(st.floats(a, outer.delta1))
    return outer, ShiftBound(a, b)


@CASES
@given(unit, rates, st.one_of(nested_levels(), nested_shifts()))
def test_nesting(m, r, pair):
    outer, inner = pair
    lo_o, hi_o = _raw_interval(m, r, outer)
    lo_i, hi_i = _raw_interval(m, r, inner)
    assert lo_o - 1e-12 <= lo_i <= hi_i <= hi_o + 1e-12
    assert max_squared_bias(r, inner) <= max_squared_bias(r, outer) + 1e-15


@CASES
@given(st.one_of(unit, st.just(0.5)), rates)
def test_conventional_bias_dominates(m, r):
    conv = conventional_max_squared_bias(m, r)
    mid = max_squared_bias(r, NoKnowledge())
    assert conv >= mid - 1e-15
    if m == 0.5:
        assert math.isclose(conv, mid, rel_tol=1e-12)
    elif r < 1.0 - 1e-9 and abs(m - 0.5) > 1e-6:
        assert conv > mid


@CASES
@given(st.lists(st.integers(1, 10_000), min_size=1, max_size=8),
       st.lists(st.floats(0.05, 1.0), min_size=8, max_size=8), st.floats(1e-3, 1.0))
def test_bayes_rates_reproduce_overall_rate(respondent_counts, raw_shares, overall):
    # population shares chosen so every implied cell rate stays <= 1
    k = len(respondent_counts)
    n = sum(respondent_counts)
    resp_mix = [c / n for c in respondent_counts]
    weights = [resp_mix[i] * overall + raw_shares[i] * (1.0 - overall) for i in range(k)]
    total = math.fsum(weights)
    pop = [w / total for w in weights]
    assume(all(p > 0 for p in pop))
    assume(all(resp_mix[i] * overall / pop[i] <= 1.0 for i in range(k)))
    cell_rates = [bayes_stratum_rate(resp_mix[i], overall, pop[i]) for i in range(k)]
    assert math.isclose(math.fsum(c * p for c, p in zip(cell_rates, pop)), overall, abs_tol=1e-12)


@CASES
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 100))
def test_swap_candidates(a, b, dk):
    assume(a + b > 0)
    m = two_party_share(ResponseTally(a, b, dk))
    assert 0.0 <= m <= 1.0
    assert math.isclose(two_party_share(ResponseTally(b, a, dk)), 1.0 - m, abs_tol=1e-15)


@CASES
@given(unit, rates, counts, regimes, st.floats(0.5, 3.0))
def test_budget_additivity(m, r, n, regime, mult):
    if isinstance(regime, ShiftBound):
        lo, hi = regime.feasible_range()
        m = min(max(m, lo), hi)
    b = budget_from_share(m, r, n, regime, mult)
    assert b.max_mse == b.max_variance + b.max_squared_bias
    assert b.tme == mult * math.sqrt(b.max_mse)
    assert b.interval_lo <= b.midpoint <= b.interval_hi


@CASES
@given(unit, rates, regimes)
def test_clipped_interval_inside_unit(m, r, regime):
    if isinstance(regime, ShiftBound):
        lo, hi = regime.feasible_range()
        m = min(max(m, lo), hi)
    lo, hi = identification_interval(m, r, regime)
    assert 0.0 <= lo <= hi <= 1.0
