"""Domain types for two-candidate polls with nonresponse.

Everything here is stored as fractions in [0, 1]; percentages appear only
when a report is rendered.
"""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from .exceptions import (
    ImpliedRateOutOfRange,
    InfeasibleShiftBound,
    MissingRateInputs,
    MixedRegimeKinds,
    RateOutOfRange,
    SharesDoNotSumToOne,
    TallyConsistencyWarning,
    ValidationError,
    ZeroPopulationShare,
    ZeroTwoPartyTotal,
)

SHARE_TOLERANCE = 1e-9


def _check_real(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(f"{name} must be a real number, got {value!r}", name)
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}", name)
    return value


def _check_proportion(value, name):
    value = _check_real(value, name)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must be a fraction in [0, 1], got {value!r}", name)
    return value


def _check_count(value, name, minimum=0):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer count, got {value!r}", name)
    value = int(value)
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}", name)
    return value


@dataclass(frozen=True)
class PollDesign:
    """Sampling facts about a poll.

    Either ``response_rate`` or ``attempted_contacts`` must be given. When
    only the contact count is known the rate is ``respondents / attempted``.
    """

    respondents: int
    response_rate: Optional[float] = None
    attempted_contacts: Optional[int] = None
    design_effect: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "respondents", _check_count(self.respondents, "respondents", 1))
        if self.response_rate is not None:
            rate = _check_real(self.response_rate, "response_rate")
            if not 0.0 < rate <= 1.0:
                raise RateOutOfRange(f"response_rate must lie in (0, 1], got {rate!r}", "response_rate")
            object.__setattr__(self, "response_rate", rate)
        if self.attempted_contacts is not None:
            attempted = _check_count(self.attempted_contacts, "attempted_contacts", 1)
            if self.response_rate is None and self.respondents > attempted:
                raise RateOutOfRange(
                    f"respondents ({self.respondents}) exceed attempted_contacts ({attempted})",
                    "attempted_contacts",
                )
            object.__setattr__(self, "attempted_contacts", attempted)
        if self.response_rate is None and self.attempted_contacts is None:
            raise MissingRateInputs(
                "supply response_rate or attempted_contacts", "response_rate"
            )
        deff = _check_real(self.design_effect, "design_effect")
        if deff < 1.0:
            raise ValidationError(f"design_effect must be >= 1, got {deff!r}", "design_effect")
        object.__setattr__(self, "design_effect", deff)

    @property
    def rate_source(self) -> str:
        return "supplied" if self.response_rate is not None else "derived"


@dataclass(frozen=True)
class ResponseTally:
    """Raw answer counts for candidate A, candidate B and don't-know/refused."""

    count_a: int
    count_b: int
    count_dk_refused: int = 0

    def __post_init__(self):
        for name in ("count_a", "count_b", "count_dk_refused"):
            object.__setattr__(self, name, _check_count(getattr(self, name), name))

    @property
    def total(self) -> int:
        return self.count_a + self.count_b + self.count_dk_refused

    @property
    def two_party_total(self) -> int:
        return self.count_a + self.count_b

    @classmethod
    def from_percentages(cls, percent_a, percent_b, percent_dk_refused, respondents):
        """Build a tally from reported percentages and the respondent count.

        Each percentage is turned into the nearest integer count. A
        :class:`TallyConsistencyWarning` is issued when the percentages do not
        sum to 100 within 0.1.
        """
        respondents = _check_count(respondents, "respondents", 1)
        pcts = []
        for name, pct in (
            ("percent_a", percent_a),
            ("percent_b", percent_b),
            ("percent_dk_refused", percent_dk_refused),
        ):
            pct = _check_real(pct, name)
            if not 0.0 <= pct <= 100.0:
                raise ValidationError(f"{name} must be in [0, 100], got {pct!r}", name)
            pcts.append(pct)
        if abs(sum(pcts) - 100.0) > 0.1:
            warnings.warn(
                f"tally percentages sum to {sum(pcts):g}, not 100",
                TallyConsistencyWarning,
                stacklevel=2,
            )
        counts = [int(round(p * respondents / 100.0)) for p in pcts]
        return cls(*counts)


@dataclass(frozen=True)
class NoKnowledge:
    """Nothing is known about the preferences of non-respondents."""

    kind = "none"


@dataclass(frozen=True)
class LevelBound:
    """Non-respondent preference lies in ``[lambda0, lambda1]``."""

    lambda0: float
    lambda1: float
    kind = "level"

    def __post_init__(self):
        lo = _check_proportion(self.lambda0, "lambda0")
        hi = _check_proportion(self.lambda1, "lambda1")
        if lo > hi:
            raise ValidationError(
                f"lambda bounds out of order: lambda0={lo!r} > lambda1={hi!r}", "lambda0"
            )
        object.__setattr__(self, "lambda0", lo)
        object.__setattr__(self, "lambda1", hi)

    @property
    def width(self) -> float:
        return self.lambda1 - self.lambda0

    @property
    def center(self) -> float:
        return 0.5 * (self.lambda0 + self.lambda1)


@dataclass(frozen=True)
class ShiftBound:
    """Non-respondent minus respondent preference lies in ``[delta0, delta1]``.

    ``respondent_range`` optionally restricts respondent preference further,
    e.g. to ``(0.6, 1.0)`` when the leader's share is known to be large.
    """

    delta0: float
    delta1: float
    respondent_range: Optional[Tuple[float, float]] = None
    kind = "shift"

    def __post_init__(self):
        lo = _check_real(self.delta0, "delta0")
        hi = _check_real(self.delta1, "delta1")
        if lo > hi:
            raise ValidationError(
                f"delta bounds out of order: delta0={lo!r} > delta1={hi!r}", "delta0"
            )
        if not (-1.0 <= lo and hi <= 1.0):
            raise ValidationError("delta bounds must lie in [-1, 1]", "delta0")
        object.__setattr__(self, "delta0", lo)
        object.__setattr__(self, "delta1", hi)
        if self.respondent_range is not None:
            try:
                a, b = self.respondent_range
            except (TypeError, ValueError):
                raise ValidationError(
                    "respondent_range must be a pair [a, b]", "respondent_range"
                ) from None
            a = _check_proportion(a, "respondent_range")
            b = _check_proportion(b, "respondent_range")
            if a > b:
                raise ValidationError(
                    f"respondent_range out of order: {a!r} > {b!r}", "respondent_range"
                )
            object.__setattr__(self, "respondent_range", (a, b))
        self.feasible_range()

    @property
    def width(self) -> float:
        return self.delta1 - self.delta0

    @property
    def center(self) -> float:
        return 0.5 * (self.delta0 + self.delta1)

    def feasible_range(self) -> Tuple[float, float]:
        """Respondent-preference values that keep non-respondent preference in [0, 1]."""
        lo = max(0.0, -self.delta0)
        hi = min(1.0, 1.0 - self.delta1)
        if self.respondent_range is not None:
            lo = max(lo, self.respondent_range[0])
            hi = min(hi, self.respondent_range[1])
        if lo > hi:
            raise InfeasibleShiftBound(
                f"no feasible respondent preference for delta bounds "
                f"[{self.delta0!r}, {self.delta1!r}]"
                + (f" within {list(self.respondent_range)}" if self.respondent_range else "")
            )
        return lo, hi


Regime = Union[NoKnowledge, LevelBound, ShiftBound]


@dataclass(frozen=True)
class State:
    """Respondent (``theta1``) and non-respondent (``theta0``) preference for A."""

    theta1: float
    theta0: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", _check_proportion(self.theta1, "theta1"))
        object.__setattr__(self, "theta0", _check_proportion(self.theta0, "theta0"))

    def population_share(self, rate: float) -> float:
        return self.theta1 * rate + self.theta0 * (1.0 - rate)


@dataclass(frozen=True)
class Stratum:
    """One covariate cell of a stratified poll."""

    label: str
    population_share: float
    tally: ResponseTally
    response_rate: float
    regime: Regime
    respondents: Optional[int] = None

    def __post_init__(self):
        share = _check_proportion(self.population_share, "population_share")
        if share == 0.0:
            raise ZeroPopulationShare(f"stratum {self.label!r} has zero population share",
                                      "population_share")
        object.__setattr__(self, "population_share", share)
        rate = _check_real(self.response_rate, "response_rate")
        if not 0.0 < rate <= 1.0:
            raise RateOutOfRange(
                f"stratum {self.label!r} response_rate must lie in (0, 1], got {rate!r}",
                "response_rate",
            )
        object.__setattr__(self, "response_rate", rate)
        if self.respondents is None:
            object.__setattr__(self, "respondents", self.tally.total)
        n = _check_count(self.respondents, "respondents", 1)
        if self.tally.total != n:
            raise ValidationError(
                f"stratum {self.label!r}: tally sums to {self.tally.total}, respondents is {n}",
                "respondents",
            )
        object.__setattr__(self, "respondents", n)
        if isinstance(self.regime, NoKnowledge):
            # no knowledge inside a cell is the widest level bound
            object.__setattr__(self, "regime", LevelBound(0.0, 1.0))
        if not isinstance(self.regime, (LevelBound, ShiftBound)):
            raise ValidationError(f"stratum {self.label!r} has no valid regime", "regime")

    @property
    def share(self) -> float:
        return two_party_share(self.tally)


@dataclass(frozen=True)
class StratifiedPoll:
    """A poll split into covariate cells with known population shares."""

    strata: Tuple[Stratum, ...]
    design_effect: float = 1.0
    renormalize: bool = False

    def __post_init__(self):
        strata = tuple(self.strata)
        if not strata:
            raise ValidationError("a stratified poll needs at least one stratum", "strata")
        labels = [s.label for s in strata]
        if len(set(labels)) != len(labels):
            raise ValidationError("stratum labels must be unique", "strata")
        total = math.fsum(s.population_share for s in strata)
        if abs(total - 1.0) > SHARE_TOLERANCE:
            if not self.renormalize:
                raise SharesDoNotSumToOne(
                    f"population shares sum to {total!r}, not 1", "population_share"
                )
            strata = tuple(
                Stratum(s.label, s.population_share / total, s.tally, s.response_rate,
                        s.regime, s.respondents)
                for s in strata
            )
        object.__setattr__(self, "strata", strata)
        deff = _check_real(self.design_effect, "design_effect")
        if deff < 1.0:
            raise ValidationError(f"design_effect must be >= 1, got {deff!r}", "design_effect")
        object.__setattr__(self, "design_effect", deff)

    @property
    def respondents(self) -> int:
        return sum(s.respondents for s in self.strata)

    @property
    def regime_kind(self) -> str:
        kinds = {s.regime.kind for s in self.strata}
        if len(kinds) != 1:
            raise MixedRegimeKinds(
                f"strata mix regime kinds {sorted(kinds)}; use all level or all shift", "regime"
            )
        return kinds.pop()


@dataclass(frozen=True)
class ErrorBudget:
    """Interval, midpoint and worst-case error components for one poll.

    ``max_mse`` and ``tme`` are computed from the unclipped midpoint. The
    reported interval and midpoint are clipped into [0, 1] and ``clipped``
    records whether that changed anything.
    """

    interval_lo: float
    interval_hi: float
    midpoint: float
    clipped: bool
    max_variance: float
    max_squared_bias: float
    max_mse: float
    tme: float
    mose: float
    multiplier: float = 1.0
    midpoint_unclipped: Optional[float] = None
    interval_unclipped: Optional[Tuple[float, float]] = None

    def as_dict(self) -> dict:
        out = {
            "interval_lo": self.interval_lo,
            "interval_hi": self.interval_hi,
            "midpoint": self.midpoint,
            "clipped": self.clipped,
            "max_variance": self.max_variance,
            "max_squared_bias": self.max_squared_bias,
            "max_mse": self.max_mse,
            "tme": self.tme,
            "mose": self.mose,
            "multiplier": self.multiplier,
            "midpoint_unclipped": self.midpoint_unclipped,
        }
        out["interval_unclipped"] = (
            list(self.interval_unclipped) if self.interval_unclipped is not None else None
        )
        return out


def two_party_share(tally: ResponseTally) -> float:
    """Share of candidate A among respondents naming A or B."""
    total = tally.two_party_total
    if total == 0:
        raise ZeroTwoPartyTotal("tally has no two-party responses", "count_a")
    return tally.count_a / total


def resolve_response_rate(design: PollDesign) -> float:
    if design.response_rate is not None:
        return design.response_rate
    if design.attempted_contacts is None:
        raise MissingRateInputs("supply response_rate or attempted_contacts", "response_rate")
    rate = design.respondents / design.attempted_contacts
    if not 0.0 < rate <= 1.0:
        raise RateOutOfRange(f"derived response rate {rate!r} outside (0, 1]", "response_rate")
    return rate


def bayes_stratum_rate(share_among_respondents, overall_rate, population_share):
    """Cell response rate P(z=1|x) from the respondent mix and the overall rate.

    >>> bayes_stratum_rate(0.5, 0.02, 0.25)
    0.04
    """
    share_among_respondents = _check_proportion(share_among_respondents, "share_among_respondents")
    overall_rate = _check_real(overall_rate, "overall_rate")
    if not 0.0 < overall_rate <= 1.0:
        raise RateOutOfRange(f"overall_rate must lie in (0, 1], got {overall_rate!r}", "overall_rate")
    population_share = _check_proportion(population_share, "population_share")
    if population_share == 0.0:
        raise ZeroPopulationShare("population_share must be positive", "population_share")
    rate = share_among_respondents * overall_rate / population_share
    if not 0.0 < rate <= 1.0:
        raise ImpliedRateOutOfRange(
            f"implied cell response rate {rate!r} is outside (0, 1]; inputs are inconsistent",
            "population_share",
        )
    return rate


def stratify(
    labels: Sequence[str],
    population_shares: Sequence[float],
    tallies: Sequence[ResponseTally],
    regimes: Sequence[Regime],
    overall_rate: float,
    design_effect: float = 1.0,
    renormalize: bool = False,
) -> StratifiedPoll:
    """Assemble a stratified poll, deriving cell rates from the respondent mix."""
    totals = [t.total for t in tallies]
    n = sum(totals)
    if n == 0:
        raise ValidationError("stratified tallies are empty", "tally")
    strata = []
    for label, share, tally, regime, count in zip(labels, population_shares, tallies, regimes, totals):
        rate = bayes_stratum_rate(count / n, overall_rate, share)
        strata.append(Stratum(label, share, tally, rate, regime))
    return StratifiedPoll(tuple(strata), design_effect=design_effect, renormalize=renormalize)
