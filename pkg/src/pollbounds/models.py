"""scikit-learn style estimators wrapping the closed-form budgets.

Responses are coded 1 for candidate A, 0 for candidate B and NaN for
don't-know/refused. ``fit`` tallies them; ``predict`` returns the midpoint
estimate of population preference for every row, in the manner of
:class:`sklearn.dummy.DummyRegressor`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .core import (
    LevelBound,
    NoKnowledge,
    ResponseTally,
    ShiftBound,
    StratifiedPoll,
    Stratum,
    bayes_stratum_rate,
    two_party_share,
)
from .estimators import (
    DEFAULT_CONFIDENCE,
    budget_from_share,
    identification_interval,
    stratified_budget,
)
from .exceptions import ValidationError


def make_regime(kind="none", lambda0=0.0, lambda1=1.0, delta0=0.0, delta1=0.0,
                respondent_range=None):
    if kind == "none":
        return NoKnowledge()
    if kind == "level":
        return LevelBound(lambda0, lambda1)
    if kind == "shift":
        return ShiftBound(delta0, delta1, respondent_range)
    raise ValidationError(f"regime must be 'none', 'level' or 'shift', got {kind!r}", "regime")


def check_responses(y):
    """Validate a response vector and return it as a float 1-d array."""
    y = check_array(y, ensure_2d=False, ensure_all_finite="allow-nan", dtype=np.float64)
    y = column_or_1d(y)
    seen = y[~np.isnan(y)]
    if not np.isin(seen, (0.0, 1.0)).all():
        raise ValidationError("responses must be 1 (A), 0 (B) or NaN (don't know)", "y")
    return y


def tally_responses(y) -> ResponseTally:
    y = check_responses(y)
    a = int(np.sum(y == 1.0))
    b = int(np.sum(y == 0.0))
    return ResponseTally(a, b, int(y.size - a - b))


def _n_rows(X):
    return len(X) if X is not None and hasattr(X, "__len__") else 1


class NonresponseMidpointEstimator(RegressorMixin, BaseEstimator):
    """Midpoint estimate and total margin of error for one poll.

    Parameters
    ----------
    response_rate : float
        Fraction of the population that would respond, in (0, 1].
    regime : {"none", "level", "shift"}
        What is assumed about non-respondents.
    lambda0, lambda1 : float
        Bounds on non-respondent preference for ``regime="level"``.
    delta0, delta1 : float
        Bounds on the preference gap for ``regime="shift"``.
    respondent_range : pair of float, optional
        Extra restriction on respondent preference under ``"shift"``.
    multiplier : float
        Scale on the root max MSE reported as ``tme_``.
    design_effect : float
        Variance inflation used in the margin of sampling error.

    Attributes
    ----------
    tally_, share_, regime_, budget_, interval_, midpoint_, tme_
    """

    def __init__(self, response_rate=None, regime="none", lambda0=0.0, lambda1=1.0,
                 delta0=0.0, delta1=0.0, respondent_range=None, multiplier=1.0,
                 design_effect=1.0, confidence_multiplier=DEFAULT_CONFIDENCE):
        self.response_rate = response_rate
        self.regime = regime
        self.lambda0 = lambda0
        self.lambda1 = lambda1
        self.delta0 = delta0
        self.delta1 = delta1
        self.respondent_range = respondent_range
        self.multiplier = multiplier
        self.design_effect = design_effect
        self.confidence_multiplier = confidence_multiplier

    def fit(self, X, y=None):
        """Tally responses from ``y`` if given, else from ``X``."""
        if self.response_rate is None:
            raise ValidationError("response_rate must be set before fitting", "response_rate")
        responses = X if y is None else y
        self.tally_ = tally_responses(responses)
        self.n_respondents_ = self.tally_.total
        self.share_ = two_party_share(self.tally_)
        self.regime_ = make_regime(self.regime, self.lambda0, self.lambda1, self.delta0,
                                   self.delta1, self.respondent_range)
        self.budget_ = budget_from_share(
            self.share_, self.response_rate, self.n_respondents_, self.regime_,
            self.multiplier, self.design_effect, self.confidence_multiplier,
        )
        self.interval_ = (self.budget_.interval_lo, self.budget_.interval_hi)
        self.midpoint_ = self.budget_.midpoint
        self.tme_ = self.budget_.tme
        return self

    def predict(self, X=None):
        check_is_fitted(self, "budget_")
        return np.full(_n_rows(X), self.midpoint_)

    def interval(self, m):
        """Identification interval for another respondent share under the fitted regime."""
        check_is_fitted(self, "regime_")
        return identification_interval(m, self.response_rate, self.regime_)


class StratifiedMidpointEstimator(RegressorMixin, BaseEstimator):
    """Stratified midpoint estimate from per-respondent cell labels.

    ``fit(X, y)`` takes cell labels in ``X`` and coded responses in ``y``.
    Cell response rates come from ``cell_response_rates`` when given and are
    otherwise derived from the respondent mix and ``response_rate``.

    Parameters
    ----------
    population_shares : dict
        Population share of each cell label.
    regimes : dict or regime
        Per-cell assumption, or one assumption applied to every cell.
    response_rate : float, optional
        Overall response rate, used when cell rates are not supplied.
    cell_response_rates : dict, optional
    multiplier : float
    renormalize : bool
        Rescale population shares that do not sum to 1 instead of failing.
    """

    def __init__(self, population_shares=None, regimes=None, response_rate=None,
                 cell_response_rates=None, multiplier=1.0, design_effect=1.0,
                 renormalize=False):
        self.population_shares = population_shares
        self.regimes = regimes
        self.response_rate = response_rate
        self.cell_response_rates = cell_response_rates
        self.multiplier = multiplier
        self.design_effect = design_effect
        self.renormalize = renormalize

    def fit(self, X, y):
        if not self.population_shares:
            raise ValidationError("population_shares must be set before fitting",
                                  "population_shares")
        labels = column_or_1d(check_array(X, ensure_2d=False, dtype=None))
        y = check_responses(y)
        if labels.shape[0] != y.shape[0]:
            raise ValidationError("X and y have different lengths", "X")
        unknown = set(labels.tolist()) - set(self.population_shares)
        if unknown:
            raise ValidationError(f"labels without a population share: {sorted(map(str, unknown))}",
                                  "X")

        total = y.size
        strata = []
        for label, share in self.population_shares.items():
            cell = labels == label
            tally = tally_responses(y[cell]) if cell.any() else None
            if tally is None or tally.total == 0:
                raise ValidationError(f"cell {label!r} has no respondents", "X")
            if self.cell_response_rates is not None:
                rate = self.cell_response_rates[label]
            else:
                if self.response_rate is None:
                    raise ValidationError("set response_rate or cell_response_rates",
                                          "response_rate")
                rate = bayes_stratum_rate(tally.total / total, self.response_rate, share)
            regime = self.regimes.get(label) if isinstance(self.regimes, dict) else self.regimes
            strata.append(Stratum(str(label), share, tally, rate,
                                  regime if regime is not None else NoKnowledge()))

        self.strata_ = StratifiedPoll(tuple(strata), self.design_effect, self.renormalize)
        self.budget_ = stratified_budget(self.strata_, self.multiplier)
        self.cell_shares_ = {s.label: s.share for s in self.strata_.strata}
        self.interval_ = (self.budget_.interval_lo, self.budget_.interval_hi)
        self.midpoint_ = self.budget_.midpoint
        self.tme_ = self.budget_.tme
        return self

    def predict(self, X=None):
        check_is_fitted(self, "budget_")
        return np.full(_n_rows(X), self.midpoint_)
