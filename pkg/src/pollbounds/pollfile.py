"""Reading poll spec documents.

A poll spec is a JSON object::

    {
      "design": {"respondents": 1532, "response_rate": 0.014,
                 "attempted_contacts": 113000, "design_effect": 1.22},
      "tally": {"count_a": 751, "count_b": 628, "count_dk_refused": 153},
      "regime": {"kind": "shift", "delta0": -0.1, "delta1": 0.0,
                 "respondent_range": [0.6, 1.0]},
      "strata": [...]
    }

``tally`` may instead carry ``percent_a``, ``percent_b`` and
``percent_dk_refused`` (0-100), converted with ``design.respondents``. Each
stratum holds ``label``, ``population_share``, ``tally``, ``regime`` and
optionally ``respondents`` and ``response_rate``; a missing cell rate is
derived from the respondent mix and the overall rate. Unknown keys are
errors, and proportions above 1 are rejected rather than read as percents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .core import (
    LevelBound,
    NoKnowledge,
    PollDesign,
    Regime,
    ResponseTally,
    ShiftBound,
    StratifiedPoll,
    Stratum,
    bayes_stratum_rate,
    resolve_response_rate,
)
from .exceptions import ValidationError

_TOP_KEYS = {"design", "tally", "regime", "strata", "renormalize"}
_DESIGN_KEYS = {"respondents", "response_rate", "attempted_contacts", "design_effect"}
_COUNT_KEYS = {"count_a", "count_b", "count_dk_refused"}
_PERCENT_KEYS = {"percent_a", "percent_b", "percent_dk_refused"}
_REGIME_KEYS = {
    "none": {"kind"},
    "level": {"kind", "lambda0", "lambda1"},
    "shift": {"kind", "delta0", "delta1", "respondent_range"},
}
_STRATUM_KEYS = {"label", "population_share", "respondents", "tally", "response_rate", "regime"}


@dataclass(frozen=True)
class PollSpec:
    design: PollDesign
    tally: Optional[ResponseTally]
    regime: Optional[Regime]
    strata: Optional[StratifiedPoll] = None


def _object(value, where):
    if not isinstance(value, dict):
        raise ValidationError(f"{where} must be an object", where)
    return value


def _reject_unknown(obj, allowed, where):
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ValidationError(f"unknown field(s) in {where}: {', '.join(unknown)}",
                              f"{where}.{unknown[0]}")


def _require(obj, key, where):
    if key not in obj:
        raise ValidationError(f"missing required field {where}.{key}", f"{where}.{key}")
    return obj[key]


def _prefixed(exc: ValidationError, where):
    field = f"{where}.{exc.field}" if exc.field else where
    return ValidationError(f"{where}: {exc}", field)


def parse_design(obj) -> PollDesign:
    obj = _object(obj, "design")
    _reject_unknown(obj, _DESIGN_KEYS, "design")
    try:
        return PollDesign(
            respondents=_require(obj, "respondents", "design"),
            response_rate=obj.get("response_rate"),
            attempted_contacts=obj.get("attempted_contacts"),
            design_effect=obj.get("design_effect", 1.0),
        )
    except ValidationError as exc:
        raise _prefixed(exc, "design") from None


def parse_tally(obj, respondents=None, where="tally") -> ResponseTally:
    obj = _object(obj, where)
    _reject_unknown(obj, _COUNT_KEYS | _PERCENT_KEYS, where)
    has_counts = bool(_COUNT_KEYS & set(obj))
    has_percents = bool(_PERCENT_KEYS & set(obj))
    try:
        if has_counts and has_percents:
            raise ValidationError("give counts or percentages, not both", None)
        if has_percents:
            if respondents is None:
                raise ValidationError("percentages need a respondent count", "respondents")
            return ResponseTally.from_percentages(
                _require(obj, "percent_a", where),
                _require(obj, "percent_b", where),
                obj.get("percent_dk_refused", 0.0),
                respondents,
            )
        tally = ResponseTally(
            _require(obj, "count_a", where),
            _require(obj, "count_b", where),
            obj.get("count_dk_refused", 0),
        )
    except ValidationError as exc:
        raise _prefixed(exc, where) from None
    if respondents is not None and tally.total != respondents:
        # only exact counts are held to the respondent total
        raise ValidationError(
            f"{where} sums to {tally.total} but respondents is {respondents}", f"{where}.count_a"
        )
    return tally


def parse_regime(obj, where="regime") -> Regime:
    obj = _object(obj, where)
    kind = _require(obj, "kind", where)
    if kind not in _REGIME_KEYS:
        raise ValidationError(f"{where}.kind must be one of none, level, shift; got {kind!r}",
                              f"{where}.kind")
    _reject_unknown(obj, _REGIME_KEYS[kind], where)
    try:
        if kind == "none":
            return NoKnowledge()
        if kind == "level":
            return LevelBound(_require(obj, "lambda0", where), _require(obj, "lambda1", where))
        rng = obj.get("respondent_range")
        return ShiftBound(
            _require(obj, "delta0", where),
            _require(obj, "delta1", where),
            tuple(rng) if isinstance(rng, list) else rng,
        )
    except ValidationError as exc:
        raise _prefixed(exc, where) from None


def parse_strata(items, design: PollDesign, renormalize=False) -> StratifiedPoll:
    if not isinstance(items, list) or not items:
        raise ValidationError("strata must be a non-empty list", "strata")
    raw = []
    for i, item in enumerate(items):
        where = f"strata[{i}]"
        item = _object(item, where)
        _reject_unknown(item, _STRATUM_KEYS, where)
        n = item.get("respondents")
        tally = parse_tally(_require(item, "tally", where), n, f"{where}.tally")
        raw.append((where, item, tally))

    total = sum(t.total for _, _, t in raw)
    strata = []
    for where, item, tally in raw:
        share = _require(item, "population_share", where)
        try:
            rate = item.get("response_rate")
            if rate is None:
                rate = bayes_stratum_rate(tally.total / total, resolve_response_rate(design), share)
            strata.append(Stratum(
                label=str(_require(item, "label", where)),
                population_share=share,
                tally=tally,
                response_rate=rate,
                regime=parse_regime(_require(item, "regime", where), f"{where}.regime"),
                respondents=item.get("respondents"),
            ))
        except ValidationError as exc:
            if exc.field and exc.field.startswith(where):
                raise
            raise _prefixed(exc, where) from None
    return StratifiedPoll(tuple(strata), design_effect=design.design_effect,
                          renormalize=renormalize)


def parse_poll_spec(doc) -> PollSpec:
    doc = _object(doc, "spec")
    _reject_unknown(doc, _TOP_KEYS, "spec")
    design = parse_design(_require(doc, "design", "spec"))
    strata = None
    if "strata" in doc:
        renorm = doc.get("renormalize", False)
        if not isinstance(renorm, bool):
            raise ValidationError("renormalize must be true or false", "renormalize")
        strata = parse_strata(doc["strata"], design, renorm)
    tally = regime = None
    if "tally" in doc or strata is None:
        tally = parse_tally(_require(doc, "tally", "spec"), design.respondents)
    if "regime" in doc or strata is None:
        regime = parse_regime(_require(doc, "regime", "spec"))
    return PollSpec(design, tally, regime, strata)


def load_poll_spec(source: Union[str, Path, dict]) -> PollSpec:
    """Parse a poll spec from a dict or a JSON file path."""
    if isinstance(source, dict):
        return parse_poll_spec(source)
    try:
        doc = json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"spec is not valid JSON: {exc}", "spec") from None
    return parse_poll_spec(doc)
