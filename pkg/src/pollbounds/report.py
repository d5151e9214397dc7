"""Total-margin-of-error sweeps and JSON/CSV report emission."""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np

from .core import (
    ErrorBudget,
    LevelBound,
    NoKnowledge,
    PollDesign,
    ResponseTally,
    ShiftBound,
    StratifiedPoll,
    _check_count,
    _check_real,
    resolve_response_rate,
    two_party_share,
)
from .estimators import DEFAULT_CONFIDENCE, budget_from_share, margin_of_sampling_error
from .exceptions import FeasibilityWarning, UnsupportedFormat, ValidationError

SCHEMA_VERSION = 1
SWEEP_COLUMNS = (
    "delta", "midpoint", "tme", "band_lo", "band_hi", "conventional", "mose", "conv_lo", "conv_hi",
)


@dataclass(frozen=True)
class SweepRow:
    delta: float
    midpoint: float
    tme: float
    band_lo: float
    band_hi: float
    conventional: float
    mose: float
    conv_lo: float
    conv_hi: float


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    multiplier: float
    confidence_multiplier: float
    design: PollDesign
    tally: ResponseTally

    def __len__(self):
        return len(self.rows)

    def column(self, name) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def tme_sweep(poll: PollDesign, tally: ResponseTally, delta_max, steps, multiplier=1.0,
              confidence_multiplier=DEFAULT_CONFIDENCE) -> SweepTable:
    """TME under symmetric shift bounds ``[-delta, delta]`` for delta in [0, delta_max].

    Bands are midpoint +/- TME and conventional estimate +/- margin of
    sampling error. Bands are not clipped.
    """
    delta_max = _check_real(delta_max, "delta_max")
    if not 0.0 < delta_max <= 1.0:
        raise ValidationError(f"delta_max must lie in (0, 1], got {delta_max!r}", "delta_max")
    steps = _check_count(steps, "steps", 2)
    rate = resolve_response_rate(poll)
    m = two_party_share(tally)
    mose = margin_of_sampling_error(poll.respondents, poll.design_effect, confidence_multiplier)
    rows = []
    for delta in np.linspace(0.0, delta_max, steps):
        delta = float(delta)
        with warnings.catch_warnings():
            # m drifting outside [delta, 1 - delta] is expected for wide deltas
            warnings.simplefilter("ignore", FeasibilityWarning)
            b = budget_from_share(m, rate, poll.respondents, ShiftBound(-delta, delta), multiplier,
                                  poll.design_effect, confidence_multiplier)
        mid = b.midpoint_unclipped
        rows.append(SweepRow(delta, mid, b.tme, mid - b.tme, mid + b.tme, m, mose, m - mose, m + mose))
    return SweepTable(tuple(rows), b.multiplier, confidence_multiplier, poll, tally)


def percent(x: float) -> str:
    return f"{100.0 * x:.1f}%"


def design_to_dict(design: PollDesign) -> dict:
    out = {"respondents": design.respondents}
    if design.attempted_contacts is not None:
        out["attempted_contacts"] = design.attempted_contacts
    if design.response_rate is not None:
        out["response_rate"] = design.response_rate
    out["design_effect"] = design.design_effect
    return out


def regime_to_dict(regime) -> dict:
    if isinstance(regime, NoKnowledge):
        return {"kind": "none"}
    if isinstance(regime, LevelBound):
        return {"kind": "level", "lambda0": regime.lambda0, "lambda1": regime.lambda1}
    out = {"kind": "shift", "delta0": regime.delta0, "delta1": regime.delta1}
    if regime.respondent_range is not None:
        out["respondent_range"] = list(regime.respondent_range)
    return out


def tally_to_dict(tally: ResponseTally) -> dict:
    return asdict(tally)


def strata_to_list(strata: StratifiedPoll) -> list:
    return [
        {
            "label": s.label,
            "population_share": s.population_share,
            "respondents": s.respondents,
            "tally": tally_to_dict(s.tally),
            "response_rate": s.response_rate,
            "regime": regime_to_dict(s.regime),
        }
        for s in strata.strata
    ]


def _budget_report(budget: ErrorBudget, design, tally, regime, strata, confidence_multiplier):
    inputs = {}
    if design is not None:
        inputs["design"] = design_to_dict(design)
    if tally is not None:
        inputs["tally"] = tally_to_dict(tally)
    if regime is not None:
        inputs["regime"] = regime_to_dict(regime)
    if strata is not None:
        inputs["strata"] = strata_to_list(strata)
    resolved = {}
    if design is not None:
        resolved["response_rate"] = resolve_response_rate(design)
        resolved["rate_source"] = design.rate_source
        resolved["respondents"] = design.respondents
    if tally is not None and tally.two_party_total:
        resolved["two_party_share"] = two_party_share(tally)
    if strata is not None:
        resolved["respondents"] = strata.respondents
        resolved["cell_shares"] = {s.label: s.share for s in strata.strata}
    return {
        "schema_version": SCHEMA_VERSION,
        "report": "stratified_error_budget" if strata is not None else "error_budget",
        "inputs": inputs,
        "resolved": resolved,
        "multiplier": budget.multiplier,
        "confidence_multiplier": confidence_multiplier,
        "clipped": budget.clipped,
        "budget": budget.as_dict(),
        "percent": {
            "interval_lo": percent(budget.interval_lo),
            "interval_hi": percent(budget.interval_hi),
            "midpoint": percent(budget.midpoint),
            "tme": percent(budget.tme),
            "mose": percent(budget.mose),
        },
    }


def _sweep_report(table: SweepTable):
    return {
        "schema_version": SCHEMA_VERSION,
        "report": "tme_sweep",
        "inputs": {"design": design_to_dict(table.design), "tally": tally_to_dict(table.tally)},
        "resolved": {
            "response_rate": resolve_response_rate(table.design),
            "rate_source": table.design.rate_source,
            "two_party_share": two_party_share(table.tally),
            "respondents": table.design.respondents,
        },
        "multiplier": table.multiplier,
        "confidence_multiplier": table.confidence_multiplier,
        "columns": list(SWEEP_COLUMNS),
        "rows": [[getattr(r, c) for c in SWEEP_COLUMNS] for r in table.rows],
    }


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return "" if x is None else str(x)


def _csv(header: Sequence[str], rows: List[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


_BUDGET_CSV_FIELDS = (
    "interval_lo", "interval_hi", "midpoint", "clipped", "max_variance", "max_squared_bias",
    "max_mse", "tme", "mose", "multiplier",
)


def emit_report(result, format="json", *, design: Optional[PollDesign] = None,
                tally: Optional[ResponseTally] = None, regime=None,
                strata: Optional[StratifiedPoll] = None,
                confidence_multiplier=DEFAULT_CONFIDENCE) -> str:
    """Serialize an :class:`ErrorBudget` or :class:`SweepTable`.

    JSON carries the inputs, the resolved response rate and percent strings
    next to the full-precision values. CSV is one row per sweep step, or a
    single row for a budget.
    """
    if format not in ("json", "csv"):
        raise UnsupportedFormat(f"unsupported report format {format!r}", "format")
    if isinstance(result, SweepTable):
        if format == "csv":
            return _csv(SWEEP_COLUMNS, [[getattr(r, c) for c in SWEEP_COLUMNS] for r in result.rows])
        doc = _sweep_report(result)
    elif isinstance(result, ErrorBudget):
        if format == "csv":
            return _csv(_BUDGET_CSV_FIELDS, [[getattr(result, c) for c in _BUDGET_CSV_FIELDS]])
        doc = _budget_report(result, design, tally, regime, strata, confidence_multiplier)
    else:
        raise ValidationError(f"cannot report on {type(result).__name__}", "result")
    return json.dumps(doc, indent=2) + "\n"


def read_sweep_csv(text: str) -> List[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SWEEP_COLUMNS:
        raise ValidationError(f"unexpected sweep header {header}", "header")
    return [SweepRow(*(float(v) for v in row)) for row in reader]
