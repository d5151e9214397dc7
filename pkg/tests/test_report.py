import json
import math

import numpy as np
import pytest

from pollbounds import (
    LevelBound,
    NoKnowledge,
    PollDesign,
    ResponseTally,
    ShiftBound,
    emit_report,
    error_budget,
    tme_sweep,
)
from pollbounds.exceptions import UnsupportedFormat, ValidationError
from pollbounds.report import SWEEP_COLUMNS, read_sweep_csv

FIG1_DESIGN = PollDesign(1000, attempted_contacts=50000)
FIG1_TALLY = ResponseTally(540, 460, 0)


class TestSweep:
    def test_zero_delta_endpoint(self):
        table = tme_sweep(FIG1_DESIGN, FIG1_TALLY, 0.5, 101)
        first = table.rows[0]
        assert first.delta == 0.0
        assert first.tme == pytest.approx(0.5 * math.sqrt(1 / 1000), rel=1e-12)
        assert first.mose == pytest.approx(0.031, abs=5e-4)
        assert first.mose / first.tme == pytest.approx(1.96, abs=1e-3)

    def test_multiplier_makes_margins_coincide(self):
        first = tme_sweep(FIG1_DESIGN, FIG1_TALLY, 0.5, 11, multiplier=1.96).rows[0]
        assert abs(first.tme - first.mose) < 1e-12

    def test_strictly_increasing(self):
        tme = tme_sweep(FIG1_DESIGN, FIG1_TALLY, 0.5, 101).column("tme")
        assert np.all(np.diff(tme) > 0)

    def test_band_geometry(self):
        table = tme_sweep(FIG1_DESIGN, FIG1_TALLY, 0.3, 7)
        for row in table.rows:
            assert row.midpoint == row.conventional == pytest.approx(0.54)
            assert row.band_hi - row.band_lo == pytest.approx(2 * row.tme, abs=1e-15)
            assert row.conv_hi - row.conv_lo == pytest.approx(2 * row.mose, abs=1e-15)

    @pytest.mark.parametrize("delta_max, steps", [(0.0, 5), (1.5, 5), (0.5, 1)])
    def test_bad_inputs(self, delta_max, steps):
        with pytest.raises(ValidationError):
            tme_sweep(FIG1_DESIGN, FIG1_TALLY, delta_max, steps)


class TestEmit:
    def test_nyt_json(self, nyt_design, nyt_tally):
        budget = error_budget(nyt_design, nyt_tally, NoKnowledge())
        doc = json.loads(emit_report(budget, "json", design=nyt_design, tally=nyt_tally,
                                     regime=NoKnowledge()))
        assert doc["schema_version"] == 1
        assert doc["percent"]["midpoint"] == "50.1%"
        assert doc["percent"]["tme"] == "49.3%"
        assert doc["budget"]["tme"] == budget.tme
        assert doc["inputs"]["regime"] == {"kind": "none"}
        assert doc["resolved"]["rate_source"] == "supplied"
        assert doc["multiplier"] == 1.0
        assert doc["clipped"] is False

    def test_regime_echo(self, nyt_design, nyt_tally):
        regime = ShiftBound(-0.1, 0.0, (0.6, 1.0))
        with pytest.warns(UserWarning):
            budget = error_budget(nyt_design, nyt_tally, regime)
        doc = json.loads(emit_report(budget, design=nyt_design, tally=nyt_tally, regime=regime))
        assert doc["inputs"]["regime"] == {"kind": "shift", "delta0": -0.1, "delta1": 0.0,
                                           "respondent_range": [0.6, 1.0]}

    def test_csv_sweep_round_trip(self):
        table = tme_sweep(FIG1_DESIGN, FIG1_TALLY, 0.5, 21)
        text = emit_report(table, "csv")
        assert text.splitlines()[0] == ",".join(SWEEP_COLUMNS)
        assert text.endswith("\n")
        assert read_sweep_csv(text) == list(table.rows)

    def test_minimal_sweep(self):
        text = emit_report(tme_sweep(FIG1_DESIGN, FIG1_TALLY, 1e-9, 2), "csv")
        assert len(text.splitlines()) == 3

    def test_byte_identical(self, nyt_design, nyt_tally):
        def render():
            b = error_budget(nyt_design, nyt_tally, LevelBound(0.3, 0.7))
            return emit_report(b, design=nyt_design, tally=nyt_tally, regime=LevelBound(0.3, 0.7))
        assert render() == render()

    def test_budget_csv(self, nyt_design, nyt_tally):
        text = emit_report(error_budget(nyt_design, nyt_tally, NoKnowledge()), "csv")
        header, row = text.splitlines()
        assert header.startswith("interval_lo,interval_hi,midpoint")
        assert float(row.split(",")[2]) == pytest.approx(0.501, abs=5e-4)

    def test_unsupported_format(self, nyt_design, nyt_tally):
        with pytest.raises(UnsupportedFormat):
            emit_report(error_budget(nyt_design, nyt_tally, NoKnowledge()), "xml")

    def test_sweep_json(self):
        doc = json.loads(emit_report(tme_sweep(FIG1_DESIGN, FIG1_TALLY, 0.2, 3)))
        assert doc["report"] == "tme_sweep"
        assert doc["columns"] == list(SWEEP_COLUMNS)
        assert len(doc["rows"]) == 3
        assert doc["resolved"]["rate_source"] == "derived"
