import csv
import io
import json

import pytest

from pollbounds.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_report_none(specs_dir, capsys):
    code, out, err = run(["report", specs_dir / "nyt_siena_none.json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["percent"]["midpoint"] == "50.1%"
    assert doc["budget"]["tme"] == pytest.approx(0.493, abs=5e-4)
    assert "supplied" in err


def test_report_shift(specs_dir, capsys):
    code, out, _ = run(["report", specs_dir / "nyt_siena_shift.json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["budget"]["midpoint"] == pytest.approx(0.495, abs=5e-4)
    assert doc["budget"]["tme"] == pytest.approx(0.051, abs=5e-4)


def test_report_stratified(specs_dir, capsys):
    code, out, _ = run(["report", specs_dir / "two_strata_level.json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["report"] == "stratified_error_budget"
    assert doc["budget"]["midpoint"] == pytest.approx(0.5004)


def test_report_to_file(specs_dir, tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(["report", specs_dir / "nyt_siena_level.json", "--format", "csv",
                           "--multiplier", "1.96", "--out", out], capsys)
    assert code == 0 and stdout == ""
    row = next(csv.DictReader(io.StringIO(out.read_text())))
    assert float(row["multiplier"]) == 1.96


def test_lambda_order_exit_2(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({
        "design": {"respondents": 10, "response_rate": 0.5},
        "tally": {"count_a": 5, "count_b": 5},
        "regime": {"kind": "level", "lambda0": 0.8, "lambda1": 0.2},
    }))
    code, _, err = run(["report", path], capsys)
    assert code == 2
    assert "lambda" in err


def test_infeasible_exit_3(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({
        "design": {"respondents": 10, "response_rate": 0.5},
        "tally": {"count_a": 5, "count_b": 5},
        "regime": {"kind": "shift", "delta0": -0.1, "delta1": 0.0, "respondent_range": [0, 0.05]},
    }))
    code, _, err = run(["report", path], capsys)
    assert code == 3
    assert "infeasible" in err


def test_missing_file_exit_2(tmp_path, capsys):
    assert run(["report", tmp_path / "nope.json"], capsys)[0] == 2


def test_sweep_hypothetical_poll(specs_dir, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    args = ["sweep", specs_dir / "figure1_hypothetical.json", "--delta-max", "0.5",
            "--steps", "101", "--out", out]
    assert run(args, capsys)[0] == 0
    first = out.read_bytes()
    rows = list(csv.DictReader(io.StringIO(first.decode())))
    assert len(rows) == 101
    assert float(rows[0]["delta"]) == 0.0
    assert float(rows[0]["mose"]) / float(rows[0]["tme"]) == pytest.approx(1.96, abs=1e-3)
    assert run(args, capsys)[0] == 0
    assert out.read_bytes() == first


def test_sweep_steps_one_exit_2(specs_dir, capsys):
    code, _, _ = run(["sweep", specs_dir / "figure1_hypothetical.json", "--steps", "1"], capsys)
    assert code == 2


def test_oracle_check_nyt(specs_dir, capsys):
    code, out, _ = run(["oracle-check", specs_dir / "nyt_siena_none.json", "--reps", "20000"],
                       capsys)
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") == 5


def test_oracle_check_strata(specs_dir, capsys):
    code, out, _ = run(["oracle-check", specs_dir / "two_strata_level.json"], capsys)
    assert code == 0
    assert "stratified grid max MSE" in out


def test_oracle_check_full_response(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({
        "design": {"respondents": 100, "attempted_contacts": 100},
        "tally": {"count_a": 60, "count_b": 40},
        "regime": {"kind": "none"},
    }))
    code, out, _ = run(["oracle-check", path, "--grid", "401", "--reps", "5000"], capsys)
    assert code == 0
    assert "max squared bias: closed 0," in out


def test_oracle_disagreement_exit_4(specs_dir, capsys, monkeypatch):
    import pollbounds.cli as cli

    real = cli.error_budget

    def off_by_one_percent(*args, **kwargs):
        b = real(*args, **kwargs)
        return type(b)(**{**b.__dict__, "max_mse": b.max_mse + 0.01})

    monkeypatch.setattr(cli, "error_budget", off_by_one_percent)
    code, out, _ = run(["oracle-check", specs_dir / "nyt_siena_level.json", "--reps", "2000"],
                       capsys)
    assert code == 4
    assert "FAIL" in out
