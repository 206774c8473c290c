from __future__ import annotations

import csv
import io
import json

import pytest

from iwahori_plancherel import cli
from iwahori_plancherel.qfield import RatFunc, parse_ratfunc

q = RatFunc.q()


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_eval_gl2():
    code, data = run_json("eval", "--group", "gln", "--partition", "1,1")
    assert code == cli.EXIT_OK
    assert data["fd1"] == "1/(1+q)"
    assert parse_ratfunc(data["fd1"]) == 1 / (1 + q)


def test_eval_22_engine_value_and_cm_annotation():
    code, data = run_json("eval", "--group", "gln", "--partition", "2,2")
    assert code == 0
    assert data["engine_value"] == "2/(1+q^2)"
    assert data["cM_displayed"] == cli.CM_22_DISPLAYED
    assert "Phi3(primitive 3rd roots)" in data["regular_roots"]


def test_eval_g2_integer_coefficients():
    code, data = run_json("eval", "--group", "g2", "--levi", "M1", "--trace-exp", "0")
    assert code == 0
    assert data["coefficients_integral"] is True


def test_eval_sp4_mh_prints_closed_form():
    code, data = run_json("eval", "--group", "sp4", "--levi", "Mh", "--trace-exp", "0")
    assert code == 0
    assert "displayed_closed_form" in data and "value" in data


def test_check_all_partitions_5():
    code, data = run_json("check", "--group", "gln", "--all-partitions", "5")
    assert code == 0 and data["ok"]
    assert len(data["rows"]) == 7
    assert all(row["agree"] for row in data["rows"])


def test_check_formal_degrees():
    code, data = run_json("check", "--formal-degrees")
    assert code == 0
    assert all(row["ok"] for row in data["rows"])


def test_check_with_oracle():
    code, data = run_json("check", "--group", "gln", "--partition", "1,1", "--oracle-q", "2,3,5", "--tol", "1e-9")
    assert code == 0
    assert data["rows"][0]["oracle_max_relerr"] < 1e-9


def test_check_failure_is_machine_readable():
    # the Sp4 displayed closed forms do not match the engine under the default measure
    code, data = run_json("check", "--group", "sp4")
    assert code == cli.EXIT_FAILED
    assert not data["ok"]
    assert {f["target"] for f in data["failures"]} <= {"Mh", "Ms"}
    assert data["failures"]


def test_report_gln_4_csv(tmp_path):
    path = tmp_path / "cells.csv"
    code, data = run_json("report", "--group", "gln", "-n", "4", "-o", str(path))
    assert code == 0 and data["rows"] == 5
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == cli.CSV_COLUMNS
    (row22,) = [r for r in rows if r["partition/levi"] == "2,2"]
    assert "Phi3" in row22["regular_roots"]


def test_report_gln_2_csv(tmp_path):
    path = tmp_path / "cells.csv"
    code, _ = run("report", "--group", "gln", "-n", "2", "-o", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    (lowest,) = [r for r in rows if r["partition/levi"] == "1,1"]
    assert lowest["value"] == "1/(1+q)"
    assert lowest["singular_roots"] == "Phi2(-1)"


def test_report_sp4_json(tmp_path):
    path = tmp_path / "sp4.json"
    code, _ = run("report", "--group", "sp4", "-o", str(path))
    assert code == 0
    rows = json.loads(path.read_text())["rows"]
    assert {r["levi"] for r in rows} == {"Mh", "Ms"}
    assert all("displayed_closed_form" in r for r in rows)


def test_report_io_error(tmp_path):
    code, _ = run("report", "--group", "gln", "-n", "2", "-o", str(tmp_path / "missing" / "x.csv"))
    assert code == cli.EXIT_IO


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--group", "sp4", "--partition", "1,1"],
        ["eval", "--group", "gln", "--levi", "Mh"],
        ["eval", "--group", "g2", "--levi", "Mh"],
        ["eval", "--group", "gln", "--partition", "x"],
        ["eval", "--group", "gln"],
        ["frobnicate"],
        ["oracle", "--group", "gln", "--partition", "1,1", "--oracle-q", "0.5"],
    ],
)
def test_config_errors(argv, capsys):
    code, _ = run(*argv)
    assert code == cli.EXIT_CONFIG


def test_contour_pole_exit_code(monkeypatch):
    from iwahori_plancherel.integrand import ContourPoleError

    def boom(*args, **kwargs):
        raise ContourPoleError("pole on |z| = 1")

    monkeypatch.setattr(cli, "gln_record", boom)
    code, _ = run("eval", "--group", "gln", "--partition", "1,1")
    assert code == cli.EXIT_CONTOUR


def test_oracle_command():
    code, data = run_json("oracle", "--group", "gln", "--partition", "1,1,1", "--oracle-q", "2", "--grid", "2048")
    assert code == 0
    assert data[0]["passed"]


def test_deterministic_json():
    argv = ["eval", "--group", "gln", "--partition", "1,2", "--trace"]
    assert run(*argv)[1] == run(*argv)[1]


def test_printed_values_round_trip():
    _, data = run_json("report", "--group", "gln", "-n", "4")
    for record in data["rows"]:
        for key in ("cM", "closed_form", "engine_value", "fd1"):
            value = parse_ratfunc(record[key])
            assert value.to_text() == record[key]
    _, rows = run_json("eval", "--group", "g2")
    for record in rows:
        assert parse_ratfunc(record["value"]).to_text() == record["value"]


def test_text_and_csv_formats():
    code, text = run("eval", "--group", "gln", "--partition", "1,1", "--format", "text")
    assert code == 0 and "fd1: 1/(1+q)" in text
    code, text = run("eval", "--group", "gln", "--partition", "1,1", "--format", "csv")
    assert code == 0 and text.splitlines()[0] == ",".join(cli.CSV_COLUMNS)
