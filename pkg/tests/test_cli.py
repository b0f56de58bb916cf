import csv
import io
import json
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest
from click.testing import CliRunner

from manhattan_walk.cli import cli
from manhattan_walk.report import Table, fmt_float, fraction_from_json, fraction_json


@pytest.fixture
def runner():
    return CliRunner()


def rows_of(csv_text):
    body = "\n".join(ln for ln in csv_text.splitlines() if not ln.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_formula_two_dimensions(runner):
    res = runner.invoke(cli, ["formula", "--d", "2", "--n-max", "5"])
    assert res.exit_code == 0
    rows = rows_of(res.output)
    assert [r["msd"] for r in rows] == ["0/1", "1/1", "3/1", "5/1", "7/1", "9/1"]
    assert [r["msd_float"] for r in rows] == ["0", "1", "3", "5", "7", "9"]
    assert res.output.startswith("# schema: manhattan-walk/formula v1\n")


def test_compare_oracle_only(runner):
    res = runner.invoke(cli, ["compare", "--d", "3", "--n-max", "2", "--chains", "0"])
    assert res.exit_code == 0
    rows = rows_of(res.output)
    assert [r["formula_msd"] for r in rows] == [r["oracle_msd"] for r in rows]
    assert {r["exact_verdict"] for r in rows} == {"PASS"}
    assert {r["mc_verdict"] for r in rows} == {"SKIP"}


def test_compare_with_monte_carlo(runner):
    res = runner.invoke(cli, ["compare", "--d", "2", "--n-max", "6", "--chains", "20000",
                              "--format", "json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert all(r["exact_verdict"] == "PASS" for r in doc["rows"])
    assert all(abs(r["z"]) <= 5 for r in doc["rows"])
    assert fraction_from_json(doc["rows"][3]["formula_msd"]) == 5


def test_census(runner):
    res = runner.invoke(cli, ["census", "--d", "5", "--format", "json"])
    assert res.exit_code == 0
    doc = json.loads(res.stdout)
    assert doc["meta"]["count"] == 16 and doc["meta"]["verdict"] == "PASS"
    assert len(doc["rows"]) == 16
    assert len(doc["meta"]["environments"]) == 16 and [1, 1, 1, 1, 1] in doc["meta"]["environments"]


def test_census_iid_has_no_verdict(runner):
    res = runner.invoke(cli, ["census", "--d", "3", "--rule", "iid:5"])
    assert res.exit_code == 0
    assert "N/A" in res.output


def test_coupling(runner):
    res = runner.invoke(cli, ["coupling", "--n-max", "4"])
    assert res.exit_code == 0
    assert [r["verdict"] for r in rows_of(res.output)] == ["PASS"] * 5


def test_coupling_wrong_dimension(runner):
    res = runner.invoke(cli, ["coupling", "--d", "3"])
    assert res.exit_code == 2
    assert "only exists for d=2" in res.output


def test_bad_dimension_is_usage_error(runner):
    res = runner.invoke(cli, ["formula", "--d", "1"])
    assert res.exit_code == 2


def test_svg_rejected_for_census(runner):
    assert runner.invoke(cli, ["census", "--format", "svg"]).exit_code == 2


def test_exact_command(runner):
    res = runner.invoke(cli, ["exact", "--d", "2", "--n-max", "4"])
    assert res.exit_code == 0
    rows = rows_of(res.output)
    assert rows[4]["return_probability"] == "1/8"
    assert rows[3]["return_probability"] == ""
    assert {r["verdict"] for r in rows} == {"PASS"}


def test_exact_iid_rule(runner):
    res = runner.invoke(cli, ["exact", "--d", "2", "--n-max", "3", "--rule", "iid:3"])
    assert res.exit_code == 0
    assert "verdict" not in rows_of(res.output)[0]


def test_budget_exit_code(runner):
    res = runner.invoke(cli, ["exact", "--d", "3", "--n-max", "60", "--max-sites", "1000"])
    assert res.exit_code == 3
    assert "d=3, n=60" in res.output


def test_bad_rule(runner):
    assert runner.invoke(cli, ["exact", "--rule", "zigzag"]).exit_code == 2


def test_env_override_and_flag_precedence(runner):
    res = runner.invoke(cli, ["formula", "--n-max", "1"], env={"MWALK_D": "3"})
    assert "# d: 3" in res.output
    res = runner.invoke(cli, ["formula", "--n-max", "1", "--d", "4"], env={"MWALK_D": "3"})
    assert "# d: 4" in res.output


def test_simulate_csv_columns(runner):
    res = runner.invoke(cli, ["simulate", "--d", "3", "--n", "4", "--chains", "100",
                              "--stride", "2"])
    assert res.exit_code == 0
    rows = rows_of(res.output)
    assert [r["n"] for r in rows] == ["0", "2", "4"]
    assert list(rows[0]) == ["n", "mean_1", "mean_2", "mean_3", "mean_stderr_1",
                             "mean_stderr_2", "mean_stderr_3", "msd_estimate", "stderr",
                             "n_chains"]
    assert '"seed": 1' in res.output.splitlines()[1]


@pytest.mark.parametrize("command", [
    ["simulate", "--d", "3", "--n", "30", "--chains", "5000", "--seed", "9"],
    ["compare", "--d", "3", "--n-max", "8", "--chains", "5000", "--seed", "9"],
])
@pytest.mark.parametrize("fmt", ["csv", "json", "svg"])
def test_outputs_byte_stable_across_workers(runner, tmp_path, command, fmt):
    paths = []
    for workers in (1, 8):
        p = tmp_path / f"out_{workers}.{fmt}"
        res = runner.invoke(cli, command + ["--workers", str(workers), "--format", fmt,
                                            "--out", str(p)])
        assert res.exit_code == 0, res.output
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_report_svg(runner, tmp_path):
    out = tmp_path / "msd.svg"
    res = runner.invoke(cli, ["report", "--d", "3", "--n-max", "12", "--chains", "2000",
                              "--out", str(out)])
    assert res.exit_code == 0
    root = ET.fromstring(out.read_text())
    assert root.get("viewBox") == "0 0 800 600"
    text = out.read_text()
    for label in ("formula", "asymptote n*3/2", "exact oracle", "Monte Carlo"):
        assert label in text
    assert text.count("<circle") == 13  # one oracle point per n


def test_report_oracle_limited_by_budget(runner):
    res = runner.invoke(cli, ["report", "--d", "3", "--n-max", "30", "--chains", "0",
                              "--max-sites", "2000", "--format", "json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    cut = doc["meta"]["oracle_n_max"]
    assert 0 < cut < 30
    assert doc["rows"][cut]["oracle_msd"] is not None
    assert doc["rows"][cut + 1]["oracle_msd"] is None


def test_formula_svg_is_wellformed(runner):
    res = runner.invoke(cli, ["formula", "--d", "4", "--n-max", "20", "--format", "svg"])
    ET.fromstring(res.output)


def test_table_rendering():
    t = Table("demo", ["a", "b", "c", "d"], [[F(1, 3), 0.1, True, None]], meta={"k": 1})
    assert t.to_csv() == "# schema: manhattan-walk/demo v1\n# k: 1\na,b,c,d\n1/3,0.10000000000000001,true,\n"
    doc = json.loads(t.to_json())
    assert doc["rows"][0]["a"] == {"num": "1", "den": "3"}
    assert fmt_float(float("nan")) == "nan"
    assert fraction_json(F(-7, 2)) == {"num": "-7", "den": "2"}
