import csv
import io
import json

import numpy as np
import pytest
from scipy import integrate

from partial_copula import cli
from partial_copula.families import FamilySpec
from partial_copula.output import csv_cell
from partial_copula.simulate import cpit, sample_trivariate
from partial_copula.verify import Check


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize(
    "argv",
    [
        ["measure", "--family", "Gumbel3", "--theta", "2"],
        ["measure", "--family", "Frank3", "--theta", "abc"],
        ["measure", "--family", "FGM3", "--theta", "1.5"],
        ["measure"],
        ["partial", "--family", "Frank2", "--theta", "2"],
        ["grid", "--family", "Frank3", "--theta", "2", "--resolution", "8"],
        ["grid", "--family", "Frank3", "--theta", "2", "--z", "1.5"],
        ["estimate", "--reps", "0"],
        ["estimate", "--n", "500"],
        ["verify", "--order", "1"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2


def test_version(capsys):
    assert cli.main(["--version"]) == 0
    assert "0.1.0" in capsys.readouterr().out


def test_verify_exit_codes(monkeypatch, capsys, tmp_path):
    passing = [Check("a", 0.0, "0", True, 1e-8), Check("b", 2.0, "> 1", True)]
    monkeypatch.setattr(cli, "run_checks", lambda order, seed: passing)
    out = tmp_path / "checks.csv"
    assert cli.main(["verify", "--out", str(out)]) == 0
    assert "2/2 checks passed" in capsys.readouterr().out
    rows = read_csv(out.read_text())
    assert [r["passed"] for r in rows] == ["true", "true"]

    failing = passing + [Check("c", float("nan"), "", False, error="ValueError: x")]
    monkeypatch.setattr(cli, "run_checks", lambda order, seed: failing)
    assert cli.main(["verify"]) == 1
    assert "2/3 checks passed" in capsys.readouterr().out


def test_sample_is_reproducible(capsys):
    argv = ["sample", "--family", "Frank3", "--theta", "3", "--n", "50", "--seed", "7"]
    assert cli.main(argv) == 0
    first = capsys.readouterr().out
    assert cli.main(argv) == 0
    assert capsys.readouterr().out == first
    assert first.splitlines()[0] == "u1,u2,u3,v1,v3"
    assert len(first.splitlines()) == 51


def test_sample_cpit_of_independence(capsys):
    assert cli.main(["sample", "--family", "FGM3", "--theta", "0", "--n", "20"]) == 0
    for row in read_csv(capsys.readouterr().out):
        assert float(row["v1"]) == pytest.approx(float(row["u1"]), abs=1e-9)


def test_sample_csv_round_trip(tmp_path, capsys):
    out = tmp_path / "sample.csv"
    params = ["--theta", "0.5", "--theta", "0.3", "--theta", "0.4"]
    argv = ["sample", "--family", "Gauss3", *params, "--n", "40", "--seed", "9", "--out", str(out)]
    assert cli.main(argv) == 0
    rows = read_csv(out.read_text())
    spec = FamilySpec.of("Gauss3", 0.5, 0.3, 0.4)
    expected = cpit(sample_trivariate(spec, 40, seed=9), spec)
    assert len(rows) == 40
    for name in ("u1", "u2", "u3", "v1", "v3"):
        assert [row[name] for row in rows] == [csv_cell(x) for x in expected[name]]
        parsed = np.array([float(row[name]) for row in rows])
        assert parsed == pytest.approx(expected[name], rel=1e-9)


def test_sample_frank_with_large_theta(capsys):
    assert cli.main(["sample", "--family", "Frank3", "--theta", "40", "--n", "200", "--seed", "1"]) == 0
    values = np.array([[float(x) for x in row.values()] for row in read_csv(capsys.readouterr().out)])
    assert values.shape == (200, 5)
    assert np.all((values >= 0) & (values <= 1))


def test_sample_json(capsys):
    assert cli.main(["sample", "--family", "Clayton3", "--theta", "2", "--n", "10", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema_version"] == 1
    assert payload["generator"] == "Philox"
    assert len(payload["columns"]["v3"]) == 10


def test_measure_polynomial_family(capsys):
    assert cli.main(["measure", "--family", "PolyCE"]) == 0
    rows = {r["measure"]: r for r in read_csv(capsys.readouterr().out)}
    assert float(rows["kendall"]["partial"]) == pytest.approx(251 / 1800, abs=1e-9)
    assert float(rows["kendall"]["expected_conditional"]) == pytest.approx(377 / 2700, abs=1e-9)
    assert float(rows["kendall"]["gap"]) > 1e-5


def test_measure_simplified_and_bivariate(capsys):
    assert cli.main(["measure", "--family", "Clayton3", "--theta", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert max(m["gap"] for m in payload["measures"]) < 1e-12
    assert cli.main(["measure", "--family", "FGM2", "--theta", "0.9"]) == 0
    rows = {r["measure"]: r for r in read_csv(capsys.readouterr().out)}
    assert float(rows["spearman"]["value"]) == pytest.approx(0.3, abs=1e-9)


def test_partial_fgm_has_l2_column(capsys):
    assert cli.main(["partial", "--family", "FGM3", "--theta", "1", "--resolution", "4"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 16
    product = np.array([float(r["u1"]) * float(r["u2"]) for r in rows])
    assert np.array([float(r["cdf"]) for r in rows]) == pytest.approx(product, abs=1e-9)
    l2 = np.array([float(r["l2_projection"]) for r in rows])
    assert np.max(np.abs(l2 - product)) > 1e-4


def test_grid_densities_integrate_to_one(capsys):
    assert cli.main(["grid", "--family", "Frank3", "--theta", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    axis = np.array(payload["axis"])
    assert len(axis) == 64
    panels = [np.array(s["density"]) for s in payload["conditional"]]
    panels.append(np.array(payload["partial"]["density"]))
    for density in panels:
        mass = integrate.trapezoid(integrate.trapezoid(density, axis), axis)
        assert mass == pytest.approx(1.0, abs=0.02)


def test_grid_kendall_curve(capsys):
    assert cli.main(["grid", "--family", "PolyCE", "--resolution", "16", "--format", "json"]) == 0
    tau = json.loads(capsys.readouterr().out)["kendall"]["tau"]
    assert tau[0] == pytest.approx(0.0, abs=1e-12)
    assert tau[-1] == pytest.approx(1 / 450 + 5 / 18, abs=1e-12)


def test_grid_csv_independent_partial(capsys):
    assert cli.main(["grid", "--family", "FGM3", "--theta", "1", "--resolution", "16", "--z", "0.5"]) == 0
    rows = read_csv(capsys.readouterr().out)
    partial = [r for r in rows if r["panel"] == "partial"]
    assert len(partial) == 256
    assert partial[0]["z"] == ""
    for row in partial[::17]:
        x1, x2 = float(row["x1"]), float(row["x2"])
        expected = np.exp(-(x1**2 + x2**2) / 2) / (2 * np.pi)
        assert float(row["value"]) == pytest.approx(expected, rel=1e-8)
    assert sum(r["panel"] == "kendall" for r in rows) == 16


def test_estimate_writes_fits(tmp_path, capsys):
    out = tmp_path / "fits.csv"
    with pytest.warns(RuntimeWarning):
        code = cli.main(["estimate", "--n", "1000", "--reps", "2", "--seed", "3", "--out", str(out)])
    assert code == 0
    assert "scenario simplified" in capsys.readouterr().out
    rows = read_csv(out.read_text())
    assert len(rows) == 4
    assert {r["mode"] for r in rows} == {"Stepwise", "Joint"}
    assert all(np.isfinite(float(r["theta1"])) for r in rows)


def test_unwritable_output_exits_2(tmp_path):
    out = tmp_path / "missing" / "x.csv"
    assert cli.main(["sample", "--family", "FGM3", "--theta", "0", "--n", "5", "--out", str(out)]) == 2


@pytest.mark.slow
def test_full_verify(capsys):
    assert cli.main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "kendall partial PolyCE" in out
