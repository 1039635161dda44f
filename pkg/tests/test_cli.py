import json

import pandas as pd
import pytest
from typer.testing import CliRunner

from sojourn.cli import app
from sojourn.exporters.stats import RESULT_COLUMNS
from sojourn.models import Tolerances
from sojourn.runner import verdicts_from_csv

runner = CliRunner()


@pytest.fixture(autouse=True)
def quiet(monkeypatch):
    monkeypatch.setenv("SOJOURN_PROGRESS", "false")
    monkeypatch.setenv("SOJOURN_WORKERS", "2")


def _config(tmp_path, **overrides):
    data = {
        "run_name": "free",
        "system": {"name": "kinetic", "params": {"n": 1}},
        "localisation": {"kind": "radial-smooth", "dimension": 1},
        "points": [{"id": "a", "coords": [2.0, 0.5]}],
        "radii": {"r0": 10.0, "factor": 2.0, "count": 5},
    }
    data.update(overrides)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data))
    return str(p)


def test_catalog_list():
    result = runner.invoke(app, ["catalog-list"])
    assert result.exit_code == 0
    assert "pendulum" in result.output


def test_catalog_list_json():
    result = runner.invoke(app, ["catalog-list", "--json"])
    assert result.exit_code == 0
    entries = json.loads(result.output)
    assert len(entries) == 11
    assert {"name", "anchor", "flow", "chart", "defaults", "schema"} <= set(entries[0])


def test_sojourn_writes_results(tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(app, ["sojourn", "--config", _config(tmp_path), "--out", str(out)])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(out / "results.csv")
    assert list(df.columns) == RESULT_COLUMNS
    assert df["r"].tolist() == [10.0, 20.0, 40.0, 80.0, 160.0]
    assert set(df["mode"]) == {"continuous"}
    assert (out / "records.jsonl").read_text().count("\n") == 1
    assert (out / "reports" / "summary.csv").exists()
    assert (out / "run.log").exists()
    assert verdicts_from_csv(out / "results.csv") == {"a": "PASS"}


def test_sojourn_is_byte_stable(tmp_path):
    cfg = _config(tmp_path, random_points={"count": 2})
    for run in ("a", "b"):
        result = runner.invoke(app, ["sojourn", "--config", cfg, "--out", str(tmp_path / run), "--seed", "3"])
        assert result.exit_code == 0, result.output
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


def test_sojourn_discrete_flag(tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(app, ["sojourn", "--config", _config(tmp_path), "--out", str(out),
                                 "--radii", "10,x2,4", "--discrete"])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(out / "results.csv")
    assert set(df["mode"]) == {"discrete"}
    assert (df["t_star"] == df["t_star"].round()).all()


def test_sojourn_critical_point(tmp_path):
    out = tmp_path / "run"
    cfg = _config(tmp_path, points=[{"id": "rest", "coords": [1.0, 0.0]}])
    result = runner.invoke(app, ["sojourn", "--config", cfg, "--out", str(out)])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(out / "results.csv")
    assert df["T_f"].isna().all()
    assert (df["value"] == 0.0).all()
    assert verdicts_from_csv(out / "results.csv") == {"rest": "CRITICAL"}
    record = json.loads((out / "records.jsonl").read_text())
    assert record["verdict"] == "CRITICAL"


def test_verdicts_follow_tolerance(tmp_path):
    out = tmp_path / "run"
    runner.invoke(app, ["sojourn", "--config", _config(tmp_path), "--out", str(out)])
    # below the truncation floor the same series no longer passes
    assert verdicts_from_csv(out / "results.csv", Tolerances(acceptance=1e-14)) == {"a": "FAIL"}


def test_sojourn_dry_run(tmp_path):
    out = tmp_path / "run"
    result = runner.invoke(app, ["sojourn", "--config", _config(tmp_path), "--out", str(out), "--dry-run"])
    assert result.exit_code == 0, result.output
    assert "a\t10\t" in result.output
    assert not (out / "results.csv").exists()


def test_sojourn_without_points(tmp_path):
    result = runner.invoke(app, ["sojourn", "--config", _config(tmp_path, points=[]), "--out", str(tmp_path / "run")])
    assert result.exit_code == 2
    assert "no points" in result.output


def test_sojourn_point_outside_domain(tmp_path):
    cfg = _config(tmp_path, system={"name": "pendulum", "params": {"K": 1.0}},
                  localisation={"kind": "characteristic-ball", "dimension": 1},
                  points=[{"id": "slow", "coords": [0.0, 0.1]}])
    result = runner.invoke(app, ["sojourn", "--config", cfg, "--out", str(tmp_path / "run")])
    assert result.exit_code == 2
    assert "p^2/2 > K cos^2(q/2)" in result.output


def test_sojourn_discrete_with_characteristic_ball(tmp_path):
    cfg = _config(tmp_path, localisation={"kind": "characteristic-ball", "dimension": 1})
    result = runner.invoke(app, ["sojourn", "--config", cfg, "--out", str(tmp_path / "run"), "--discrete"])
    assert result.exit_code == 2
    assert "C^2" in result.output


def test_sojourn_bad_radii(tmp_path):
    result = runner.invoke(app, ["sojourn", "--config", _config(tmp_path), "--radii", "10,x2,2"])
    assert result.exit_code == 2


def test_sojourn_unreachable_quadrature_tolerance(tmp_path):
    cfg = _config(tmp_path, system={"name": "kinetic", "params": {"n": 2}},
                  localisation={"kind": "product-smooth", "dimension": 2},
                  points=[{"id": "a", "coords": [2.0, 1.0, 0.5, 0.25]}],
                  tolerances={"quadrature": 1e-30})
    out = tmp_path / "run"
    result = runner.invoke(app, ["sojourn", "--config", cfg, "--out", str(out)])
    assert result.exit_code == 3
    assert "error:" in result.output
    assert not (out / "results.csv").exists()


def test_verify_rf_characteristic_ball(tmp_path):
    cfg = _config(tmp_path, localisation={"kind": "characteristic-ball", "dimension": 2})
    result = runner.invoke(app, ["verify-rf", "--config", cfg, "--out", str(tmp_path / "rf")])
    assert result.exit_code == 0, result.output
    df = pd.read_csv(tmp_path / "rf" / "verify_rf.csv")
    status = dict(zip(df["name"], df["status"]))
    assert status["pair limit"] == "PASS"
    assert status["discrete/continuous agreement"] == "SKIPPED"


def test_verify_rf_bad_rho(tmp_path):
    cfg = _config(tmp_path, localisation={"kind": "radial-smooth", "dimension": 1, "rho": -1.0})
    result = runner.invoke(app, ["verify-rf", "--config", cfg])
    assert result.exit_code == 2


def test_quantum_window_too_small(tmp_path):
    result = runner.invoke(app, ["quantum", "--dim", "64", "--margin", "4", "--out", str(tmp_path)])
    assert result.exit_code == 1
    assert "largest usable radius" in result.output


def test_quantum_bad_margin(tmp_path):
    result = runner.invoke(app, ["quantum", "--dim", "64", "--margin", "40", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_accept_single_criterion(tmp_path):
    result = runner.invoke(app, ["accept", "--only", "3", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert " 3 PASS" in result.output
    assert (tmp_path / "acceptance.csv").exists()
