import json
from pathlib import Path

import pytest

from sojourn.catalog.flat import Kinetic
from sojourn.config import Settings, apply_overrides, load_config, localisation_function, resolve_points
from sojourn.errors import ConfigError
from sojourn.models import LocalisationSpec, PointSpec, RandomPoints, RunConfig, SystemSpec
from sojourn.presets import PRESETS, preset, preset_names

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_load_config_tmp(tmp_path):
    p = _write(tmp_path, {
        "run_name": "free",
        "output_dir": "data",
        "system": {"name": "kinetic", "params": {"n": 1}},
        "points": [{"id": "a", "coords": [2.0, 0.5]}],
        "radii": {"r0": 5.0, "factor": 2.0, "count": 4},
    })
    cfg = load_config(p)
    assert cfg.output_dir == "data"
    assert cfg.radii.values() == [5.0, 10.0, 20.0, 40.0]
    assert cfg.localisation.kind == "radial-smooth"


def test_load_config_rejects_bad_rho(tmp_path):
    p = _write(tmp_path, {"localisation": {"kind": "radial-smooth", "rho": 0.0}})
    with pytest.raises(ConfigError, match="rho"):
        load_config(p)


def test_load_config_rejects_non_mapping(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, [1, 2, 3]))


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.json")


def test_shipped_configs_load():
    for key in preset_names():
        cfg = load_config(CONFIGS / f"{key}.json")
        assert cfg == PRESETS[key]


def test_overrides():
    cfg = apply_overrides(RunConfig(random_points=RandomPoints(count=2)), out="elsewhere", seed=9,
                          radii="5,x3,4", tol=1e-2, discrete=True)
    assert cfg.output_dir == "elsewhere"
    assert cfg.seed == 9 and cfg.random_points.seed == 9
    assert cfg.radii.values() == [5.0, 15.0, 45.0, 135.0]
    assert cfg.tolerances.acceptance == 1e-2
    assert cfg.discrete


@pytest.mark.parametrize("radii", ["10,2,11", "10,x1,5", "10,x2,3", "ten,x2,5"])
def test_bad_radii_override(radii):
    with pytest.raises(ConfigError):
        apply_overrides(RunConfig(), radii=radii)


def test_product_smooth_rho_is_a_config_error():
    with pytest.raises(ConfigError, match="rho > 1"):
        localisation_function(LocalisationSpec(kind="product-smooth", dimension=2, rho=1.0))


def test_resolve_points_is_seeded():
    cfg = RunConfig(system=SystemSpec(name="kinetic"), random_points=RandomPoints(count=3), seed=4,
                    points=[PointSpec(id="a", coords=[2.0, 0.5])])
    first = resolve_points(cfg, Kinetic(1))
    second = resolve_points(cfg, Kinetic(1))
    assert [p.id for p in first] == ["a", "random-000", "random-001", "random-002"]
    assert first == second


def test_resolve_points_errors():
    with pytest.raises(ConfigError, match="no points"):
        resolve_points(RunConfig(), Kinetic(1))
    dup = [PointSpec(id="a", coords=[1.0, 1.0]), PointSpec(id="a", coords=[2.0, 1.0])]
    with pytest.raises(ConfigError, match="unique"):
        resolve_points(RunConfig(points=dup), Kinetic(1))


def test_settings_from_env(monkeypatch):
    monkeypatch.setenv("SOJOURN_WORKERS", "2")
    monkeypatch.setenv("SOJOURN_PROGRESS", "false")
    s = Settings()
    assert s.workers == 2
    assert s.progress is False


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        preset("nope")
    assert preset("pendulum") == PRESETS["pendulum"]
    assert preset("pendulum") is not PRESETS["pendulum"]
