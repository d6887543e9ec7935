import dataclasses
import json

import pytest

from lcies.config import (ConfigParseError, SchemaError, UnitError,
                          example_config_path, load_config, parse_config,
                          serialize, validate)

from conftest import make_small_config


def test_example_config_loads():
    cfg = load_config(example_config_path())
    assert cfg.horizon_t == 24
    assert cfg.alpha == 0.9
    assert cfg.step_l == 5.0
    assert cfg.mode in (1, 2, 3)
    assert len(cfg.loads.electric) == 24
    assert len(cfg.uncertainty) == 24
    assert validate(cfg) == []


def test_round_trip(tmp_path):
    cfg = load_config(example_config_path())
    path = tmp_path / "copy.json"
    path.write_text(serialize(cfg))
    again = load_config(path)
    assert again == cfg


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigParseError):
        load_config(path)
    with pytest.raises(ConfigParseError):
        load_config(tmp_path / "missing.json")


def test_missing_key_names_it():
    raw = json.loads(example_config_path().read_text())
    del raw["ess"]["s_max"]
    with pytest.raises(SchemaError) as exc:
        parse_config(raw)
    assert exc.value.key == "ess.s_max"


def test_wrong_type_names_key():
    raw = json.loads(example_config_path().read_text())
    raw["horizon"]["T"] = "twenty-four"
    with pytest.raises(SchemaError) as exc:
        parse_config(raw)
    assert exc.value.key == "horizon.T"


def test_unit_error_on_bad_values(tmp_path):
    raw = json.loads(example_config_path().read_text())
    raw["ess"]["s_min"] = 500.0  # above s_max
    path = tmp_path / "bad_units.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(UnitError) as exc:
        load_config(path)
    assert "ess.capacity_order" in str(exc.value)


def test_validation_codes():
    cfg = make_small_config()
    bad = dataclasses.replace(
        cfg,
        alpha=1.5,
        step_l=-1.0,
        carbon=dataclasses.replace(cfg.carbon, e1=5000.0),
        ess=dataclasses.replace(cfg.ess, s_min=300.0),
    )
    codes = {v.code for v in validate(bad)}
    assert {"alpha.range", "step_l.positive", "carbon.threshold_order",
            "ess.capacity_order"} <= codes


def test_validation_clean_small_config():
    assert validate(make_small_config()) == []


def test_np_segment_consistency_checked():
    cfg = make_small_config()
    bad_np = dataclasses.replace(cfg.np_units[0], c_v=0.5)
    bad = dataclasses.replace(cfg, np_units=[bad_np])
    codes = {v.code for v in validate(bad)}
    assert "np[0].segment_consistency" in codes


def test_loads_from_csv(tmp_path):
    raw = json.loads(example_config_path().read_text())
    t = raw["horizon"]["T"]
    lines = ["t,electric_mw,heat_mw"]
    for i in range(t):
        lines.append(f"{i + 1},{150 + i},{80 + i}")
    (tmp_path / "loads.csv").write_text("\n".join(lines) + "\n")
    raw["loads"] = {"csv": "loads.csv"}
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(raw))
    cfg = load_config(path)
    assert cfg.loads.electric[0] == 150.0
    assert cfg.loads.heat[-1] == 80.0 + t - 1


def test_defaults_recorded_in_provenance():
    raw = json.loads(example_config_path().read_text())
    raw.pop("piecewise_segments", None)
    cfg = parse_config(raw)
    assert cfg.piecewise_segments == 8
    assert any("piecewise_segments" in p for p in cfg.provenance)


def test_tp_enabled_modes():
    cfg = make_small_config()
    assert cfg.tp_enabled(1)
    assert not cfg.tp_enabled(2)
    assert not cfg.tp_enabled(3)
