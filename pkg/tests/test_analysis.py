import dataclasses
import json

import pytest

from lcies import analysis
from lcies.cli import main
from lcies.config import example_config_path, serialize
from lcies.dispatch import DispatchSchedule

from conftest import make_small_config


def test_run_mode_artifacts(tmp_path, small_config):
    report = analysis.run_mode(small_config, 1, out_dir=tmp_path,
                               write_lp=True)
    assert report.status == "optimal"
    assert (tmp_path / "schedule.csv").exists()
    assert (tmp_path / "ledger.csv").exists()
    assert (tmp_path / "costs.json").exists()
    assert (tmp_path / "diagnostics.json").exists()
    assert (tmp_path / "model.lp").exists()
    assert (tmp_path / "dispatch.png").stat().st_size > 0
    assert (tmp_path / "storage.png").stat().st_size > 0
    seq_files = sorted((tmp_path / "sequences").glob("seq_t*.csv"))
    assert len(seq_files) == small_config.horizon_t
    costs = json.loads((tmp_path / "costs.json").read_text())
    assert costs["total"] == pytest.approx(report.costs.total)


def test_run_mode_infeasible_reported(small_config):
    cfg = dataclasses.replace(
        small_config,
        alpha=0.0,
        loads=dataclasses.replace(small_config.loads,
                                  heat=(130.0,) * small_config.horizon_t))
    report = analysis.run_mode(cfg, 1)
    assert report.status == "infeasible"
    assert report.schedule is None


def test_compare_modes(tmp_path, small_config):
    reports = analysis.compare_modes(small_config, out_dir=tmp_path)
    assert [r.mode for r in reports] == [1, 2, 3]
    lines = (tmp_path / "compare.csv").read_text().splitlines()
    assert lines[0].startswith("mode,status,total_cost_cny")
    assert len(lines) == 4
    assert (tmp_path / "compare.png").stat().st_size > 0


def test_sweep(tmp_path, small_config):
    points = analysis.sweep_carbon_price(small_config, 0.0, 100.0, 50.0,
                                         mode=1, out_dir=tmp_path)
    assert [p.price_cny_per_t for p in points] == [0.0, 50.0, 100.0]
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == ("price_cny_per_t,emissions_t,total_cost_cny,"
                        "tp_energy_mwh,gc_energy_mwh")
    assert (tmp_path / "sweep.png").stat().st_size > 0
    with pytest.raises(ValueError):
        analysis.sweep_carbon_price(small_config, 0.0, 10.0, 0.0)


def test_sweep_stepped_scale(small_config):
    points = analysis.sweep_carbon_price(small_config, 120.0, 120.0, 60.0,
                                         mode=1, stepped_scale=True)
    baseline = analysis.run_mode(small_config, 1)
    # scaling to k2 reproduces the configured stepped policy
    assert points[0].total_cost_cny == pytest.approx(baseline.costs.total,
                                                     rel=1e-6)


def test_verify_chance_on_solved_schedule(small_config):
    report = analysis.run_mode(small_config, 1)
    ver = analysis.verify_chance(small_config, report.schedule, 20000,
                                 seed=1)
    assert ver.passed
    assert len(ver.violation_prob) == small_config.horizon_t
    assert ver.worst_violation_prob <= ver.threshold


def test_verify_chance_fails_without_reserve(small_config):
    report = analysis.run_mode(small_config, 1)
    stripped = dataclasses.replace(
        report.schedule,
        tp_r=[[0.0] * small_config.horizon_t],
        gc_r=[[0.0] * small_config.horizon_t],
        ess_r=[0.0] * small_config.horizon_t)
    ver = analysis.verify_chance(small_config, stripped, 20000, seed=1)
    assert not ver.passed


# -- CLI ---------------------------------------------------------------------

def _write_config(tmp_path, config):
    path = tmp_path / "sys.json"
    path.write_text(serialize(config))
    return path


def test_cli_run_and_verify(tmp_path, small_config):
    cfg_path = _write_config(tmp_path, small_config)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_path), "--mode", "1",
                 "--out", str(out)]) == 0
    assert (out / "schedule.csv").exists()
    assert main(["verify", "--config", str(cfg_path),
                 "--schedule", str(out / "schedule.csv"),
                 "--samples", "20000", "--seed", "1"]) == 0


def test_cli_exit_codes(tmp_path, small_config):
    assert main(["run", "--config", "/nonexistent.json",
                 "--out", str(tmp_path)]) == 1
    assert main(["nonsense"]) == 1
    infeasible = dataclasses.replace(
        small_config,
        alpha=0.0,
        loads=dataclasses.replace(small_config.loads,
                                  heat=(130.0,) * small_config.horizon_t))
    cfg_path = _write_config(tmp_path, infeasible)
    assert main(["run", "--config", str(cfg_path), "--mode", "1",
                 "--out", str(tmp_path / "o")]) == 2


def test_cli_dst_oracle(tmp_path, capsys):
    seq_path = tmp_path / "seq.csv"
    seq_path.write_text("index,power_mw,prob\n0,0,0.2\n1,5,0.3\n2,10,0.5\n")
    assert main(["dst-oracle", "--alpha", "0.8", "--seq", str(seq_path)]) == 0
    out = capsys.readouterr().out
    assert "minimal reserve 1.500000 MW" in out
    assert main(["dst-oracle", "--alpha", "2.0", "--seq", str(seq_path)]) == 1


def test_cli_sweep_and_baseline(tmp_path, small_config):
    cfg_path = _write_config(tmp_path, small_config)
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(cfg_path), "--price-from", "0",
                 "--price-to", "50", "--price-step", "50", "--mode", "1",
                 "--out", str(out)]) == 0
    assert (out / "sweep.csv").exists()
    bl = tmp_path / "bl"
    assert main(["baseline", "--config", str(cfg_path), "--method", "sa",
                 "--scenarios", "10", "--runs", "1", "--seed", "2",
                 "--out", str(bl)]) == 0
    assert (bl / "baseline.csv").exists()


def test_cli_compare(tmp_path, small_config):
    cfg_path = _write_config(tmp_path, small_config)
    out = tmp_path / "cmp"
    assert main(["compare", "--config", str(cfg_path),
                 "--out", str(out)]) == 0
    assert (out / "compare.csv").exists()


def test_cli_alpha_override(tmp_path, small_config):
    cfg_path = _write_config(tmp_path, small_config)
    out = tmp_path / "a0"
    assert main(["run", "--config", str(cfg_path), "--mode", "1",
                 "--alpha", "0.0", "--out", str(out)]) == 0
    sched = DispatchSchedule.from_csv(out / "schedule.csv", small_config)
    # without a chance constraint nothing forces reserve procurement
    assert sum(sched.total_reserve(t)
               for t in range(small_config.horizon_t)) == pytest.approx(0.0)
    assert main(["run", "--config", str(cfg_path), "--alpha", "1.5",
                 "--out", str(out)]) == 1
