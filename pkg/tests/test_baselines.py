import numpy as np
import pytest

from lcies import milp
from lcies.baselines import (ScenarioSet, attach_reserve_sa,
                             attach_reserve_saa, build_baseline,
                             minimal_reserve_sa, minimal_reserve_saa,
                             run_baseline, sample_scenarios,
                             write_baseline_csv)
from lcies.chance import min_reserve_bruteforce
from lcies.milp import LinearModel
from lcies.sequences import ProbSequence, expectation

from conftest import make_small_config


def _min_reserve_model(attach, *args):
    m = LinearModel()
    r = m.add_var("reserve", 0.0, 1000.0)
    attach(m, [m.var(r)], *args)
    m.set_objective(m.var(r))
    res = milp.solve(m, limits={"mip_gap": 0.0})
    assert res.status == "optimal"
    return res["reserve"]


def test_sample_scenarios_seeded():
    cfg = make_small_config()
    a = sample_scenarios(cfg.uncertainty, 50, seed=9)
    b = sample_scenarios(cfg.uncertainty, 50, seed=9)
    c = sample_scenarios(cfg.uncertainty, 50, seed=10)
    assert a == b
    assert a != c
    assert a.n_periods == cfg.horizon_t
    assert a.n_scenarios == 50
    flat = [v for row in a.values for v in row]
    assert min(flat) >= 0.0
    assert max(flat) <= 40.0  # wind only, solar rated 0 in the fixture
    with pytest.raises(ValueError):
        sample_scenarios(cfg.uncertainty, 0, seed=1)


def test_minimal_reserve_oracles():
    outputs = (0.0, 5.0, 10.0)
    assert minimal_reserve_sa(outputs, 6.5) == pytest.approx(6.5)
    assert minimal_reserve_saa(outputs, 6.5, 1.0) == pytest.approx(6.5)
    # ceil(0.8*3) = 3: all scenarios must be covered
    assert minimal_reserve_saa(outputs, 6.5, 0.8) == pytest.approx(6.5)
    # ceil(0.5*3) = 2: drop the worst scenario
    assert minimal_reserve_saa(outputs, 6.5, 0.5) == pytest.approx(1.5)
    assert minimal_reserve_saa(outputs, 6.5, 0.0) == 0.0
    assert minimal_reserve_sa((20.0, 30.0), 6.5) == 0.0


def test_sa_milp_matches_oracle():
    scen = ScenarioSet(values=((0.0, 5.0, 10.0),), seed=0)
    got = _min_reserve_model(attach_reserve_sa, [6.5], scen)
    assert got == pytest.approx(6.5, abs=1e-6)


def test_saa_milp_matches_oracle():
    scen = ScenarioSet(values=((0.0, 5.0, 10.0),), seed=0)
    for alpha in (0.0, 0.5, 0.8, 1.0):
        got = _min_reserve_model(attach_reserve_saa, [6.5], scen, alpha)
        want = minimal_reserve_saa((0.0, 5.0, 10.0), 6.5, alpha)
        assert got == pytest.approx(want, abs=1e-6), alpha


def test_saa_alpha_one_coincides_with_sa():
    rng = np.random.default_rng(31)
    for _ in range(10):
        outputs = tuple(rng.uniform(0.0, 20.0, 6))
        e_t = float(rng.uniform(5.0, 15.0))
        sa = _min_reserve_model(attach_reserve_sa, [e_t],
                                ScenarioSet((outputs,), 0))
        saa = _min_reserve_model(attach_reserve_saa, [e_t],
                                 ScenarioSet((outputs,), 0), 1.0)
        assert sa == pytest.approx(saa, abs=1e-6)


def test_dst_saa_consistency_on_matching_support():
    # equal-probability scenarios at a 3-point sequence's support make the
    # sample problem identical to the discrete one
    seq = ProbSequence(5.0, [1 / 3, 1 / 3, 1 / 3])
    e_t = expectation(seq)
    outputs = (0.0, 5.0, 10.0)
    dst = min_reserve_bruteforce(seq, 0.8, e_t)
    saa = minimal_reserve_saa(outputs, e_t, 0.8)
    sa = minimal_reserve_sa(outputs, e_t)
    assert dst == pytest.approx(saa)
    assert sa == pytest.approx(min_reserve_bruteforce(seq, 1.0, e_t))


def test_saa_milp_randomized_against_oracle():
    rng = np.random.default_rng(5)
    for _ in range(15):
        n = int(rng.integers(2, 9))
        outputs = tuple(rng.uniform(0.0, 25.0, n))
        e_t = float(rng.uniform(0.0, 20.0))
        alpha = float(rng.uniform(0.0, 1.0))
        got = _min_reserve_model(attach_reserve_saa, [e_t],
                                 ScenarioSet((outputs,), 0), alpha)
        assert got == pytest.approx(
            minimal_reserve_saa(outputs, e_t, alpha), abs=1e-6)


def test_full_baseline_run(tmp_path):
    cfg = make_small_config()
    rows = run_baseline(cfg, "saa", n_scenarios=20, runs=2, seed=3)
    assert len(rows) == 2
    assert all(r.objective_cny > 0 for r in rows)
    assert all(r.wall_ms > 0 for r in rows)
    path = tmp_path / "baseline.csv"
    write_baseline_csv(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "method,run,objective_cny,emissions_t,wall_ms"
    assert len(lines) == 3


def test_baseline_model_has_no_dst_block():
    cfg = make_small_config()
    scen = sample_scenarios(cfg.uncertainty, 10, seed=0)
    bundle = build_baseline(cfg, "sa", scen)
    assert not [n for n in bundle.model.var_names if n.startswith("dst_z")]
    with pytest.raises(ValueError):
        build_baseline(cfg, "nope", scen)
