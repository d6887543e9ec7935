import math
import re

import numpy as np
import pytest

from lcies.milp import (BINARY, CHECK_TOL, LinearModel, LinExpr, ModelError,
                        add_piecewise_quadratic, export_lp, solve)


def test_linexpr_algebra():
    e = LinExpr({0: 2.0}, const=1.0)
    f = LinExpr({0: -1.0, 1: 3.0})
    g = 2.0 * (e + f) - 1.0
    assert g.terms == {0: 2.0, 1: 6.0}
    assert g.const == 1.0
    assert (-g).terms == {0: -2.0, 1: -6.0}
    assert g.value([1.0, 0.5]) == pytest.approx(6.0)


def test_duplicate_names_rejected():
    m = LinearModel()
    m.add_var("x")
    with pytest.raises(ModelError):
        m.add_var("x")
    m.add_constraint(m.var(0), "<=", 1.0, label="c")
    with pytest.raises(ModelError):
        m.add_constraint(m.var(0), "<=", 2.0, label="c")
    with pytest.raises(ModelError):
        m.add_constraint(m.var(0), "<", 1.0)


def test_constant_folding_into_rhs():
    m = LinearModel()
    x = m.add_var("x", 0.0, 10.0)
    # x + 3 <= 5 is x <= 2
    m.add_constraint(m.var(x) + 3.0, "<=", 5.0, label="fold")
    m.set_objective(-1.0 * m.var(x))
    res = solve(m)
    assert res.status == "optimal"
    assert res["x"] == pytest.approx(2.0, abs=1e-9)


def test_simple_lp():
    m = LinearModel()
    x = m.add_var("x", 0.0, 4.0)
    y = m.add_var("y", 0.0, 4.0)
    m.add_constraint(m.var(x) + m.var(y), "<=", 5.0, label="cap")
    m.set_objective(-2.0 * m.var(x) - 1.0 * m.var(y))
    res = solve(m)
    assert res.status == "optimal"
    assert res.objective_value == pytest.approx(-9.0, abs=1e-8)
    assert res["x"] == pytest.approx(4.0, abs=1e-8)


def test_binary_knapsack():
    m = LinearModel()
    values = [6.0, 10.0, 12.0]
    weights = [1.0, 2.0, 3.0]
    xs = [m.add_var(f"x{i}", kind=BINARY) for i in range(3)]
    w = LinExpr()
    obj = LinExpr()
    for x, wt, v in zip(xs, weights, values):
        w.add_term(x, wt)
        obj.add_term(x, -v)
    m.add_constraint(w, "<=", 5.0, label="weight")
    m.set_objective(obj)
    res = solve(m)
    assert res.status == "optimal"
    assert res.objective_value == pytest.approx(-22.0)
    assert res["x1"] == pytest.approx(1.0)
    assert res["x2"] == pytest.approx(1.0)


def test_infeasible_and_unbounded():
    m = LinearModel()
    x = m.add_var("x", 0.0, 1.0)
    m.add_constraint(m.var(x), ">=", 2.0, label="too_high")
    assert solve(m).status == "infeasible"

    m2 = LinearModel()
    y = m2.add_var("y", 0.0, math.inf)
    m2.set_objective(-1.0 * m2.var(y))
    assert solve(m2).status in ("unbounded", "limit")


def test_empty_model():
    m = LinearModel()
    res = solve(m)
    assert res.status == "optimal"
    assert res.objective_value == 0.0


def test_objective_constant_carried():
    m = LinearModel()
    x = m.add_var("x", 1.0, 2.0)
    m.set_objective(m.var(x) + 10.0)
    res = solve(m)
    assert res.objective_value == pytest.approx(11.0, abs=1e-9)


def test_expr_bounds():
    m = LinearModel()
    x = m.add_var("x", -1.0, 2.0)
    y = m.add_var("y", 0.0, 3.0)
    lo, hi = m.expr_bounds(m.var(x, 2.0) - m.var(y) + 1.0)
    assert lo == pytest.approx(2.0 * -1.0 - 3.0 + 1.0)
    assert hi == pytest.approx(2.0 * 2.0 - 0.0 + 1.0)


@pytest.mark.parametrize("a,b,c,lo,hi", [
    (0.1, 155.0, 113.0, 10.0, 40.0),
    (0.5, -3.0, 2.0, 0.0, 8.0),
    (0.0, 2.0, 0.0, 1.0, 5.0),
])
def test_piecewise_quadratic_bound(a, b, c, lo, hi):
    segments = 8
    bound = a * ((hi - lo) / segments) ** 2 / 4.0
    for target in np.linspace(lo, hi, 11):
        m = LinearModel()
        x = m.add_var("x", lo, hi)
        cost = add_piecewise_quadratic(m, x, a, b, c, (lo, hi), segments,
                                       prefix="pw")
        m.add_constraint(m.var(x), "=", float(target), label="pin")
        m.set_objective(cost)
        res = solve(m)
        assert res.status == "optimal"
        true = a * target**2 + b * target + c
        assert res.objective_value >= true - 1e-7
        assert res.objective_value <= true + bound + 1e-7


def test_piecewise_exact_at_breakpoints():
    m = LinearModel()
    x = m.add_var("x", 0.0, 8.0)
    cost = add_piecewise_quadratic(m, x, 1.0, 0.0, 0.0, (0.0, 8.0), 4, "pw")
    m.add_constraint(m.var(x), "=", 6.0, label="pin")  # breakpoint of K=4
    m.set_objective(cost)
    res = solve(m)
    assert res.objective_value == pytest.approx(36.0, abs=1e-7)


# -- LP export: parse the text back and replay it against the model --------

_TERM = re.compile(r"([+-])\s*([0-9.eE+-]+)\s+(\S+)")


def _parse_lp(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("\\")]
    section = None
    obj_terms = {}
    constraints = []
    bounds = {}
    binaries = set()
    for ln in lines:
        token = ln.strip()
        if token in ("Minimize", "Subject To", "Bounds", "Binary", "End"):
            section = token
            continue
        if section == "Minimize":
            body = token.split(":", 1)[1]
            for m in _TERM.finditer("+ " + body):
                sign, coef, name = m.groups()
                obj_terms[name] = obj_terms.get(name, 0.0) + float(
                    f"{sign}{coef}")
        elif section == "Subject To":
            label, body = token.split(":", 1)
            m = re.search(r"(<=|>=|=)\s*([0-9.eE+-]+)\s*$", body)
            rel, rhs = m.group(1), float(m.group(2))
            terms = {}
            for tm in _TERM.finditer("+ " + body[:m.start()]):
                sign, coef, name = tm.groups()
                terms[name] = terms.get(name, 0.0) + float(f"{sign}{coef}")
            constraints.append((label.strip(), terms, rel, rhs))
        elif section == "Bounds":
            if "free" in token:
                continue
            parts = token.split("<=")
            if len(parts) == 3:
                bounds[parts[1].strip()] = (float(parts[0]), float(parts[2]))
            elif len(parts) == 2:
                bounds[parts[1].strip()] = (float(parts[0]), math.inf)
            else:
                name, val = token.split("=")
                bounds[name.strip()] = (float(val), float(val))
        elif section == "Binary":
            binaries.add(token)
    return obj_terms, constraints, bounds, binaries


def test_export_lp_round_trip():
    m = LinearModel("demo")
    x = m.add_var("x", 0.0, 4.0)
    y = m.add_var("y", -1.0, math.inf)
    z = m.add_var("z", kind=BINARY)
    m.add_constraint(m.var(x, 2.0) - m.var(y) + m.var(z, 0.5), "<=", 3.0,
                     label="cap")
    m.add_constraint(m.var(y) + 1.0, ">=", 0.0, label="floor")
    m.set_objective(m.var(x) + m.var(y, -2.5) + m.var(z, 7.0))

    obj, cons, bounds, binaries = _parse_lp(export_lp(m))
    assert obj == {"x": 1.0, "y": -2.5, "z": 7.0}
    assert bounds["x"] == (0.0, 4.0)
    assert bounds["y"] == (-1.0, math.inf)
    assert binaries == {"z"}
    by_label = {c[0]: c for c in cons}
    assert by_label["cap"][1] == {"x": 2.0, "y": -1.0, "z": 0.5}
    assert by_label["cap"][2:] == ("<=", 3.0)
    # the constant of "y + 1 >= 0" must have been folded into the rhs
    assert by_label["floor"][1] == {"y": 1.0}
    assert by_label["floor"][3] == pytest.approx(-1.0)


def test_export_lp_deterministic():
    def build():
        m = LinearModel("det")
        a = m.add_var("a", 0, 1)
        b = m.add_var("b", 0, 2)
        m.add_constraint(m.var(a) + m.var(b), "<=", 2.0, label="s")
        m.set_objective(m.var(a) - m.var(b))
        return export_lp(m)

    assert build() == build()


def test_recheck_tolerance_constant():
    assert CHECK_TOL == 1e-6
