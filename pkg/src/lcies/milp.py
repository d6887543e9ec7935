"""Backend-agnostic linear model builder and solver boundary.

A :class:`LinearModel` is a plain container of variables, labeled linear
constraints, and a minimization objective.  It knows nothing about any
particular solver; :func:`solve` currently drives the HiGHS engine through
``scipy.optimize.milp`` and re-checks the reported solution independently,
and :func:`export_lp` renders the model in the standard LP file format as
an escape hatch to any other engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint
from scipy.optimize import milp as _scipy_milp

CONTINUOUS = "continuous"
BINARY = "binary"

#: absolute tolerance of the post-solve constraint re-check
CHECK_TOL = 1e-6


class ModelError(ValueError):
    """Structural problem in a model under construction."""


class SolverCheckError(RuntimeError):
    """The backend reported optimal but the re-check pass disagrees."""


class LinExpr:
    """Sparse linear expression ``sum(coef * var) + const``."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: dict[int, float] | None = None, const: float = 0.0):
        self.terms = dict(terms) if terms else {}
        self.const = float(const)

    def copy(self) -> "LinExpr":
        return LinExpr(self.terms, self.const)

    def add_term(self, var: int, coef: float) -> "LinExpr":
        self.terms[var] = self.terms.get(var, 0.0) + float(coef)
        return self

    def value(self, x) -> float:
        return self.const + sum(c * x[v] for v, c in self.terms.items())

    def __add__(self, other):
        out = self.copy()
        if isinstance(other, LinExpr):
            for v, c in other.terms.items():
                out.add_term(v, c)
            out.const += other.const
        else:
            out.const += float(other)
        return out

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({v: -c for v, c in self.terms.items()}, -self.const)

    def __sub__(self, other):
        if isinstance(other, LinExpr):
            return self + (-other)
        return self + (-float(other))

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, k):
        k = float(k)
        return LinExpr({v: c * k for v, c in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    def __repr__(self):
        return f"LinExpr({self.terms!r}, const={self.const!r})"


@dataclass
class _Constraint:
    expr: LinExpr
    relation: str  # "<=", "=", ">="
    rhs: float
    label: str


@dataclass
class SolveResult:
    status: str  # optimal | infeasible | unbounded | limit
    objective_value: float | None
    assignment: dict[str, float] | None

    def __getitem__(self, name: str) -> float:
        if self.assignment is None:
            raise KeyError(f"no assignment in status {self.status!r}")
        return self.assignment[name]


_RELATIONS = ("<=", "=", ">=")


class LinearModel:
    """Mutable MILP under construction (single writer until solved)."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.var_names: list[str] = []
        self.var_kinds: list[str] = []
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.constraints: list[_Constraint] = []
        self.objective: LinExpr = LinExpr()
        self._names: set[str] = set()
        self._labels: set[str] = set()

    # -- construction -------------------------------------------------

    def add_var(self, name: str, lb: float = 0.0, ub: float = math.inf,
                kind: str = CONTINUOUS) -> int:
        if name in self._names:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, BINARY):
            raise ModelError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            lb, ub = max(0.0, lb), min(1.0, ub)
        if lb > ub:
            raise ModelError(f"variable {name!r} has empty domain [{lb}, {ub}]")
        self.var_names.append(name)
        self.var_kinds.append(kind)
        self.lower.append(float(lb))
        self.upper.append(float(ub))
        self._names.add(name)
        return len(self.var_names) - 1

    def var(self, idx: int, coef: float = 1.0) -> LinExpr:
        return LinExpr({idx: float(coef)})

    def add_constraint(self, expr: LinExpr, relation: str, rhs: float = 0.0,
                       label: str | None = None) -> None:
        if relation not in _RELATIONS:
            raise ModelError(f"unknown relation {relation!r}")
        if label is None:
            label = f"c{len(self.constraints)}"
        if label in self._labels:
            raise ModelError(f"duplicate constraint label {label!r}")
        for v in expr.terms:
            if not 0 <= v < len(self.var_names):
                raise ModelError(f"constraint {label!r} references unknown variable {v}")
        # fold the expression constant into the right-hand side
        self.constraints.append(
            _Constraint(LinExpr(expr.terms), relation, float(rhs) - expr.const, label))
        self._labels.add(label)

    def set_objective(self, expr: LinExpr) -> None:
        for v in expr.terms:
            if not 0 <= v < len(self.var_names):
                raise ModelError(f"objective references unknown variable {v}")
        self.objective = expr.copy()

    # -- queries ------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def num_binaries(self) -> int:
        return sum(1 for k in self.var_kinds if k == BINARY)

    def expr_bounds(self, expr: LinExpr) -> tuple[float, float]:
        """Interval bound of a linear expression from variable bounds."""
        lo = hi = expr.const
        for v, c in expr.terms.items():
            a, b = c * self.lower[v], c * self.upper[v]
            lo += min(a, b)
            hi += max(a, b)
        return lo, hi

    def check_invariants(self) -> None:
        for i, kind in enumerate(self.var_kinds):
            if kind == BINARY and not (0.0 <= self.lower[i] and self.upper[i] <= 1.0):
                raise ModelError(f"binary {self.var_names[i]!r} has bounds outside [0,1]")


def _recheck(model: LinearModel, x: np.ndarray) -> None:
    """Verify a claimed-optimal point against the model, independent of the backend."""
    for i in range(model.num_vars):
        if x[i] < model.lower[i] - CHECK_TOL or x[i] > model.upper[i] + CHECK_TOL:
            raise SolverCheckError(
                f"variable {model.var_names[i]!r} = {x[i]} violates bounds "
                f"[{model.lower[i]}, {model.upper[i]}]")
    for con in model.constraints:
        lhs = sum(c * x[v] for v, c in con.expr.terms.items())
        resid = lhs - con.rhs
        ok = (resid <= CHECK_TOL if con.relation == "<=" else
              resid >= -CHECK_TOL if con.relation == ">=" else
              abs(resid) <= CHECK_TOL)
        if not ok:
            raise SolverCheckError(
                f"constraint {con.label!r} violated by {resid:.3e}")


def solve(model: LinearModel, limits: dict | None = None) -> SolveResult:
    """Solve with HiGHS via scipy and re-check the claimed solution.

    ``limits`` may carry ``time_limit_s`` and ``mip_gap`` (relative).
    """
    model.check_invariants()
    limits = limits or {}

    if model.num_vars == 0:
        for con in model.constraints:
            resid = -con.rhs
            ok = (resid <= CHECK_TOL if con.relation == "<=" else
                  resid >= -CHECK_TOL if con.relation == ">=" else
                  abs(resid) <= CHECK_TOL)
            if not ok:
                return SolveResult("infeasible", None, None)
        return SolveResult("optimal", model.objective.const, {})

    n = model.num_vars
    c = np.zeros(n)
    for v, coef in model.objective.terms.items():
        c[v] += coef

    constraints = []
    if model.constraints:
        rows, cols, vals = [], [], []
        lbs, ubs = [], []
        for r, con in enumerate(model.constraints):
            for v, coef in con.expr.terms.items():
                rows.append(r)
                cols.append(v)
                vals.append(coef)
            if con.relation == "<=":
                lbs.append(-np.inf)
                ubs.append(con.rhs)
            elif con.relation == ">=":
                lbs.append(con.rhs)
                ubs.append(np.inf)
            else:
                lbs.append(con.rhs)
                ubs.append(con.rhs)
        a = sparse.csr_matrix((vals, (rows, cols)), shape=(len(model.constraints), n))
        constraints.append(LinearConstraint(a, np.array(lbs), np.array(ubs)))

    integrality = np.array([1 if k == BINARY else 0 for k in model.var_kinds])
    options: dict = {"presolve": True}
    if "time_limit_s" in limits and limits["time_limit_s"] is not None:
        options["time_limit"] = float(limits["time_limit_s"])
    if "mip_gap" in limits and limits["mip_gap"] is not None:
        options["mip_rel_gap"] = float(limits["mip_gap"])

    res = _scipy_milp(c=c, constraints=constraints,
                      bounds=Bounds(np.array(model.lower), np.array(model.upper)),
                      integrality=integrality, options=options)

    if res.status == 0:
        x = np.asarray(res.x, dtype=float)
        _recheck(model, x)
        assignment = {model.var_names[i]: float(x[i]) for i in range(n)}
        return SolveResult("optimal", float(res.fun) + model.objective.const, assignment)
    if res.status == 2:
        return SolveResult("infeasible", None, None)
    if res.status == 3:
        return SolveResult("unbounded", None, None)
    return SolveResult("limit", None, None)


def add_piecewise_quadratic(model: LinearModel, x: int, a: float, b: float,
                            c: float, x_range: tuple[float, float],
                            segments: int = 8,
                            prefix: str | None = None) -> LinExpr:
    """Chord over-approximation of ``a*x**2 + b*x + c`` on ``x_range``.

    Adds ``segments + 1`` convex-combination weights tied to equally spaced
    breakpoints; with ``a >= 0`` and the returned expression minimized, the
    optimizer lands on the chord interpolant, which over-estimates the
    quadratic by at most ``a * ((hi - lo) / segments)**2 / 4`` and is exact
    at breakpoints.
    """
    lo, hi = x_range
    if segments < 1:
        raise ModelError("segments must be >= 1")
    if lo > hi:
        raise ModelError(f"empty range [{lo}, {hi}]")
    if a < 0:
        raise ModelError("chord approximation requires a >= 0")
    if prefix is None:
        prefix = f"pw{model.num_vars}"

    xs = [lo + (hi - lo) * k / segments for k in range(segments + 1)]
    lams = [model.add_var(f"{prefix}_lam{k}", 0.0, 1.0) for k in range(segments + 1)]

    convex = LinExpr({v: 1.0 for v in lams})
    model.add_constraint(convex, "=", 1.0, label=f"{prefix}_convex")

    tie = model.var(x)
    for v, xk in zip(lams, xs):
        tie.add_term(v, -xk)
    model.add_constraint(tie, "=", 0.0, label=f"{prefix}_tie")

    cost = LinExpr(const=0.0)
    for v, xk in zip(lams, xs):
        cost.add_term(v, a * xk * xk + b * xk + c)
    return cost


def _fmt(v: float) -> str:
    return format(v, ".12g")


def _fmt_terms(expr_terms: dict[int, float], names: list[str]) -> str:
    parts = []
    for v in sorted(expr_terms):
        coef = expr_terms[v]
        if coef == 0.0:
            continue
        sign = "-" if coef < 0 else "+"
        parts.append(f"{sign} {_fmt(abs(coef))} {names[v]}")
    if not parts:
        return "0 " + (names[0] if names else "x")
    joined = " ".join(parts)
    return joined[2:] if joined.startswith("+ ") else joined


def export_lp(model: LinearModel) -> str:
    """Deterministic textual rendering in the standard LP file format."""
    names = model.var_names
    lines = [f"\\ {model.name}", "Minimize"]
    obj = _fmt_terms(model.objective.terms, names)
    if model.objective.const:
        obj += f" + {_fmt(model.objective.const)}"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    rel_map = {"<=": "<=", ">=": ">=", "=": "="}
    for con in model.constraints:
        lines.append(f" {con.label}: {_fmt_terms(con.expr.terms, names)} "
                     f"{rel_map[con.relation]} {_fmt(con.rhs)}")
    lines.append("Bounds")
    for i, name in enumerate(names):
        lo, hi = model.lower[i], model.upper[i]
        if lo == hi:
            lines.append(f" {name} = {_fmt(lo)}")
        elif math.isinf(hi) and math.isinf(lo):
            lines.append(f" {name} free")
        elif math.isinf(hi):
            lines.append(f" {_fmt(lo)} <= {name}")
        else:
            lines.append(f" {_fmt(lo)} <= {name} <= {_fmt(hi)}")
    binaries = [names[i] for i, k in enumerate(model.var_kinds) if k == BINARY]
    if binaries:
        lines.append("Binary")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"
