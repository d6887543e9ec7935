"""Scenario-based reserve sizing baselines.

Two references for the chance-constraint machinery:

``sa`` (scenario approximation)
    Reserve must cover the renewable shortfall in every sampled scenario;
    one hard constraint per (period, scenario).

``saa`` (sample average approximation)
    One indicator binary per (period, scenario); the reserve must cover at
    least ``ceil(alpha * n)`` of the ``n`` scenarios in every period.

Both reuse the dispatch model builder with the analytic chance machinery
switched off, so objective and emissions are directly comparable.
Closed-form single-period oracles (:func:`minimal_reserve_sa`,
:func:`minimal_reserve_saa`) exist for validation against the MILP path.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import time
from dataclasses import dataclass

import numpy as np

from . import dispatch
from .config import SystemConfig
from .milp import LinExpr, LinearModel, ModelError, solve
from .sequences import (HourlyUncertainty, SolarPowerDistribution,
                        WindPowerDistribution)

SA = "sa"
SAA = "saa"
METHODS = (SA, SAA)


@dataclass(frozen=True)
class ScenarioSet:
    """Sampled combined renewable output, one row per period."""
    values: tuple[tuple[float, ...], ...]  # [t][s] in MW
    seed: int

    @property
    def n_periods(self) -> int:
        return len(self.values)

    @property
    def n_scenarios(self) -> int:
        return len(self.values[0]) if self.values else 0


def sample_scenarios(uncertainty: list[HourlyUncertainty], n: int,
                     seed: int) -> ScenarioSet:
    """Draw ``n`` combined wind-plus-solar outputs per period (seeded)."""
    if n < 1:
        raise ValueError(f"need at least one scenario, got {n}")
    rng = np.random.default_rng(seed)
    rows = []
    for hour in uncertainty:
        wind = WindPowerDistribution(hour.wind).sample(rng, n)
        solar = SolarPowerDistribution(hour.solar).sample(rng, n)
        rows.append(tuple(float(v) for v in wind + solar))
    return ScenarioSet(values=tuple(rows), seed=seed)


def minimal_reserve_sa(outputs, e_t: float) -> float:
    """Smallest reserve covering the shortfall in every scenario."""
    return max(0.0, e_t - min(outputs))


def minimal_reserve_saa(outputs, e_t: float, alpha: float) -> float:
    """Smallest reserve covering the shortfall in ``ceil(alpha*n)`` scenarios.

    Covering the scenarios with the highest outputs is optimal, so the
    answer is the shortfall of the ``q``-th largest output.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    n = len(outputs)
    q = math.ceil(alpha * n - 1e-12)
    if q <= 0:
        return 0.0
    cutoff = sorted(outputs, reverse=True)[q - 1]
    return max(0.0, e_t - cutoff)


def attach_reserve_sa(model: LinearModel, reserve_exprs: list[LinExpr],
                      expectations: list[float], scenarios: ScenarioSet,
                      prefix: str = "sa") -> int:
    """Hard per-scenario coverage; returns the number of constraints added."""
    if scenarios.n_periods != len(reserve_exprs):
        raise ValueError("scenario set does not match the horizon")
    added = 0
    for t, (reserve, e_t) in enumerate(zip(reserve_exprs, expectations)):
        for s, x in enumerate(scenarios.values[t]):
            thr = e_t - x
            if thr <= 0.0:
                continue  # no shortfall, trivially covered
            model.add_constraint(reserve, ">=", thr,
                                 label=f"{prefix}_t{t + 1}_s{s + 1}")
            added += 1
    return added


def attach_reserve_saa(model: LinearModel, reserve_exprs: list[LinExpr],
                       expectations: list[float], scenarios: ScenarioSet,
                       alpha: float, prefix: str = "saa") -> int:
    """Indicator-based coverage of at least ``ceil(alpha*n)`` scenarios."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    if scenarios.n_periods != len(reserve_exprs):
        raise ValueError("scenario set does not match the horizon")
    n = scenarios.n_scenarios
    q = math.ceil(alpha * n - 1e-12)
    added = 0
    for t, (reserve, e_t) in enumerate(zip(reserve_exprs, expectations)):
        _, hi = model.expr_bounds(reserve)
        if hi == float("inf"):
            raise ModelError(f"reserve expression at t={t} is unbounded")
        thresholds = [e_t - x for x in scenarios.values[t]]
        big_m = hi + max(max(thresholds, default=0.0), 0.0) + 1.0
        count = LinExpr()
        for s, thr in enumerate(thresholds):
            if thr <= 0.0:
                # covered by any nonnegative reserve; count unconditionally
                count.const += 1.0
                continue
            y = model.add_var(f"{prefix}_y_t{t + 1}_s{s + 1}", kind="binary")
            model.add_constraint(reserve - model.var(y, big_m), ">=",
                                 thr - big_m,
                                 label=f"{prefix}_cov_t{t + 1}_s{s + 1}")
            count.add_term(y, 1.0)
            added += 1
        model.add_constraint(count, ">=", float(q),
                             label=f"{prefix}_quota_t{t + 1}")
        added += 1
    return added


def build_baseline(config: SystemConfig, method: str, scenarios: ScenarioSet,
                   mode: int | None = None) -> dispatch.ModelBundle:
    """Dispatch model with the chance machinery replaced by a baseline."""
    if method not in METHODS:
        raise ValueError(f"unknown baseline method {method!r}")
    seqs, expectations = dispatch.compute_sequences(config)
    no_chance = dataclasses.replace(config, alpha=0.0)
    bundle = dispatch.build(no_chance, seqs, expectations, mode=mode)
    if method == SA:
        attach_reserve_sa(bundle.model, bundle.reserve_exprs, expectations,
                          scenarios)
    else:
        attach_reserve_saa(bundle.model, bundle.reserve_exprs, expectations,
                           scenarios, config.alpha)
    return bundle


@dataclass(frozen=True)
class BaselineRun:
    method: str
    run: int
    objective_cny: float
    emissions_t: float
    wall_ms: float


def run_baseline(config: SystemConfig, method: str, n_scenarios: int,
                 runs: int, seed: int,
                 mode: int | None = None) -> list[BaselineRun]:
    """Repeated baseline solves with per-run scenario resampling."""
    results = []
    for r in range(runs):
        scen = sample_scenarios(config.uncertainty, n_scenarios, seed + r)
        start = time.perf_counter()
        bundle = build_baseline(config, method, scen, mode=mode)
        res = solve(bundle.model, limits={
            "time_limit_s": config.solver.time_limit_s,
            "mip_gap": config.solver.mip_gap})
        wall_ms = (time.perf_counter() - start) * 1000.0
        if res.status != "optimal":
            raise dispatch.InfeasibleModelError(
                f"baseline {method} run {r} ended with status {res.status!r}")
        _, _, ledger, _ = dispatch.extract_schedule(bundle, res, config)
        results.append(BaselineRun(method=method, run=r,
                                   objective_cny=res.objective_value,
                                   emissions_t=ledger.e_r, wall_ms=wall_ms))
    return results


def write_baseline_csv(rows: list[BaselineRun], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "run", "objective_cny", "emissions_t",
                         "wall_ms"])
        for row in rows:
            writer.writerow([row.method, row.run, f"{row.objective_cny:.6f}",
                             f"{row.emissions_t:.6f}", f"{row.wall_ms:.3f}"])
