"""High-level runs: single-mode solve, mode comparison, price sweep, and
Monte-Carlo verification of a schedule's reserve adequacy.

These functions return plain result objects; when ``out_dir`` is given they
also write the delimited artifacts (and figures, via :mod:`lcies.figures`)
that the command-line interface exposes.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dispatch
from . import milp
from .carbon import FIXED, CarbonLedger
from .config import SystemConfig
from .dispatch import CostBreakdown, DispatchSchedule
from .sequences import SolarPowerDistribution, WindPowerDistribution


@dataclass
class RunReport:
    mode: int
    status: str
    objective: float | None
    schedule: DispatchSchedule | None
    costs: CostBreakdown | None
    ledger: CarbonLedger | None
    diagnostics: dict | None


@dataclass(frozen=True)
class SweepPoint:
    price_cny_per_t: float
    emissions_t: float
    total_cost_cny: float
    tp_energy_mwh: float
    gc_energy_mwh: float


@dataclass(frozen=True)
class VerificationReport:
    samples: int
    alpha: float
    threshold: float  # (1 - alpha) plus the sampling margin
    violation_prob: list[float]  # per period
    worst_violation_prob: float
    worst_period: int  # 1-based
    passed: bool


def _solve_bundle(config: SystemConfig, bundle: dispatch.ModelBundle):
    return milp.solve(bundle.model, limits={
        "time_limit_s": config.solver.time_limit_s,
        "mip_gap": config.solver.mip_gap})


def run_mode(config: SystemConfig, mode: int | None = None,
             out_dir=None, write_lp: bool = False) -> RunReport:
    """Solve one operating mode; optionally write the artifact set."""
    mode = config.mode if mode is None else mode
    seqs, expectations = dispatch.compute_sequences(config)
    bundle = dispatch.build(config, seqs, expectations, mode=mode)
    result = _solve_bundle(config, bundle)
    if result.status != "optimal":
        return RunReport(mode=mode, status=result.status, objective=None,
                         schedule=None, costs=None, ledger=None,
                         diagnostics=None)
    schedule, costs, ledger, diagnostics = dispatch.extract_schedule(
        bundle, result, config)
    report = RunReport(mode=mode, status="optimal",
                       objective=result.objective_value, schedule=schedule,
                       costs=costs, ledger=ledger, diagnostics=diagnostics)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        schedule.to_csv(out / "schedule.csv")
        ledger.to_csv(out / "ledger.csv")
        costs.to_json(out / "costs.json")
        with open(out / "diagnostics.json", "w") as fh:
            json.dump({k: float(v) for k, v in diagnostics.items()}, fh,
                      indent=2)
        seq_dir = out / "sequences"
        seq_dir.mkdir(exist_ok=True)
        for t, seq in enumerate(seqs, start=1):
            seq.to_csv(seq_dir / f"seq_t{t}.csv")
        if write_lp:
            (out / "model.lp").write_text(milp.export_lp(bundle.model))
        from . import figures
        figures.plot_dispatch(schedule, config, out / "dispatch.png")
        figures.plot_storage(schedule, config, out / "storage.png")
    return report


def compare_modes(config: SystemConfig, out_dir=None) -> list[RunReport]:
    """Solve all three modes on the same system and tabulate the outcomes."""
    reports = [run_mode(config, mode) for mode in (1, 2, 3)]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "compare.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mode", "status", "total_cost_cny", "c1_thermal",
                             "c2_gas", "c3_storage", "c4_nuclear",
                             "c5_carbon", "emissions_t", "k_applied"])
            for rep in reports:
                if rep.status != "optimal":
                    writer.writerow([rep.mode, rep.status] + [""] * 8)
                    continue
                writer.writerow([
                    rep.mode, rep.status, f"{rep.costs.total:.6f}",
                    f"{rep.costs.c1_thermal:.6f}", f"{rep.costs.c2_gas:.6f}",
                    f"{rep.costs.c3_storage:.6f}",
                    f"{rep.costs.c4_nuclear:.6f}",
                    f"{rep.costs.c5_carbon:.6f}", f"{rep.ledger.e_r:.6f}",
                    f"{rep.ledger.k_applied:.6f}"])
        from . import figures
        figures.plot_compare(reports, out / "compare.png")
    return reports


def sweep_carbon_price(config: SystemConfig, price_from: float,
                       price_to: float, price_step: float,
                       mode: int | None = None, stepped_scale: bool = False,
                       out_dir=None) -> list[SweepPoint]:
    """Re-solve across a range of carbon prices.

    By default the stepped policy is replaced by a single fixed price at
    each point, so the sweep isolates the price signal itself.  With
    ``stepped_scale`` the three tier prices are instead scaled jointly so
    that the middle tier equals the swept price.
    """
    if price_step <= 0:
        raise ValueError(f"price step must be positive, got {price_step}")
    if price_to < price_from:
        raise ValueError("empty price range")
    mode = config.mode if mode is None else mode
    seqs, expectations = dispatch.compute_sequences(config)
    points = []
    price = price_from
    while price <= price_to + 1e-9:
        if stepped_scale:
            if config.carbon.k2 <= 0:
                raise ValueError("stepped scaling requires k2 > 0")
            s = price / config.carbon.k2
            policy = dataclasses.replace(
                config.carbon, k1=s * config.carbon.k1, k2=price,
                k3=s * config.carbon.k3)
        else:
            policy = dataclasses.replace(config.carbon, pricing_mode=FIXED,
                                         k_fixed=price)
        cfg = dataclasses.replace(config, carbon=policy)
        bundle = dispatch.build(cfg, seqs, expectations, mode=mode)
        result = _solve_bundle(cfg, bundle)
        if result.status != "optimal":
            raise dispatch.InfeasibleModelError(
                f"sweep point {price} ended with status {result.status!r}")
        schedule, costs, ledger, _ = dispatch.extract_schedule(
            bundle, result, cfg)
        dt = config.delta_t
        points.append(SweepPoint(
            price_cny_per_t=price, emissions_t=ledger.e_r,
            total_cost_cny=costs.total,
            tp_energy_mwh=dt * sum(sum(col) for col in schedule.tp_p),
            gc_energy_mwh=dt * sum(sum(col) for col in schedule.gc_e)))
        price += price_step
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["price_cny_per_t", "emissions_t",
                             "total_cost_cny", "tp_energy_mwh",
                             "gc_energy_mwh"])
            for p in points:
                writer.writerow([f"{p.price_cny_per_t:.6f}",
                                 f"{p.emissions_t:.6f}",
                                 f"{p.total_cost_cny:.6f}",
                                 f"{p.tp_energy_mwh:.6f}",
                                 f"{p.gc_energy_mwh:.6f}"])
        from . import figures
        figures.plot_sweep(points, out / "sweep.png")
    return points


def verify_chance(config: SystemConfig, schedule: DispatchSchedule,
                  samples: int, seed: int) -> VerificationReport:
    """Monte-Carlo check of the reserve adequacy of a schedule.

    For each period, draws fresh renewable outputs and estimates the
    probability that the shortfall against the credited expectation exceeds
    the scheduled reserve.  Passes when every period's estimate stays below
    ``(1 - alpha)`` plus three standard errors of the estimator.
    """
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    _, expectations = dispatch.compute_sequences(config)
    rng = np.random.default_rng(seed)
    alpha = config.alpha
    margin = 3.0 * float(np.sqrt(alpha * (1.0 - alpha) / samples))
    threshold = (1.0 - alpha) + margin
    violation = []
    for t in range(schedule.t):
        hour = config.uncertainty[t]
        wind = WindPowerDistribution(hour.wind).sample(rng, samples)
        solar = SolarPowerDistribution(hour.solar).sample(rng, samples)
        output = wind + solar
        shortfall = expectations[t] - output
        reserve = schedule.total_reserve(t)
        # tolerance covers serialization rounding; matters when an output
        # atom sits exactly at the shortfall threshold
        violation.append(float(np.mean(shortfall > reserve + 1e-6)))
    worst = int(np.argmax(violation))
    return VerificationReport(
        samples=samples, alpha=alpha, threshold=threshold,
        violation_prob=violation, worst_violation_prob=violation[worst],
        worst_period=worst + 1, passed=violation[worst] <= threshold)
