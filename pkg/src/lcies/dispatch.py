"""Assembly of the full day-ahead scheduling MILP and schedule extraction.

One model per (config, mode): per-period electric/heat/gas balances, device
operating windows and ramps, cyclic storage dynamics, reserve headroom, the
chance-constraint machinery from :mod:`lcies.chance`, and the carbon cost
from :mod:`lcies.carbon`.  Extraction re-derives every reported number
(gas volumes, costs, emissions) from the closed-form device algebra rather
than trusting auxiliary solver variables, and fails loudly if the solution
violates any invariant.

Modes: 1 = no nuclear units; 2 = nuclear at fixed full electric output;
3 = nuclear on the cogeneration segment.  Whether thermal units participate
in a mode is controlled by ``tp_enabled_modes`` (their minimum-power bound
otherwise forbids zero output).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import carbon as carbon_mod
from . import devices as dev
from .chance import ChanceSpec, IndicatorBlock, attach_reserve_chance
from .config import SystemConfig
from .milp import (LinExpr, LinearModel, SolveResult, add_piecewise_quadratic)
from .sequences import ProbSequence, combined_power_sequence, expectation

BALANCE_TOL = 1e-6


class InfeasibleModelError(Exception):
    """Raised when a model is infeasible, with the constraint family if known."""

    def __init__(self, message: str, family: str | None = None):
        self.family = family
        super().__init__(message)


class ExtractionError(RuntimeError):
    """An optimal solution failed post-solve verification."""


def compute_sequences(config: SystemConfig,
                      binning: str | None = None
                      ) -> tuple[list[ProbSequence], list[float]]:
    """Combined renewable sequence and its expectation for every period."""
    binning = binning or config.dst_binning
    seqs = [combined_power_sequence(hour, config.step_l, binning)
            for hour in config.uncertainty]
    return seqs, [expectation(s) for s in seqs]


@dataclass
class CostBreakdown:
    c1_thermal: float
    c2_gas: float
    c3_storage: float
    c4_nuclear: float
    c5_carbon: float
    total: float

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({"c1_thermal": self.c1_thermal, "c2_gas": self.c2_gas,
                       "c3_storage": self.c3_storage,
                       "c4_nuclear": self.c4_nuclear,
                       "c5_carbon": self.c5_carbon, "total": self.total},
                      fh, indent=2)


@dataclass
class DispatchSchedule:
    """Per-period operating point extracted from an optimal solve."""
    t: int
    dt: float
    tp_p: list[list[float]]
    tp_r: list[list[float]]
    gc_e: list[list[float]]
    gc_h: list[list[float]]
    gc_r: list[list[float]]
    np_e: list[list[float]]
    np_h: list[list[float]]
    p2g: list[float]
    ess_c: list[float]
    ess_d: list[float]
    ess_r: list[float]
    ess_soc: list[float]  # state at end of each period
    hss_rate: list[float]  # positive = release
    hss_soc: list[float]
    re_absorbed: list[float]
    re_curtailed: list[float]
    gas_gc: list[float]
    gas_p2g: list[float]
    gas_buy: list[float]

    def total_reserve(self, t: int) -> float:
        return (sum(r[t] for r in self.tp_r) + sum(r[t] for r in self.gc_r)
                + self.ess_r[t])

    def csv_header(self) -> list[str]:
        cols = ["t"]
        for i in range(len(self.tp_p)):
            cols += [f"tp_{i + 1}_mw", f"tp_{i + 1}_res_mw"]
        for i in range(len(self.gc_e)):
            cols += [f"gc_{i + 1}_e_mw", f"gc_{i + 1}_h_mw", f"gc_{i + 1}_res_mw"]
        for i in range(len(self.np_e)):
            cols += [f"np_{i + 1}_e_mw", f"np_{i + 1}_h_mw"]
        cols += ["p2g_mw", "ess_c_mw", "ess_d_mw", "ess_res_mw", "ess_soc_mwh",
                 "hss_rate_mw", "hss_soc_mwh", "re_absorbed_mw",
                 "re_curtailed_mw", "gas_gc_m3", "gas_p2g_m3", "gas_buy_m3"]
        return cols

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.csv_header())
            for t in range(self.t):
                row: list = [t + 1]
                for i in range(len(self.tp_p)):
                    row += [self.tp_p[i][t], self.tp_r[i][t]]
                for i in range(len(self.gc_e)):
                    row += [self.gc_e[i][t], self.gc_h[i][t], self.gc_r[i][t]]
                for i in range(len(self.np_e)):
                    row += [self.np_e[i][t], self.np_h[i][t]]
                row += [self.p2g[t], self.ess_c[t], self.ess_d[t],
                        self.ess_r[t], self.ess_soc[t], self.hss_rate[t],
                        self.hss_soc[t], self.re_absorbed[t],
                        self.re_curtailed[t], self.gas_gc[t],
                        self.gas_p2g[t], self.gas_buy[t]]
                writer.writerow([f"{v:.9f}" if isinstance(v, float) else v
                                 for v in row])

    @classmethod
    def from_csv(cls, path, config: SystemConfig) -> "DispatchSchedule":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        rows.sort(key=lambda r: int(r["t"]))
        t = len(rows)
        n_tp = len(config.thermal_units)
        n_gc = len(config.gc_units)
        n_np = len(config.np_units)

        def col(name):
            return [float(r[name]) for r in rows]

        return cls(
            t=t, dt=config.delta_t,
            tp_p=[col(f"tp_{i + 1}_mw") for i in range(n_tp)],
            tp_r=[col(f"tp_{i + 1}_res_mw") for i in range(n_tp)],
            gc_e=[col(f"gc_{i + 1}_e_mw") for i in range(n_gc)],
            gc_h=[col(f"gc_{i + 1}_h_mw") for i in range(n_gc)],
            gc_r=[col(f"gc_{i + 1}_res_mw") for i in range(n_gc)],
            np_e=[col(f"np_{i + 1}_e_mw") for i in range(n_np)],
            np_h=[col(f"np_{i + 1}_h_mw") for i in range(n_np)],
            p2g=col("p2g_mw"), ess_c=col("ess_c_mw"), ess_d=col("ess_d_mw"),
            ess_r=col("ess_res_mw"), ess_soc=col("ess_soc_mwh"),
            hss_rate=col("hss_rate_mw"), hss_soc=col("hss_soc_mwh"),
            re_absorbed=col("re_absorbed_mw"), re_curtailed=col("re_curtailed_mw"),
            gas_gc=col("gas_gc_m3"), gas_p2g=col("gas_p2g_m3"),
            gas_buy=col("gas_buy_m3"))


@dataclass
class ModelBundle:
    """A built model plus the variable maps needed to extract a schedule."""
    model: LinearModel
    mode: int
    tp_enabled: bool
    sequences: list[ProbSequence]
    expectations: list[float]
    tp_p: list[list[int]] = field(default_factory=list)
    tp_r: list[list[int]] = field(default_factory=list)
    gc_e: list[list[int]] = field(default_factory=list)
    gc_h: list[list[int]] = field(default_factory=list)
    gc_r: list[list[int]] = field(default_factory=list)
    np_e: list[list[int]] = field(default_factory=list)
    np_h: list[list[int]] = field(default_factory=list)
    p2g: list[int] = field(default_factory=list)
    ess_c: list[int] = field(default_factory=list)
    ess_d: list[int] = field(default_factory=list)
    ess_r: list[int] = field(default_factory=list)
    ess_s: list[int] = field(default_factory=list)
    hss_q: list[int] = field(default_factory=list)
    hss_c: list[int] = field(default_factory=list)
    p_r: list[int] = field(default_factory=list)
    v_p: list[int] = field(default_factory=list)
    reserve_exprs: list[LinExpr] = field(default_factory=list)
    c1_fuel_expr: LinExpr = field(default_factory=LinExpr)
    c1_reserve_expr: LinExpr = field(default_factory=LinExpr)
    c2_expr: LinExpr = field(default_factory=LinExpr)
    c3_expr: LinExpr = field(default_factory=LinExpr)
    c4_const: float = 0.0
    c5_expr: LinExpr = field(default_factory=LinExpr)
    e_net_expr: LinExpr = field(default_factory=LinExpr)
    e_f: float = 0.0
    dst_block: IndicatorBlock | None = None

    def value(self, idx: int, result: SolveResult) -> float:
        return result.assignment[self.model.var_names[idx]]


def _precheck(config: SystemConfig, mode: int, tp_on: bool,
              expectations: list[float]) -> None:
    """Cheap necessary-condition screen with a nameable constraint family."""
    dt = config.delta_t
    tp_max = sum(u.p_max for u in config.thermal_units) if tp_on else 0.0
    tp_min = sum(u.p_min for u in config.thermal_units) if tp_on else 0.0
    gc_emax = sum(u.pe_max for u in config.gc_units)
    gc_emin = sum(u.pe_min for u in config.gc_units)
    if mode == 1:
        np_emax = np_emin = 0.0
        np_hmax = 0.0
    elif mode == 2:
        np_emax = np_emin = sum(u.pe_max for u in config.np_units)
        np_hmax = 0.0
    else:
        np_emax = sum(u.pe_max for u in config.np_units)
        np_emin = sum(u.pe_min for u in config.np_units)
        np_hmax = sum(u.ph_max for u in config.np_units)
    k_ess = config.ess.eta_e if config.ess.strict_paper_efficiency else 1.0
    for t in range(config.horizon_t):
        le = config.loads.electric[t]
        lh = config.loads.heat[t]
        e_hi = (tp_max + gc_emax + np_emax + k_ess * config.ess.p_d_max
                + expectations[t])
        e_lo = (tp_min + gc_emin + np_emin - config.p2g.p_max_p2g
                - k_ess * config.ess.p_c_max)
        if e_hi < le - 1e-9:
            raise InfeasibleModelError(
                f"period {t + 1}: max electric supply {e_hi:.3f} < load {le}",
                family="ebal")
        if e_lo > le + 1e-9:
            raise InfeasibleModelError(
                f"period {t + 1}: min electric supply {e_lo:.3f} > load {le}",
                family="ebal")
        h_hi = sum(u.ph_max for u in config.gc_units) + np_hmax + config.hss.ph_c_max
        if h_hi < lh - 1e-9:
            raise InfeasibleModelError(
                f"period {t + 1}: max heat supply {h_hi:.3f} < load {lh}",
                family="hbal")


def build(config: SystemConfig, sequences: list[ProbSequence] | None = None,
          expectations: list[float] | None = None,
          mode: int | None = None) -> ModelBundle:
    """Assemble the scheduling MILP for ``mode`` (default: config.mode)."""
    mode = config.mode if mode is None else mode
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode}")
    if sequences is None or expectations is None:
        sequences, expectations = compute_sequences(config)
    horizon = config.horizon_t
    if len(sequences) != horizon:
        raise ValueError("one sequence per period required")
    tp_on = config.tp_enabled(mode)
    _precheck(config, mode, tp_on, expectations)

    dt = config.delta_t
    gas = config.gas
    m = LinearModel(f"dispatch_mode{mode}")
    bundle = ModelBundle(model=m, mode=mode, tp_enabled=tp_on,
                         sequences=list(sequences),
                         expectations=list(expectations))

    # ---- variables ---------------------------------------------------
    for i, u in enumerate(config.thermal_units, start=1):
        if tp_on:
            bundle.tp_p.append([m.add_var(f"tp{i}_p_t{t + 1}", u.p_min, u.p_max)
                                for t in range(horizon)])
            bundle.tp_r.append([m.add_var(f"tp{i}_r_t{t + 1}", 0.0,
                                          u.p_max - u.p_min)
                                for t in range(horizon)])
        else:
            bundle.tp_p.append([m.add_var(f"tp{i}_p_t{t + 1}", 0.0, 0.0)
                                for t in range(horizon)])
            bundle.tp_r.append([m.add_var(f"tp{i}_r_t{t + 1}", 0.0, 0.0)
                                for t in range(horizon)])

    for i, u in enumerate(config.gc_units, start=1):
        bundle.gc_e.append([m.add_var(f"gc{i}_e_t{t + 1}", u.pe_min, u.pe_max)
                            for t in range(horizon)])
        bundle.gc_h.append([m.add_var(f"gc{i}_h_t{t + 1}", 0.0, u.ph_max)
                            for t in range(horizon)])
        bundle.gc_r.append([m.add_var(f"gc{i}_r_t{t + 1}", 0.0,
                                      u.pe_max - u.pe_min)
                            for t in range(horizon)])

    for i, u in enumerate(config.np_units, start=1):
        if mode == 1:
            bundle.np_e.append([])
            bundle.np_h.append([])
        elif mode == 2:
            bundle.np_e.append([m.add_var(f"np{i}_e_t{t + 1}", u.pe_max, u.pe_max)
                                for t in range(horizon)])
            bundle.np_h.append([m.add_var(f"np{i}_h_t{t + 1}", 0.0, 0.0)
                                for t in range(horizon)])
        else:
            bundle.np_e.append([m.add_var(f"np{i}_e_t{t + 1}", u.pe_min, u.pe_max)
                                for t in range(horizon)])
            bundle.np_h.append([m.add_var(f"np{i}_h_t{t + 1}", 0.0, u.ph_max)
                                for t in range(horizon)])
            for t in range(horizon):
                seg = (m.var(bundle.np_e[-1][t])
                       + m.var(bundle.np_h[-1][t], u.c_v))
                m.add_constraint(seg, "=", u.pe_max, label=f"np_seg_{i}_t{t + 1}")

    p2g_u = config.p2g
    bundle.p2g = [m.add_var(f"p2g_t{t + 1}", 0.0, p2g_u.p_max_p2g)
                  for t in range(horizon)]

    ess = config.ess
    bundle.ess_c = [m.add_var(f"ess_c_t{t + 1}", 0.0, ess.p_c_max)
                    for t in range(horizon)]
    bundle.ess_d = [m.add_var(f"ess_d_t{t + 1}", 0.0, ess.p_d_max)
                    for t in range(horizon)]
    bundle.ess_r = [m.add_var(f"ess_r_t{t + 1}", 0.0, ess.p_d_max)
                    for t in range(horizon)]
    bundle.ess_s = [m.add_var(f"ess_s_t{t + 1}", ess.s_min, ess.s_max)
                    for t in range(horizon)]

    hss = config.hss
    bundle.hss_q = [m.add_var(f"hss_q_t{t + 1}", -hss.ph_c_max, hss.ph_c_max)
                    for t in range(horizon)]
    bundle.hss_c = [m.add_var(f"hss_c_t{t + 1}", 0.0, hss.c_max)
                    for t in range(horizon)]

    bundle.p_r = [m.add_var(f"re_t{t + 1}", 0.0, max(0.0, expectations[t]))
                  for t in range(horizon)]

    v_p_ub = sum(dev.gc_gas_volume(u, gas, u.pe_max, u.ph_max, dt)
                 for u in config.gc_units)
    bundle.v_p = [m.add_var(f"gas_buy_t{t + 1}", 0.0, v_p_ub)
                  for t in range(horizon)]

    # ---- per-period constraints -------------------------------------
    k_ess = ess.eta_e if ess.strict_paper_efficiency else 1.0
    v_gc_exprs: list[LinExpr] = []
    v_p2g_exprs: list[LinExpr] = []
    for t in range(horizon):
        # electric balance
        ebal = LinExpr()
        for col in bundle.tp_p:
            ebal.add_term(col[t], 1.0)
        for col in bundle.gc_e:
            ebal.add_term(col[t], 1.0)
        for col in bundle.np_e:
            if col:
                ebal.add_term(col[t], 1.0)
        ebal.add_term(bundle.ess_d[t], k_ess)
        ebal.add_term(bundle.ess_c[t], -k_ess)
        ebal.add_term(bundle.p_r[t], 1.0)
        ebal.add_term(bundle.p2g[t], -1.0)
        m.add_constraint(ebal, "=", config.loads.electric[t],
                         label=f"ebal_t{t + 1}")

        # heat balance (positive storage rate releases heat)
        hbal = LinExpr()
        for col in bundle.gc_h:
            hbal.add_term(col[t], 1.0)
        for col in bundle.np_h:
            if col:
                hbal.add_term(col[t], 1.0)
        hbal.add_term(bundle.hss_q[t], 1.0)
        m.add_constraint(hbal, "=", config.loads.heat[t], label=f"hbal_t{t + 1}")

        # gas balance: consumption minus synthesis equals purchases
        v_gc = LinExpr()
        for i, u in enumerate(config.gc_units):
            v_gc.add_term(bundle.gc_e[i][t], dev.gc_gas_coeff_e(u, gas, dt))
            v_gc.add_term(bundle.gc_h[i][t], dev.gc_gas_coeff_h(u, gas, dt))
        v_p2g = LinExpr({bundle.p2g[t]: dev.p2g_gas_coeff(p2g_u, gas, dt)})
        v_gc_exprs.append(v_gc)
        v_p2g_exprs.append(v_p2g)
        m.add_constraint(v_gc - v_p2g - m.var(bundle.v_p[t]), "=", 0.0,
                         label=f"gbal_t{t + 1}")

        # reserve headroom
        for i, u in enumerate(config.thermal_units):
            if tp_on:
                m.add_constraint(
                    m.var(bundle.tp_p[i][t]) + m.var(bundle.tp_r[i][t]), "<=",
                    u.p_max, label=f"tp_head_{i + 1}_t{t + 1}")
        for i, u in enumerate(config.gc_units):
            m.add_constraint(
                m.var(bundle.gc_e[i][t]) + m.var(bundle.gc_r[i][t]), "<=",
                u.pe_max, label=f"gc_head_{i + 1}_t{t + 1}")
        m.add_constraint(m.var(bundle.ess_r[t]) + m.var(bundle.ess_d[t]), "<=",
                         ess.p_d_max, label=f"ess_head_p_t{t + 1}")
        # energy-side reserve headroom uses the state entering the period
        energy_head = m.var(bundle.ess_r[t], dt)
        if t > 0:
            energy_head.add_term(bundle.ess_s[t - 1], -1.0)
            m.add_constraint(energy_head, "<=", -ess.s_min,
                             label=f"ess_head_e_t{t + 1}")
        else:
            m.add_constraint(energy_head, "<=", ess.s_0 - ess.s_min,
                             label=f"ess_head_e_t{t + 1}")

        # storage dynamics
        sdyn = m.var(bundle.ess_s[t]) - m.var(bundle.ess_c[t], ess.eta_e * dt) \
            + m.var(bundle.ess_d[t], ess.eta_e * dt)
        if t > 0:
            sdyn.add_term(bundle.ess_s[t - 1], -1.0)
            m.add_constraint(sdyn, "=", 0.0, label=f"ess_dyn_t{t + 1}")
        else:
            m.add_constraint(sdyn, "=", ess.s_0, label=f"ess_dyn_t{t + 1}")

        cdyn = m.var(bundle.hss_c[t]) + m.var(bundle.hss_q[t], dt)
        if t > 0:
            cdyn.add_term(bundle.hss_c[t - 1], -1.0)
            m.add_constraint(cdyn, "=", 0.0, label=f"hss_dyn_t{t + 1}")
        else:
            m.add_constraint(cdyn, "=", hss.c_0, label=f"hss_dyn_t{t + 1}")

        # ramps (not applied at the first period: no prior operating point)
        if t > 0:
            for i, u in enumerate(config.thermal_units):
                if not tp_on:
                    continue
                step = m.var(bundle.tp_p[i][t]) - m.var(bundle.tp_p[i][t - 1])
                m.add_constraint(step, "<=", u.r_u * dt,
                                 label=f"tp_rup_{i + 1}_t{t + 1}")
                m.add_constraint(step, ">=", -u.r_d * dt,
                                 label=f"tp_rdn_{i + 1}_t{t + 1}")
            for i, u in enumerate(config.gc_units):
                step = m.var(bundle.gc_e[i][t]) - m.var(bundle.gc_e[i][t - 1])
                m.add_constraint(step, "<=", u.r_u_gc * dt,
                                 label=f"gc_rup_{i + 1}_t{t + 1}")
                m.add_constraint(step, ">=", -u.r_d_gc * dt,
                                 label=f"gc_rdn_{i + 1}_t{t + 1}")
            step = m.var(bundle.p2g[t]) - m.var(bundle.p2g[t - 1])
            m.add_constraint(step, "<=", p2g_u.r_u_p2g * dt,
                             label=f"p2g_rup_t{t + 1}")
            m.add_constraint(step, ">=", -p2g_u.r_d_p2g * dt,
                             label=f"p2g_rdn_t{t + 1}")

        # total reserve available to the chance constraint
        reserve = LinExpr()
        for col in bundle.tp_r:
            reserve.add_term(col[t], 1.0)
        for col in bundle.gc_r:
            reserve.add_term(col[t], 1.0)
        reserve.add_term(bundle.ess_r[t], 1.0)
        bundle.reserve_exprs.append(reserve)

    # cyclic storage endpoints
    m.add_constraint(m.var(bundle.ess_s[horizon - 1]), "=", ess.s_0,
                     label="ess_cycle")
    m.add_constraint(m.var(bundle.hss_c[horizon - 1]), "=", hss.c_0,
                     label="hss_cycle")

    # ---- objective ---------------------------------------------------
    c1_fuel = LinExpr()
    c1_res = LinExpr()
    if tp_on:
        for i, u in enumerate(config.thermal_units):
            for t in range(horizon):
                c1_fuel = c1_fuel + add_piecewise_quadratic(
                    m, bundle.tp_p[i][t], u.a, u.b, u.c, (u.p_min, u.p_max),
                    config.piecewise_segments, prefix=f"pwq{i + 1}_t{t + 1}")
                c1_res.add_term(bundle.tp_r[i][t], u.w)

    gas_price_per_m3 = gas.mu_gc * gas.hhv / 1000.0  # CNY/GJ times GJ/m3
    c2 = LinExpr()
    for t in range(horizon):
        c2.add_term(bundle.v_p[t], gas_price_per_m3)
    for i, u in enumerate(config.gc_units):
        for t in range(horizon):
            c2.add_term(bundle.gc_r[i][t], u.delta)

    c3 = LinExpr()
    for t in range(horizon):
        c3.add_term(bundle.ess_c[t], ess.g1)
        c3.add_term(bundle.ess_d[t], ess.g2)
        c3.add_term(bundle.ess_r[t], ess.lambda_res)

    c4 = 0.0
    if mode in (2, 3):
        c4 = sum(u.beta * u.pe_max * horizon for u in config.np_units)

    e_f = carbon_mod.quota(config.carbon.f, config.loads.electric,
                           config.loads.heat, dt)
    e_net = LinExpr(const=-e_f)
    for i, u in enumerate(config.thermal_units):
        if tp_on:
            for t in range(horizon):
                e_net.add_term(bundle.tp_p[i][t], u.b_th * dt)
    for t in range(horizon):
        e_net.add_term(bundle.v_p[t], gas.b_ng)
    c5 = carbon_mod.embed_carbon_cost(m, e_net, config.carbon)

    bundle.c1_fuel_expr = c1_fuel
    bundle.c1_reserve_expr = c1_res
    bundle.c2_expr = c2
    bundle.c3_expr = c3
    bundle.c4_const = c4
    bundle.c5_expr = c5
    bundle.e_net_expr = e_net
    bundle.e_f = e_f

    m.set_objective(c1_fuel + c1_res + c2 + c3 + c5 + c4)

    # chance constraint on spinning reserve
    if config.alpha > 0.0:
        spec = ChanceSpec(config.alpha, tuple(sequences), tuple(expectations))
        bundle.dst_block = attach_reserve_chance(m, spec, bundle.reserve_exprs)

    return bundle


def extract_schedule(bundle: ModelBundle, result: SolveResult,
                     config: SystemConfig
                     ) -> tuple[DispatchSchedule, CostBreakdown,
                                carbon_mod.CarbonLedger, dict]:
    """Rebuild the schedule, costs, and carbon ledger from an optimal solve.

    Every cost and volume is recomputed with the closed-form device algebra;
    the diagnostics dict reports balance residuals, cyclic-storage error,
    headroom slack, the piecewise thermal cost of the model, and the gap to
    the solver objective.
    """
    if result.status != "optimal":
        raise InfeasibleModelError(f"cannot extract from status {result.status!r}")
    m = bundle.model
    horizon = config.horizon_t
    dt = config.delta_t
    gas = config.gas

    def val(idx):
        return result.assignment[m.var_names[idx]]

    def grid(cols):
        return [[val(v) for v in col] for col in cols]

    tp_p = grid(bundle.tp_p)
    tp_r = grid(bundle.tp_r)
    gc_e = grid(bundle.gc_e)
    gc_h = grid(bundle.gc_h)
    gc_r = grid(bundle.gc_r)
    zeros = [0.0] * horizon
    if bundle.mode == 1:
        np_e = [list(zeros) for _ in config.np_units]
        np_h = [list(zeros) for _ in config.np_units]
    else:
        np_e = grid(bundle.np_e)
        np_h = grid(bundle.np_h)
    p2g = [val(v) for v in bundle.p2g]
    ess_c = [val(v) for v in bundle.ess_c]
    ess_d = [val(v) for v in bundle.ess_d]
    ess_r = [val(v) for v in bundle.ess_r]
    ess_s = [val(v) for v in bundle.ess_s]
    hss_q = [val(v) for v in bundle.hss_q]
    hss_c = [val(v) for v in bundle.hss_c]
    p_r = [val(v) for v in bundle.p_r]

    gas_gc = []
    gas_p2g = []
    for t in range(horizon):
        v = sum(dev.gc_gas_volume(u, gas, max(0.0, gc_e[i][t]),
                                  max(0.0, gc_h[i][t]), dt)
                for i, u in enumerate(config.gc_units))
        gas_gc.append(v)
        gas_p2g.append(dev.p2g_gas_volume(config.p2g, gas, max(0.0, p2g[t]), dt))
    gas_buy = [gas_gc[t] - gas_p2g[t] for t in range(horizon)]

    schedule = DispatchSchedule(
        t=horizon, dt=dt, tp_p=tp_p, tp_r=tp_r, gc_e=gc_e, gc_h=gc_h,
        gc_r=gc_r, np_e=np_e, np_h=np_h, p2g=p2g, ess_c=ess_c, ess_d=ess_d,
        ess_r=ess_r, ess_soc=ess_s, hss_rate=hss_q, hss_soc=hss_c,
        re_absorbed=p_r,
        re_curtailed=[max(0.0, bundle.expectations[t] - p_r[t])
                      for t in range(horizon)],
        gas_gc=gas_gc, gas_p2g=gas_p2g, gas_buy=gas_buy)

    diagnostics = verify_schedule(schedule, config, mode=bundle.mode)

    # closed-form cost recomputation (true quadratic for the thermal fuel)
    c1 = 0.0
    if bundle.tp_enabled:
        for i, u in enumerate(config.thermal_units):
            for t in range(horizon):
                c1 += dev.thermal_fuel_cost(u, tp_p[i][t]) + u.w * tp_r[i][t]
    gas_price_per_m3 = gas.mu_gc * gas.hhv / 1000.0
    c2 = gas_price_per_m3 * sum(gas_buy)
    c2 += sum(u.delta * sum(gc_r[i]) for i, u in enumerate(config.gc_units))
    ess = config.ess
    c3 = sum(ess.g1 * c + ess.g2 * d + ess.lambda_res * r
             for c, d, r in zip(ess_c, ess_d, ess_r))
    c4 = bundle.c4_const

    e_th, e_ng, e_p2g = carbon_mod.actual_emissions(schedule, config)
    ledger = carbon_mod.build_ledger(e_th, e_ng, e_p2g, bundle.e_f,
                                     config.carbon)
    c5 = ledger.t_c
    costs = CostBreakdown(c1_thermal=c1, c2_gas=c2, c3_storage=c3,
                          c4_nuclear=c4, c5_carbon=c5,
                          total=c1 + c2 + c3 + c4 + c5)

    x = {name: v for name, v in result.assignment.items()}
    arr = [x[n] for n in m.var_names]
    pw_c1 = bundle.c1_fuel_expr.value(arr)
    c5_model = bundle.c5_expr.value(arr)
    diagnostics.update({
        "piecewise_c1": pw_c1,
        "true_c1_fuel": c1 - (sum(u.w * sum(tp_r[i]) for i, u in
                                  enumerate(config.thermal_units))
                              if bundle.tp_enabled else 0.0),
        "c5_model": c5_model,
        "c5_recomputed": c5,
        "objective_gap": result.objective_value
        - (pw_c1 + bundle.c1_reserve_expr.value(arr) + bundle.c2_expr.value(arr)
           + bundle.c3_expr.value(arr) + c5_model + bundle.c4_const),
    })
    if abs(c5_model - c5) > 1e-4:
        raise ExtractionError(
            f"embedded carbon cost {c5_model} disagrees with ledger {c5}")
    return schedule, costs, ledger, diagnostics


def verify_schedule(schedule: DispatchSchedule, config: SystemConfig,
                    mode: int | None = None, tol: float = 1e-5) -> dict:
    """Check balances, storage dynamics, and headroom on a schedule.

    Returns a diagnostics dict of maximal residuals; raises
    :class:`ExtractionError` when anything exceeds ``tol``.
    """
    mode = config.mode if mode is None else mode
    horizon = schedule.t
    dt = schedule.dt
    ess = config.ess
    hss = config.hss
    k_ess = ess.eta_e if ess.strict_paper_efficiency else 1.0

    ebal_resid = 0.0
    hbal_resid = 0.0
    gbal_resid = 0.0
    head_violation = 0.0
    for t in range(horizon):
        supply = (sum(col[t] for col in schedule.tp_p)
                  + sum(col[t] for col in schedule.gc_e)
                  + sum(col[t] for col in schedule.np_e)
                  + k_ess * (schedule.ess_d[t] - schedule.ess_c[t])
                  + schedule.re_absorbed[t] - schedule.p2g[t])
        ebal_resid = max(ebal_resid,
                         abs(supply - config.loads.electric[t]))
        heat = (sum(col[t] for col in schedule.gc_h)
                + sum(col[t] for col in schedule.np_h) + schedule.hss_rate[t])
        hbal_resid = max(hbal_resid, abs(heat - config.loads.heat[t]))
        gbal_resid = max(gbal_resid,
                         abs(schedule.gas_gc[t] - schedule.gas_p2g[t]
                             - schedule.gas_buy[t]))
        if schedule.gas_buy[t] < -tol:
            raise ExtractionError(
                f"period {t + 1}: negative gas purchase {schedule.gas_buy[t]}")
        for i, u in enumerate(config.thermal_units):
            head_violation = max(head_violation,
                                 schedule.tp_p[i][t] + schedule.tp_r[i][t]
                                 - u.p_max)
        for i, u in enumerate(config.gc_units):
            head_violation = max(head_violation,
                                 schedule.gc_e[i][t] + schedule.gc_r[i][t]
                                 - u.pe_max)
        start = ess.s_0 if t == 0 else schedule.ess_soc[t - 1]
        head_violation = max(
            head_violation,
            schedule.ess_r[t] - (start - ess.s_min) / dt,
            schedule.ess_r[t] - (ess.p_d_max - schedule.ess_d[t]))

    # storage trajectories must match the step functions and close the cycle
    s = ess.s_0
    c = hss.c_0
    storage_resid = 0.0
    for t in range(horizon):
        s = dev.ess_step(ess, s,
                         float(np.clip(schedule.ess_c[t], 0.0, ess.p_c_max)),
                         float(np.clip(schedule.ess_d[t], 0.0, ess.p_d_max)),
                         dt)
        c = dev.hss_step(hss, c,
                         float(np.clip(schedule.hss_rate[t], -hss.ph_c_max,
                                       hss.ph_c_max)), dt)
        storage_resid = max(storage_resid, abs(s - schedule.ess_soc[t]),
                            abs(c - schedule.hss_soc[t]))
    cyclic_resid = max(abs(schedule.ess_soc[-1] - ess.s_0),
                       abs(schedule.hss_soc[-1] - hss.c_0))

    diagnostics = {
        "ebal_residual": ebal_resid,
        "hbal_residual": hbal_resid,
        "gbal_residual": gbal_resid,
        "storage_residual": storage_resid,
        "cyclic_residual": cyclic_resid,
        "headroom_violation": max(0.0, head_violation),
    }
    worst = max(diagnostics.values())
    if worst > tol:
        raise ExtractionError(f"schedule verification failed: {diagnostics}")
    return diagnostics
