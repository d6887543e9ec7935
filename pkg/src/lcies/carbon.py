"""Emissions accounting, quota baselining, and the stepped carbon price.

Everything exists twice on purpose: as plain post-solve arithmetic
(:func:`actual_emissions`, :func:`trading_cost`) and as MILP-embeddable
constraints (:func:`embed_carbon_cost`).  After every solve the embedded
cost expression is checked against the arithmetic on the extracted net
position.

Pricing modes:

``stepped_literal``
    The whole net position is priced at the tier its magnitude selects
    (discontinuous at the thresholds; thresholds themselves belong to the
    middle tier).
``stepped_marginal``
    Conventional ladder: each tranche is priced at its own tier.
``fixed``
    Single price ``k_fixed``.

A net seller (negative position) earns revenue at the lowest tier price in
both stepped modes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .milp import LinExpr, LinearModel, ModelError

STEPPED_LITERAL = "stepped_literal"
STEPPED_MARGINAL = "stepped_marginal"
FIXED = "fixed"

PRICING_MODES = (STEPPED_LITERAL, STEPPED_MARGINAL, FIXED)

# strict tier boundaries are approximated to this width in the MILP
TIER_EPS = 1e-6


@dataclass(frozen=True)
class CarbonPolicy:
    f: float  # quota coefficient, tCO2/MWh
    k1: float
    k2: float
    k3: float  # CNY/t tier prices
    e1: float
    e2: float  # t thresholds
    pricing_mode: str = STEPPED_LITERAL
    k_fixed: float | None = None

    def fixed_price(self) -> float:
        return self.k2 if self.k_fixed is None else self.k_fixed


@dataclass(frozen=True)
class CarbonLedger:
    e_th: float
    e_ng: float
    e_p2g: float
    e_r: float
    e_f: float
    e_net: float
    k_applied: float
    t_c: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["e_th", "e_ng", "e_p2g", "e_r", "e_f", "e_net",
                             "k_applied", "t_c"])
            writer.writerow([f"{self.e_th:.6f}", f"{self.e_ng:.6f}",
                             f"{self.e_p2g:.6f}", f"{self.e_r:.6f}",
                             f"{self.e_f:.6f}", f"{self.e_net:.6f}",
                             f"{self.k_applied:.6f}", f"{self.t_c:.6f}"])


def quota(f: float, electric_mw, heat_mw, dt: float) -> float:
    """Free emission allowance from the equivalent power load.

    The equivalent load is taken as the sum of electric and heat demand;
    irrelevant whenever ``f`` is zero.
    """
    if f < 0:
        raise ValueError(f"negative quota coefficient {f}")
    return f * dt * (sum(electric_mw) + sum(heat_mw))


def actual_emissions(schedule, config) -> tuple[float, float, float]:
    """Emission components (thermal, gas combustion, P2G credit) in tonnes.

    ``schedule`` provides per-unit thermal powers and per-period gas volumes;
    ``config`` provides emission intensities.
    """
    dt = config.delta_t
    e_th = 0.0
    for i, unit in enumerate(config.thermal_units):
        e_th += unit.b_th * dt * sum(schedule.tp_p[i])
    b_ng = config.gas.b_ng
    e_ng = b_ng * sum(schedule.gas_gc)
    e_p2g = b_ng * sum(schedule.gas_p2g)
    return e_th, e_ng, e_p2g


def applied_price(e_net: float, policy: CarbonPolicy) -> float:
    """Tier price for the whole-quantity (literal) and fixed modes.

    In marginal mode this returns the tier price of the tranche containing
    ``e_net``, for reporting only.
    """
    if policy.pricing_mode == FIXED:
        return policy.fixed_price()
    if e_net < 0:
        return policy.k1
    if e_net < policy.e1:
        return policy.k1
    if e_net <= policy.e2:
        return policy.k2
    return policy.k3


def trading_cost(e_net: float, policy: CarbonPolicy) -> float:
    """Carbon trading cost (negative = revenue from selling allowances)."""
    if policy.pricing_mode == FIXED:
        return policy.fixed_price() * e_net
    if policy.pricing_mode == STEPPED_LITERAL:
        return applied_price(e_net, policy) * e_net
    if policy.pricing_mode == STEPPED_MARGINAL:
        if e_net < 0:
            return policy.k1 * e_net
        s1 = min(e_net, policy.e1)
        s2 = min(max(e_net - policy.e1, 0.0), policy.e2 - policy.e1)
        s3 = max(e_net - policy.e2, 0.0)
        return policy.k1 * s1 + policy.k2 * s2 + policy.k3 * s3
    raise ValueError(f"unknown pricing mode {policy.pricing_mode!r}")


def build_ledger(e_th: float, e_ng: float, e_p2g: float, e_f: float,
                 policy: CarbonPolicy) -> CarbonLedger:
    e_r = e_th + e_ng - e_p2g
    e_net = e_r - e_f
    return CarbonLedger(e_th=e_th, e_ng=e_ng, e_p2g=e_p2g, e_r=e_r, e_f=e_f,
                        e_net=e_net, k_applied=applied_price(e_net, policy),
                        t_c=trading_cost(e_net, policy))


def embed_carbon_cost(model: LinearModel, e_net_expr: LinExpr,
                      policy: CarbonPolicy, prefix: str = "carbon") -> LinExpr:
    """Add MILP machinery pricing ``e_net_expr`` and return the cost expression.

    Literal mode: one indicator binary per tier, tier-interval constraints,
    and a per-tier copy of the net position so the product price*quantity
    stays linear.  Marginal mode: bounded segment variables filled in price
    order (convexity makes binaries unnecessary for the nonnegative part).
    Fixed mode adds nothing.
    """
    if policy.pricing_mode == FIXED:
        return e_net_expr * policy.fixed_price()

    e_lo, e_hi = model.expr_bounds(e_net_expr)
    if not (e_lo > -float("inf") and e_hi < float("inf")):
        raise ModelError("net emission expression is unbounded; cannot derive big-M")

    if policy.pricing_mode == STEPPED_LITERAL:
        tiers = [
            (policy.k1, e_lo, policy.e1 - TIER_EPS),
            (policy.k2, policy.e1, policy.e2),
            (policy.k3, policy.e2 + TIER_EPS, e_hi),
        ]
        cost = LinExpr()
        pick = LinExpr()
        recompose = e_net_expr.copy()
        for j, (price, lo, hi) in enumerate(tiers, start=1):
            lo = max(lo, e_lo)
            hi = min(hi, e_hi)
            u = model.add_var(f"{prefix}_tier{j}", kind="binary")
            pick.add_term(u, 1.0)
            if lo > hi:
                # tier interval cannot intersect the attainable range
                model.add_constraint(model.var(u), "=", 0.0,
                                     label=f"{prefix}_tier{j}_empty")
                continue
            e_j = model.add_var(f"{prefix}_e{j}", min(lo, 0.0), max(hi, 0.0))
            model.add_constraint(model.var(e_j) - model.var(u, lo), ">=", 0.0,
                                 label=f"{prefix}_tier{j}_lo")
            model.add_constraint(model.var(e_j) - model.var(u, hi), "<=", 0.0,
                                 label=f"{prefix}_tier{j}_hi")
            recompose.add_term(e_j, -1.0)
            cost.add_term(e_j, price)
        model.add_constraint(pick, "=", 1.0, label=f"{prefix}_one_tier")
        model.add_constraint(recompose, "=", 0.0, label=f"{prefix}_split")
        return cost

    if policy.pricing_mode == STEPPED_MARGINAL:
        s1 = model.add_var(f"{prefix}_seg1", 0.0, policy.e1)
        s2 = model.add_var(f"{prefix}_seg2", 0.0, policy.e2 - policy.e1)
        s3 = model.add_var(f"{prefix}_seg3", 0.0, max(0.0, e_hi - policy.e2))
        neg = model.add_var(f"{prefix}_neg", 0.0, max(0.0, -e_lo))
        recompose = e_net_expr.copy()
        recompose.add_term(s1, -1.0)
        recompose.add_term(s2, -1.0)
        recompose.add_term(s3, -1.0)
        recompose.add_term(neg, 1.0)
        model.add_constraint(recompose, "=", 0.0, label=f"{prefix}_split")
        return LinExpr({s1: policy.k1, s2: policy.k2, s3: policy.k3,
                        neg: -policy.k1})

    raise ValueError(f"unknown pricing mode {policy.pricing_mode!r}")
