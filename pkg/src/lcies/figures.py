"""Figure rendering for the report path.

Every plot function takes already-computed results and a target path; no
figure is ever shown interactively (the Agg backend is forced on import).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .config import SystemConfig
from .dispatch import DispatchSchedule

DPI = 150


def plot_dispatch(schedule: DispatchSchedule, config: SystemConfig,
                  path) -> None:
    """Stacked electric supply against the load, plus the reserve profile."""
    t = np.arange(1, schedule.t + 1)
    fig, (ax, ax_r) = plt.subplots(
        2, 1, figsize=(9, 6), sharex=True,
        gridspec_kw={"height_ratios": [3, 1]})

    layers = []
    for i, col in enumerate(schedule.tp_p):
        layers.append((f"thermal {i + 1}", np.array(col)))
    for i, col in enumerate(schedule.gc_e):
        layers.append((f"gas cogen {i + 1}", np.array(col)))
    for i, col in enumerate(schedule.np_e):
        layers.append((f"nuclear {i + 1}", np.array(col)))
    layers.append(("renewables", np.array(schedule.re_absorbed)))
    k = config.ess.eta_e if config.ess.strict_paper_efficiency else 1.0
    layers.append(("storage discharge", k * np.array(schedule.ess_d)))

    bottom = np.zeros(schedule.t)
    for name, values in layers:
        ax.bar(t, values, bottom=bottom, width=0.8, label=name)
        bottom += values
    ax.plot(t, np.array(config.loads.electric)
            + np.array(schedule.p2g) + k * np.array(schedule.ess_c),
            "k.-", lw=1.5, label="load + P2G + charge")
    ax.set_ylabel("MW")
    ax.legend(loc="upper left", fontsize=7, ncol=3)
    ax.set_title("electric dispatch")

    ax_r.plot(t, [schedule.total_reserve(i) for i in range(schedule.t)],
              "r.-", lw=1.2)
    ax_r.set_ylabel("reserve MW")
    ax_r.set_xlabel("period")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_storage(schedule: DispatchSchedule, config: SystemConfig,
                 path) -> None:
    """Electric and heat storage trajectories with their capacity windows."""
    t = np.arange(1, schedule.t + 1)
    fig, (ax_e, ax_h) = plt.subplots(2, 1, figsize=(9, 5), sharex=True)

    ax_e.step(t, schedule.ess_soc, where="mid", label="state of charge")
    ax_e.axhline(config.ess.s_min, color="gray", ls="--", lw=0.8)
    ax_e.axhline(config.ess.s_max, color="gray", ls="--", lw=0.8)
    ax_e.set_ylabel("electric MWh")
    ax_e.legend(fontsize=8)

    ax_h.step(t, schedule.hss_soc, where="mid", color="tab:orange",
              label="heat store")
    ax_h.axhline(0.0, color="gray", ls="--", lw=0.8)
    ax_h.axhline(config.hss.c_max, color="gray", ls="--", lw=0.8)
    ax_h.set_ylabel("heat MWh")
    ax_h.set_xlabel("period")
    ax_h.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_sweep(points, path) -> None:
    """Emissions and generation mix against the carbon price."""
    prices = [p.price_cny_per_t for p in points]
    fig, (ax_e, ax_g) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax_e.plot(prices, [p.emissions_t for p in points], "o-", ms=3)
    ax_e.set_ylabel("emissions t")
    ax_g.plot(prices, [p.tp_energy_mwh for p in points], "s-", ms=3,
              label="thermal MWh")
    ax_g.plot(prices, [p.gc_energy_mwh for p in points], "^-", ms=3,
              label="gas cogen MWh")
    ax_g.set_xlabel("carbon price CNY/t")
    ax_g.set_ylabel("energy MWh")
    ax_g.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_compare(reports, path) -> None:
    """Cost components and emissions per operating mode."""
    solved = [r for r in reports if r.status == "optimal"]
    if not solved:
        return
    modes = [str(r.mode) for r in solved]
    parts = [("thermal", "c1_thermal"), ("gas", "c2_gas"),
             ("storage", "c3_storage"), ("nuclear", "c4_nuclear"),
             ("carbon", "c5_carbon")]
    fig, (ax_c, ax_e) = plt.subplots(1, 2, figsize=(9, 4))
    bottom = np.zeros(len(solved))
    for name, attr in parts:
        vals = np.array([getattr(r.costs, attr) for r in solved])
        pos = np.clip(vals, 0.0, None)  # negative carbon cost plotted apart
        ax_c.bar(modes, pos, bottom=bottom, label=name)
        bottom += pos
        neg = np.clip(vals, None, 0.0)
        if np.any(neg < 0):
            ax_c.bar(modes, neg, label=f"{name} (revenue)")
    ax_c.set_ylabel("cost CNY")
    ax_c.set_xlabel("mode")
    ax_c.legend(fontsize=7)
    ax_e.bar(modes, [r.ledger.e_r for r in solved], color="tab:gray")
    ax_e.set_ylabel("emissions t")
    ax_e.set_xlabel("mode")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
