"""Device parameter types and closed-form per-device algebra.

All functions here are pure arithmetic.  The dispatch model builder uses the
same coefficients to assemble MILP constraints, and schedule extraction uses
the same functions to re-verify a solve, so bound enforcement (storage
capacity windows etc.) deliberately lives in the model, not here.

Units: powers MW, energies MWh, gas volumes m3, calorific values MJ/m3,
money CNY, emissions tonnes CO2.  MW.h is converted to kWh (factor 1000)
before applying the energy conversion coefficient (MJ/kWh).
"""

from __future__ import annotations

from dataclasses import dataclass

KWH_PER_MWH = 1000.0


@dataclass(frozen=True)
class ThermalUnit:
    p_min: float
    p_max: float
    r_d: float
    r_u: float
    a: float  # CNY/MW^2
    b: float  # CNY/MW
    c: float  # CNY
    w: float  # CNY/MW reserve cost
    b_th: float  # tCO2/MWh


@dataclass(frozen=True)
class GasCogenUnit:
    pe_min: float
    pe_max: float
    ph_max: float
    r_d_gc: float
    r_u_gc: float
    delta: float  # CNY/MW reserve cost
    eta_loss: float
    c_g: float  # thermoelectric ratio


@dataclass(frozen=True)
class NuclearCogenUnit:
    pe_min: float
    pe_max: float
    ph_max: float
    c_v: float  # thermoelectric ratio
    beta: float  # CNY/MW fuel cost


@dataclass(frozen=True)
class P2GUnit:
    eta_p2g: float
    p_max_p2g: float
    r_u_p2g: float
    r_d_p2g: float


@dataclass(frozen=True)
class ElectricStorage:
    s_min: float
    s_max: float
    s_0: float  # initial energy, also the required final energy
    p_d_max: float
    p_c_max: float
    eta_e: float
    g1: float  # CNY/MW charge cost
    g2: float  # CNY/MW discharge cost
    lambda_res: float  # CNY/MW reserve cost
    # apply eta_e on the grid side of the electric balance as well as in the
    # storage dynamics (the source model does both); set False to apply it
    # only in the dynamics
    strict_paper_efficiency: bool = True


@dataclass(frozen=True)
class HeatStorage:
    c_max: float
    c_0: float  # initial energy, also the required final energy
    ph_c_max: float


@dataclass(frozen=True)
class GasNetwork:
    hhv: float  # MJ/m3
    epsilon: float  # MJ/kWh
    mu_gc: float  # CNY/GJ
    b_ng: float  # tCO2/m3


def thermal_fuel_cost(unit: ThermalUnit, p: float) -> float:
    """Quadratic fuel cost of one thermal unit at power ``p`` for one period."""
    return unit.a * p * p + unit.b * p + unit.c


def np_electric_power(unit: NuclearCogenUnit, ph: float) -> float:
    """Electric output on the cogeneration segment at heat extraction ``ph``.

    The equivalent (reactor-side) power is pinned at ``pe_max``; extracting
    heat trades electric output at the thermoelectric ratio.
    """
    if ph < 0 or ph > unit.ph_max + 1e-9:
        raise ValueError(f"heat output {ph} outside [0, {unit.ph_max}]")
    return unit.pe_max - unit.c_v * ph


def p2g_gas_volume(unit: P2GUnit, gas: GasNetwork, p: float, dt: float) -> float:
    """Synthetic gas produced (m3) by running power-to-gas at ``p`` MW for ``dt`` h."""
    if p < 0:
        raise ValueError(f"negative power {p}")
    if dt <= 0:
        raise ValueError(f"non-positive duration {dt}")
    return unit.eta_p2g * p * dt * KWH_PER_MWH * gas.epsilon / gas.hhv


def gc_gas_volume(unit: GasCogenUnit, gas: GasNetwork, pe: float, ph: float,
                  dt: float) -> float:
    """Gas consumed (m3) by a cogeneration unit at electric ``pe`` and heat ``ph``."""
    if pe < 0 or ph < 0:
        raise ValueError(f"negative output (pe={pe}, ph={ph})")
    energy_kwh = (pe / unit.c_g + ph) * dt * KWH_PER_MWH
    return energy_kwh * gas.epsilon / ((1.0 - unit.eta_loss) * gas.hhv)


def ess_step(ess: ElectricStorage, s_t: float, p_c: float, p_d: float,
             dt: float) -> float:
    """One storage-dynamics step; the caller enforces capacity bounds."""
    if not 0 <= p_c <= ess.p_c_max + 1e-9:
        raise ValueError(f"charge power {p_c} outside [0, {ess.p_c_max}]")
    if not 0 <= p_d <= ess.p_d_max + 1e-9:
        raise ValueError(f"discharge power {p_d} outside [0, {ess.p_d_max}]")
    return s_t + ess.eta_e * (p_c - p_d) * dt


def hss_step(hss: HeatStorage, c_t: float, ph_c: float, dt: float) -> float:
    """One heat-storage step.

    Sign convention: ``ph_c > 0`` releases heat to the network (supply side
    of the heat balance), ``ph_c < 0`` stores heat.
    """
    if abs(ph_c) > hss.ph_c_max + 1e-9:
        raise ValueError(f"rate {ph_c} outside [-{hss.ph_c_max}, {hss.ph_c_max}]")
    return c_t - ph_c * dt


# coefficient helpers used by the MILP builder, derived from the volume
# formulas above so model and verification cannot drift apart

def gc_gas_coeff_e(unit: GasCogenUnit, gas: GasNetwork, dt: float) -> float:
    """m3 of gas per MW of GC electric output over one period."""
    return gc_gas_volume(unit, gas, 1.0, 0.0, dt)


def gc_gas_coeff_h(unit: GasCogenUnit, gas: GasNetwork, dt: float) -> float:
    """m3 of gas per MW of GC heat output over one period."""
    return gc_gas_volume(unit, gas, 0.0, 1.0, dt)


def p2g_gas_coeff(unit: P2GUnit, gas: GasNetwork, dt: float) -> float:
    """m3 of gas per MW of P2G input power over one period."""
    return p2g_gas_volume(unit, gas, 1.0, dt)


def gas_energy_gj(gas: GasNetwork, volume_m3: float) -> float:
    """Thermal energy content (GJ) of a gas volume."""
    return volume_m3 * gas.hhv / 1000.0
