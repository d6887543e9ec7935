"""System configuration: ingestion, validation, serialization.

The single source of truth for every symbol the model consumes.  A config
document is a JSON file; load profiles may be inlined or referenced as a
sibling CSV (``{"csv": "loads.csv"}`` with header ``t,electric_mw,heat_mw``).

Validation never raises per violation: :func:`validate` returns machine-
readable violation codes, and :func:`load_config` raises only for parse /
schema / unit problems (or a non-empty validation report).
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .carbon import PRICING_MODES, STEPPED_LITERAL, CarbonPolicy
from .devices import (ElectricStorage, GasCogenUnit, GasNetwork, HeatStorage,
                      NuclearCogenUnit, P2GUnit, ThermalUnit)
from .sequences import (BINNING_CENTERED, BINNING_FLOOR, HourlyUncertainty,
                        SolarModel, WindModel)


class ConfigError(Exception):
    """Base class for configuration problems."""


class ConfigParseError(ConfigError):
    """The document is not well-formed."""


class SchemaError(ConfigError):
    """Missing required key or wrong type; names the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class UnitError(ConfigError):
    """A physically impossible quantity (e.g. negative capacity)."""


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class LoadProfile:
    electric: tuple[float, ...]
    heat: tuple[float, ...]


@dataclass(frozen=True)
class SolverOptions:
    time_limit_s: float | None = None
    mip_gap: float | None = None


@dataclass
class SystemConfig:
    horizon_t: int
    delta_t: float
    thermal_units: list[ThermalUnit]
    gc_units: list[GasCogenUnit]
    np_units: list[NuclearCogenUnit]
    p2g: P2GUnit
    ess: ElectricStorage
    hss: HeatStorage
    gas: GasNetwork
    carbon: CarbonPolicy
    loads: LoadProfile
    uncertainty: list[HourlyUncertainty]
    alpha: float
    step_l: float
    mode: int
    tp_enabled_modes: tuple[int, ...] = (1, 2, 3)
    dst_binning: str = BINNING_FLOOR
    piecewise_segments: int = 8
    solver: SolverOptions = field(default_factory=SolverOptions)
    provenance: list[str] = field(default_factory=list, compare=False)

    def tp_enabled(self, mode: int | None = None) -> bool:
        return (self.mode if mode is None else mode) in self.tp_enabled_modes


def _req(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing required key")
    val = obj[key]
    if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
        return float(val)
    if kind is int and isinstance(val, int) and not isinstance(val, bool):
        return val
    if not isinstance(val, kind):
        raise SchemaError(f"{path}.{key}" if path else key,
                          f"expected {kind.__name__}, got {type(val).__name__}")
    return val


def _opt(obj: dict, key: str, kind, path: str, default, provenance: list[str]):
    if key not in obj:
        provenance.append(f"{path}.{key}={default!r} (default)"
                          if path else f"{key}={default!r} (default)")
        return default
    return _req(obj, key, kind, path)


def _floats(obj: dict, key: str, path: str) -> tuple[float, ...]:
    raw = _req(obj, key, list, path)
    out = []
    for i, v in enumerate(raw):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise SchemaError(f"{path}.{key}[{i}]", "expected number")
        out.append(float(v))
    return tuple(out)


def _parse_thermal(obj: dict, path: str) -> ThermalUnit:
    return ThermalUnit(
        p_min=_req(obj, "p_min", float, path), p_max=_req(obj, "p_max", float, path),
        r_d=_req(obj, "r_d", float, path), r_u=_req(obj, "r_u", float, path),
        a=_req(obj, "a", float, path), b=_req(obj, "b", float, path),
        c=_req(obj, "c", float, path), w=_req(obj, "w", float, path),
        b_th=_req(obj, "b_th", float, path))


def _parse_gc(obj: dict, path: str) -> GasCogenUnit:
    return GasCogenUnit(
        pe_min=_req(obj, "pe_min", float, path), pe_max=_req(obj, "pe_max", float, path),
        ph_max=_req(obj, "ph_max", float, path),
        r_d_gc=_req(obj, "r_d_gc", float, path), r_u_gc=_req(obj, "r_u_gc", float, path),
        delta=_req(obj, "delta", float, path),
        eta_loss=_req(obj, "eta_loss", float, path), c_g=_req(obj, "c_g", float, path))


def _parse_np(obj: dict, path: str) -> NuclearCogenUnit:
    return NuclearCogenUnit(
        pe_min=_req(obj, "pe_min", float, path), pe_max=_req(obj, "pe_max", float, path),
        ph_max=_req(obj, "ph_max", float, path),
        c_v=_req(obj, "c_v", float, path), beta=_req(obj, "beta", float, path))


def _parse_loads(obj: dict, base_dir: Path, horizon: int) -> LoadProfile:
    if "csv" in obj:
        csv_path = base_dir / obj["csv"]
        try:
            with open(csv_path, newline="") as fh:
                rows = list(csv.DictReader(fh))
        except OSError as exc:
            raise ConfigParseError(f"cannot read load CSV {csv_path}: {exc}") from exc
        if not rows or set(rows[0]) < {"t", "electric_mw", "heat_mw"}:
            raise SchemaError("loads.csv", "expected header t,electric_mw,heat_mw")
        rows.sort(key=lambda r: int(r["t"]))
        electric = tuple(float(r["electric_mw"]) for r in rows)
        heat = tuple(float(r["heat_mw"]) for r in rows)
    else:
        electric = _floats(obj, "electric", "loads")
        heat = _floats(obj, "heat", "loads")
    return LoadProfile(electric=electric, heat=heat)


def example_config_path() -> Path:
    """Path of the shipped illustrative 24-hour system."""
    return Path(__file__).parent / "data" / "example_system.json"


def load_config(path) -> SystemConfig:
    """Read and fully validate a configuration document."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"malformed document {path}: {exc}") from exc
    config = parse_config(raw, base_dir=path.parent)
    report = validate(config)
    if report:
        raise UnitError("; ".join(f"{v.code}: {v.message}" for v in report))
    return config


def parse_config(raw: dict, base_dir: Path | None = None) -> SystemConfig:
    if not isinstance(raw, dict):
        raise SchemaError("<root>", "document must be an object")
    base_dir = base_dir or Path(".")
    prov: list[str] = []

    horizon = _req(raw, "horizon", dict, "")
    t = _req(horizon, "T", int, "horizon")
    dt = _req(horizon, "dt_hours", float, "horizon")

    thermal = [_parse_thermal(u, f"thermal[{i}]")
               for i, u in enumerate(_req(raw, "thermal", list, ""))]
    gc = [_parse_gc(u, f"gc[{i}]") for i, u in enumerate(_req(raw, "gc", list, ""))]
    np_units = [_parse_np(u, f"np[{i}]") for i, u in enumerate(_req(raw, "np", list, ""))]

    p2g_obj = _req(raw, "p2g", dict, "")
    p2g = P2GUnit(eta_p2g=_req(p2g_obj, "eta_p2g", float, "p2g"),
                  p_max_p2g=_req(p2g_obj, "p_max_p2g", float, "p2g"),
                  r_u_p2g=_req(p2g_obj, "r_u_p2g", float, "p2g"),
                  r_d_p2g=_req(p2g_obj, "r_d_p2g", float, "p2g"))

    ess_obj = _req(raw, "ess", dict, "")
    ess = ElectricStorage(
        s_min=_req(ess_obj, "s_min", float, "ess"),
        s_max=_req(ess_obj, "s_max", float, "ess"),
        s_0=_req(ess_obj, "s_0", float, "ess"),
        p_d_max=_req(ess_obj, "p_d_max", float, "ess"),
        p_c_max=_req(ess_obj, "p_c_max", float, "ess"),
        eta_e=_req(ess_obj, "eta_e", float, "ess"),
        g1=_req(ess_obj, "g1", float, "ess"), g2=_req(ess_obj, "g2", float, "ess"),
        lambda_res=_req(ess_obj, "lambda_res", float, "ess"),
        strict_paper_efficiency=_opt(ess_obj, "strict_paper_efficiency", bool,
                                     "ess", True, prov))

    hss_obj = _req(raw, "hss", dict, "")
    hss = HeatStorage(c_max=_req(hss_obj, "c_max", float, "hss"),
                      c_0=_req(hss_obj, "c_0", float, "hss"),
                      ph_c_max=_req(hss_obj, "ph_c_max", float, "hss"))

    gas_obj = _req(raw, "gas", dict, "")
    gas = GasNetwork(hhv=_req(gas_obj, "hhv", float, "gas"),
                     epsilon=_req(gas_obj, "epsilon", float, "gas"),
                     mu_gc=_req(gas_obj, "mu_gc", float, "gas"),
                     b_ng=_req(gas_obj, "b_ng", float, "gas"))

    carbon_obj = _req(raw, "carbon", dict, "")
    if carbon_obj.get("k_fixed") is None:
        # absent or null: fixed-price mode falls back to the middle tier
        k_fixed = None
        prov.append("carbon.k_fixed=None (default, middle tier)")
    else:
        k_fixed = _req(carbon_obj, "k_fixed", float, "carbon")
    policy = CarbonPolicy(
        f=_req(carbon_obj, "f", float, "carbon"),
        k1=_req(carbon_obj, "k1", float, "carbon"),
        k2=_req(carbon_obj, "k2", float, "carbon"),
        k3=_req(carbon_obj, "k3", float, "carbon"),
        e1=_req(carbon_obj, "e1", float, "carbon"),
        e2=_req(carbon_obj, "e2", float, "carbon"),
        pricing_mode=_opt(carbon_obj, "pricing_mode", str, "carbon",
                          STEPPED_LITERAL, prov),
        k_fixed=k_fixed)

    loads = _parse_loads(_req(raw, "loads", dict, ""), base_dir, t)

    uncertainty = []
    for i, hour in enumerate(_req(raw, "uncertainty", list, "")):
        wind_obj = _req(hour, "wind", dict, f"uncertainty[{i}]")
        solar_obj = _req(hour, "solar", dict, f"uncertainty[{i}]")
        wind = WindModel(k_shape=_req(wind_obj, "k_shape", float, f"uncertainty[{i}].wind"),
                         c_scale=_req(wind_obj, "c_scale", float, f"uncertainty[{i}].wind"),
                         v_in=_req(wind_obj, "v_in", float, f"uncertainty[{i}].wind"),
                         v_rated=_req(wind_obj, "v_rated", float, f"uncertainty[{i}].wind"),
                         v_out=_req(wind_obj, "v_out", float, f"uncertainty[{i}].wind"),
                         p_rated=_req(wind_obj, "p_rated", float, f"uncertainty[{i}].wind"))
        solar = SolarModel(alpha_s=_req(solar_obj, "alpha_s", float, f"uncertainty[{i}].solar"),
                           beta_s=_req(solar_obj, "beta_s", float, f"uncertainty[{i}].solar"),
                           p_rated=_req(solar_obj, "p_rated", float, f"uncertainty[{i}].solar"))
        uncertainty.append(HourlyUncertainty(wind=wind, solar=solar))

    solver_obj = _opt(raw, "solver", dict, "", {}, prov)
    solver = SolverOptions(
        time_limit_s=solver_obj.get("time_limit_s"),
        mip_gap=solver_obj.get("mip_gap"))

    dst_obj = _opt(raw, "dst", dict, "", {"binning": BINNING_FLOOR}, prov)
    binning = dst_obj.get("binning", BINNING_FLOOR)

    tp_modes = _opt(raw, "tp_enabled_modes", list, "", [1, 2, 3], prov)

    return SystemConfig(
        horizon_t=t, delta_t=dt, thermal_units=thermal, gc_units=gc,
        np_units=np_units, p2g=p2g, ess=ess, hss=hss, gas=gas, carbon=policy,
        loads=loads, uncertainty=uncertainty,
        alpha=_req(raw, "alpha", float, ""), step_l=_req(raw, "step_l", float, ""),
        mode=_req(raw, "mode", int, ""), tp_enabled_modes=tuple(tp_modes),
        dst_binning=binning,
        piecewise_segments=_opt(raw, "piecewise_segments", int, "", 8, prov),
        solver=solver, provenance=prov)


def validate(config: SystemConfig) -> list[Violation]:
    """Deterministic, side-effect-free invariant check; empty list on success."""
    out: list[Violation] = []

    def bad(code, msg):
        out.append(Violation(code, msg))

    if config.horizon_t < 1:
        bad("horizon.T", f"T must be >= 1, got {config.horizon_t}")
    if config.delta_t <= 0:
        bad("horizon.dt", f"dt must be positive, got {config.delta_t}")
    if not 0.0 <= config.alpha <= 1.0:
        bad("alpha.range", f"alpha {config.alpha} outside [0, 1]")
    if config.step_l <= 0:
        bad("step_l.positive", f"step_l must be positive, got {config.step_l}")
    if config.mode not in (1, 2, 3):
        bad("mode.value", f"mode must be 1, 2 or 3, got {config.mode}")
    if config.dst_binning not in (BINNING_FLOOR, BINNING_CENTERED):
        bad("dst.binning", f"unknown binning {config.dst_binning!r}")
    if config.piecewise_segments < 1:
        bad("piecewise_segments", "must be >= 1")

    t = config.horizon_t
    if len(config.loads.electric) != t:
        bad("loads.electric_length",
            f"expected {t} entries, got {len(config.loads.electric)}")
    if len(config.loads.heat) != t:
        bad("loads.heat_length", f"expected {t} entries, got {len(config.loads.heat)}")
    if any(v < 0 for v in config.loads.electric + config.loads.heat):
        bad("loads.negative", "loads must be nonnegative")
    if len(config.uncertainty) != t:
        bad("uncertainty.length",
            f"expected {t} entries, got {len(config.uncertainty)}")

    for i, u in enumerate(config.thermal_units):
        if not 0 <= u.p_min <= u.p_max:
            bad(f"thermal[{i}].power_order", f"require 0 <= p_min <= p_max, "
                f"got [{u.p_min}, {u.p_max}]")
        if u.r_d < 0 or u.r_u < 0:
            bad(f"thermal[{i}].ramp_sign", "ramps must be nonnegative")
        if u.a < 0:
            bad(f"thermal[{i}].cost_convexity", "quadratic coefficient must be >= 0")
        if u.b_th < 0:
            bad(f"thermal[{i}].emission_sign", "emission intensity must be >= 0")

    for i, u in enumerate(config.gc_units):
        if not 0 <= u.pe_min <= u.pe_max:
            bad(f"gc[{i}].power_order", f"require 0 <= pe_min <= pe_max, "
                f"got [{u.pe_min}, {u.pe_max}]")
        if u.ph_max < 0:
            bad(f"gc[{i}].heat_sign", "ph_max must be nonnegative")
        if not 0 <= u.eta_loss < 1:
            bad(f"gc[{i}].loss_range", f"eta_loss {u.eta_loss} outside [0, 1)")
        if u.c_g <= 0:
            bad(f"gc[{i}].ratio_sign", "thermoelectric ratio must be positive")

    for i, u in enumerate(config.np_units):
        if abs(u.pe_min - (u.pe_max - u.c_v * u.ph_max)) > 1e-6:
            bad(f"np[{i}].segment_consistency",
                f"pe_min must equal pe_max - c_v*ph_max "
                f"({u.pe_min} vs {u.pe_max - u.c_v * u.ph_max})")
        if not 0 <= u.pe_min <= u.pe_max:
            bad(f"np[{i}].power_order", f"require 0 <= pe_min <= pe_max, "
                f"got [{u.pe_min}, {u.pe_max}]")

    p = config.p2g
    if not 0 < p.eta_p2g <= 1:
        bad("p2g.efficiency_range", f"eta_p2g {p.eta_p2g} outside (0, 1]")
    if p.p_max_p2g < 0:
        bad("p2g.capacity_sign", "p_max_p2g must be nonnegative")

    e = config.ess
    if not 0 <= e.s_min <= e.s_0 <= e.s_max:
        bad("ess.capacity_order",
            f"require 0 <= s_min <= s_0 <= s_max, got "
            f"({e.s_min}, {e.s_0}, {e.s_max})")
    if not 0 < e.eta_e <= 1:
        bad("ess.efficiency_range", f"eta_e {e.eta_e} outside (0, 1]")
    if e.p_c_max < 0 or e.p_d_max < 0:
        bad("ess.power_sign", "power limits must be nonnegative")

    h = config.hss
    if not 0 <= h.c_0 <= h.c_max:
        bad("hss.capacity_order",
            f"require 0 <= c_0 <= c_max, got ({h.c_0}, {h.c_max})")
    if h.ph_c_max < 0:
        bad("hss.rate_sign", "ph_c_max must be nonnegative")

    g = config.gas
    if g.hhv <= 0:
        bad("gas.hhv_sign", "calorific value must be positive")
    if g.epsilon <= 0:
        bad("gas.epsilon_sign", "conversion coefficient must be positive")
    if g.b_ng < 0:
        bad("gas.emission_sign", "emission factor must be >= 0")

    c = config.carbon
    if not c.k1 <= c.k2 <= c.k3:
        bad("carbon.price_order", f"require k1 <= k2 <= k3, got "
            f"({c.k1}, {c.k2}, {c.k3})")
    if c.e1 > c.e2:
        bad("carbon.threshold_order", f"require e1 <= e2, got ({c.e1}, {c.e2})")
    if min(c.k1, c.k2, c.k3) < 0 or (c.k_fixed is not None and c.k_fixed < 0):
        bad("carbon.price_sign", "prices must be nonnegative")
    if c.f < 0:
        bad("carbon.quota_sign", "quota coefficient must be >= 0")
    if c.pricing_mode not in PRICING_MODES:
        bad("carbon.pricing_mode", f"unknown mode {c.pricing_mode!r}")

    for i, hour in enumerate(config.uncertainty):
        w = hour.wind
        if not 0 < w.v_in < w.v_rated < w.v_out:
            bad(f"uncertainty[{i}].wind.speed_order",
                "require 0 < v_in < v_rated < v_out")
        if w.k_shape <= 0 or w.c_scale <= 0 or w.p_rated <= 0:
            bad(f"uncertainty[{i}].wind.parameter_sign",
                "Weibull parameters and rating must be positive")
        s = hour.solar
        if s.alpha_s <= 0 or s.beta_s <= 0:
            bad(f"uncertainty[{i}].solar.parameter_sign",
                "Beta parameters must be positive")
        if s.p_rated < 0:
            bad(f"uncertainty[{i}].solar.rating_sign", "rating must be >= 0")

    return out


def serialize(config: SystemConfig) -> str:
    """Render a config back into the document schema (round-trips)."""
    doc = {
        "horizon": {"T": config.horizon_t, "dt_hours": config.delta_t},
        "thermal": [asdict(u) for u in config.thermal_units],
        "gc": [asdict(u) for u in config.gc_units],
        "np": [asdict(u) for u in config.np_units],
        "p2g": asdict(config.p2g),
        "ess": asdict(config.ess),
        "hss": asdict(config.hss),
        "gas": asdict(config.gas),
        "carbon": asdict(config.carbon),
        "loads": {"electric": list(config.loads.electric),
                  "heat": list(config.loads.heat)},
        "uncertainty": [{"wind": asdict(h.wind), "solar": asdict(h.solar)}
                        for h in config.uncertainty],
        "alpha": config.alpha,
        "step_l": config.step_l,
        "mode": config.mode,
        "tp_enabled_modes": list(config.tp_enabled_modes),
        "dst": {"binning": config.dst_binning},
        "piecewise_segments": config.piecewise_segments,
        "solver": {"time_limit_s": config.solver.time_limit_s,
                   "mip_gap": config.solver.mip_gap},
    }
    return json.dumps(doc, indent=2)
