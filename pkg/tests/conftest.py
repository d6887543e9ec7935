import pytest

from lcies.carbon import CarbonPolicy
from lcies.config import (LoadProfile, SolverOptions, SystemConfig,
                          example_config_path, load_config)
from lcies.devices import (ElectricStorage, GasCogenUnit, GasNetwork,
                           HeatStorage, NuclearCogenUnit, P2GUnit, ThermalUnit)
from lcies.sequences import HourlyUncertainty, SolarModel, WindModel


def make_small_config(**overrides) -> SystemConfig:
    """Four-period system small enough for exhaustive checking."""
    t = overrides.pop("horizon_t", 4)
    base = dict(
        horizon_t=t,
        delta_t=1.0,
        thermal_units=[ThermalUnit(p_min=10.0, p_max=40.0, r_d=12.0, r_u=12.0,
                                   a=0.10, b=155.0, c=113.0, w=40.0, b_th=1.2)],
        gc_units=[GasCogenUnit(pe_min=20.0, pe_max=100.0, ph_max=120.0,
                               r_d_gc=45.0, r_u_gc=60.0, delta=30.0,
                               eta_loss=0.1, c_g=0.45)],
        np_units=[NuclearCogenUnit(pe_min=64.0, pe_max=100.0, ph_max=120.0,
                                   c_v=0.3, beta=250.0)],
        p2g=P2GUnit(eta_p2g=0.6, p_max_p2g=70.0, r_u_p2g=35.0, r_d_p2g=35.0),
        ess=ElectricStorage(s_min=32.0, s_max=200.0, s_0=100.0, p_d_max=50.0,
                            p_c_max=50.0, eta_e=0.95, g1=80.0, g2=80.0,
                            lambda_res=50.0),
        hss=HeatStorage(c_max=160.0, c_0=80.0, ph_c_max=40.0),
        gas=GasNetwork(hhv=36.0, epsilon=3.6, mu_gc=21.0, b_ng=0.00234),
        carbon=CarbonPolicy(f=0.0, k1=40.0, k2=120.0, k3=200.0,
                            e1=1000.0, e2=2400.0),
        loads=LoadProfile(electric=tuple([150.0] * t),
                          heat=tuple([90.0] * t)),
        uncertainty=[HourlyUncertainty(
            wind=WindModel(k_shape=2.0, c_scale=8.0, v_in=3.0, v_rated=11.0,
                           v_out=22.0, p_rated=40.0),
            solar=SolarModel(alpha_s=2.2, beta_s=2.0, p_rated=0.0))] * t,
        alpha=0.9,
        step_l=5.0,
        mode=1,
        tp_enabled_modes=(1,),
        solver=SolverOptions(time_limit_s=60.0, mip_gap=None),
    )
    base.update(overrides)
    return SystemConfig(**base)


@pytest.fixture
def small_config():
    return make_small_config()


@pytest.fixture(scope="session")
def example_config():
    return load_config(example_config_path())
