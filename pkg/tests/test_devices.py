import pytest

from lcies.devices import (ElectricStorage, GasCogenUnit, GasNetwork,
                           HeatStorage, NuclearCogenUnit, P2GUnit,
                           ThermalUnit, ess_step, gas_energy_gj,
                           gc_gas_coeff_e, gc_gas_coeff_h, gc_gas_volume,
                           hss_step, np_electric_power, p2g_gas_coeff,
                           p2g_gas_volume, thermal_fuel_cost)

GAS = GasNetwork(hhv=36.0, epsilon=3.6, mu_gc=21.0, b_ng=0.00234)


def test_thermal_fuel_cost_quadratic():
    unit = ThermalUnit(p_min=10, p_max=40, r_d=12, r_u=12, a=0.18, b=237.25,
                       c=113.02, w=40, b_th=0.97)
    assert thermal_fuel_cost(unit, 0.0) == pytest.approx(113.02)
    assert thermal_fuel_cost(unit, 20.0) == pytest.approx(
        0.18 * 400 + 237.25 * 20 + 113.02)


def test_np_cogeneration_segment():
    unit = NuclearCogenUnit(pe_min=64, pe_max=100, ph_max=120, c_v=0.3,
                            beta=250)
    # full heat extraction trades down to the electric minimum
    assert np_electric_power(unit, 120.0) == pytest.approx(64.0, abs=0.1)
    assert np_electric_power(unit, 0.0) == pytest.approx(100.0)
    assert np_electric_power(unit, 60.0) == pytest.approx(82.0)
    with pytest.raises(ValueError):
        np_electric_power(unit, 121.0)
    with pytest.raises(ValueError):
        np_electric_power(unit, -1.0)


def test_p2g_volume_hand_case():
    unit = P2GUnit(eta_p2g=0.6, p_max_p2g=70, r_u_p2g=35, r_d_p2g=35)
    # 70 MW for 1 h at 60% efficiency: 0.6*70*1000 kWh * 3.6 / 36 = 4200 m3
    assert p2g_gas_volume(unit, GAS, 70.0, 1.0) == pytest.approx(4200.0,
                                                                 abs=0.1)
    assert p2g_gas_volume(unit, GAS, 0.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        p2g_gas_volume(unit, GAS, -1.0, 1.0)
    with pytest.raises(ValueError):
        p2g_gas_volume(unit, GAS, 1.0, 0.0)


def test_gc_volume_hand_case():
    unit = GasCogenUnit(pe_min=30, pe_max=100, ph_max=120, r_d_gc=45,
                        r_u_gc=60, delta=30, eta_loss=0.1, c_g=0.3)
    # pe=30, ph=0: (30/0.3)*1000 kWh * 3.6 / (0.9*36) = 11111.1 m3
    assert gc_gas_volume(unit, GAS, 30.0, 0.0, 1.0) == pytest.approx(11111.1,
                                                                     abs=0.1)
    # heat contributes 1:1 inside the bracket
    only_heat = gc_gas_volume(unit, GAS, 0.0, 9.0, 1.0)
    assert only_heat == pytest.approx(9.0 * 1000 * 3.6 / (0.9 * 36.0))
    with pytest.raises(ValueError):
        gc_gas_volume(unit, GAS, -1.0, 0.0, 1.0)


def test_gas_coeffs_match_volumes():
    unit = GasCogenUnit(pe_min=20, pe_max=100, ph_max=120, r_d_gc=45,
                        r_u_gc=60, delta=30, eta_loss=0.1, c_g=0.45)
    p2g = P2GUnit(eta_p2g=0.6, p_max_p2g=70, r_u_p2g=35, r_d_p2g=35)
    pe, ph, dt = 37.5, 81.25, 0.5
    assert (gc_gas_coeff_e(unit, GAS, dt) * pe
            + gc_gas_coeff_h(unit, GAS, dt) * ph) == pytest.approx(
        gc_gas_volume(unit, GAS, pe, ph, dt), rel=1e-12)
    assert p2g_gas_coeff(p2g, GAS, dt) * 33.0 == pytest.approx(
        p2g_gas_volume(p2g, GAS, 33.0, dt), rel=1e-12)


def test_ess_step():
    ess = ElectricStorage(s_min=32, s_max=200, s_0=100, p_d_max=50,
                          p_c_max=50, eta_e=0.95, g1=80, g2=80,
                          lambda_res=50)
    assert ess_step(ess, 100.0, 20.0, 0.0, 1.0) == pytest.approx(119.0)
    assert ess_step(ess, 100.0, 0.0, 20.0, 1.0) == pytest.approx(81.0)
    assert ess_step(ess, 100.0, 10.0, 10.0, 1.0) == pytest.approx(100.0)
    with pytest.raises(ValueError):
        ess_step(ess, 100.0, 60.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ess_step(ess, 100.0, 0.0, -1.0, 1.0)


def test_hss_step_sign_convention():
    hss = HeatStorage(c_max=160, c_0=80, ph_c_max=40)
    # positive rate releases heat and drains the store
    assert hss_step(hss, 80.0, 30.0, 1.0) == pytest.approx(50.0)
    assert hss_step(hss, 80.0, -30.0, 1.0) == pytest.approx(110.0)
    with pytest.raises(ValueError):
        hss_step(hss, 80.0, 41.0, 1.0)


def test_gas_energy():
    assert gas_energy_gj(GAS, 1000.0) == pytest.approx(36.0)
