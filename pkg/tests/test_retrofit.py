import io
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h2plan import retrofit as rf

SPEC = rf.dash8_400()
PA = rf.PowertrainAssumptions()


def hand_breakdown(r, gi=0.35, sp=1.0, eta=0.6, payload_max=8480.0):
    # independent re-derivation of the weight balance from the raw constants
    energy = r / 1100.0 * 65600.0 * 0.35
    h2 = energy / (120.0 / 3.6 * eta)
    tank = h2 / gi
    fc = 7562.0 / sp
    motor = 7562.0 / 12.0
    envelope = 6800.0
    red = motor + fc + tank - envelope
    return h2, tank, fc, motor, red, red / payload_max


def test_spec_envelope_consistent():
    assert SPEC.max_fuel_weight + SPEC.engine_mass == pytest.approx(SPEC.weight_envelope, rel=1e-3)
    assert SPEC.max_fuel_weight == pytest.approx(5287.6)


@pytest.mark.parametrize("bad", [{"max_range": 0}, {"engine_thermal_efficiency": 1.2}, {"payload_max": -1}])
def test_spec_rejects_bad_fields(bad):
    with pytest.raises(ValueError):
        replace(SPEC, **bad)


def test_powertrain_rejects_bad_fields():
    with pytest.raises(ValueError):
        rf.PowertrainAssumptions(fc_efficiency_avg=1.0)
    with pytest.raises(ValueError):
        rf.PowertrainAssumptions(tank_gravimetric_index=0.0)
    with pytest.raises(ValueError):
        rf.PowertrainAssumptions(motor_specific_power=0)


def test_mission_energy_values():
    assert rf.mission_energy(1100, SPEC) == pytest.approx(22960.0, rel=1e-12)
    assert rf.mission_energy(500, SPEC) == pytest.approx(10436.36, abs=0.01)
    assert rf.mission_energy(1100, SPEC) / 1100 == pytest.approx(20.87, abs=0.01)


@pytest.mark.parametrize("r", [499.99, 1100.01, 0, -5])
def test_mission_energy_rejects_outside_window(r):
    with pytest.raises(rf.RangeOutOfModelValidity):
        rf.mission_energy(r, SPEC)


def test_baseline_500_nmi_case():
    b = rf.solve_retrofit(500, SPEC, PA)
    h2, tank, fc, motor, red, frac = hand_breakdown(500)
    assert b.hydrogen_mass == pytest.approx(h2, rel=1e-9)
    assert b.hydrogen_mass == pytest.approx(522, rel=0.01)
    assert b.tank_mass_full == pytest.approx(1491, rel=0.01)
    assert b.payload_reduction_fraction == pytest.approx(0.34, abs=0.005)
    assert (b.fuel_cell_mass, b.motor_mass) == pytest.approx((fc, motor))


@pytest.mark.parametrize("r,gi,sp", [(600, 0.35, 1.0), (1000, 0.5, 2.0), (800, 0.2, 1.5), (1100, 0.9, 3.0)])
def test_breakdown_matches_hand_derivation(r, gi, sp):
    b = rf.solve_retrofit(r, SPEC, replace(PA, tank_gravimetric_index=gi, fc_specific_power=sp))
    expect = hand_breakdown(r, gi, sp)
    got = (b.hydrogen_mass, b.tank_mass_full, b.fuel_cell_mass, b.motor_mass,
           b.payload_reduction_mass, b.payload_reduction_fraction)
    assert got == pytest.approx(expect, rel=1e-9)


def test_negative_reduction_means_spare_payload():
    b = rf.solve_retrofit(500, SPEC, replace(PA, fc_specific_power=4.0, tank_gravimetric_index=0.6))
    assert b.payload_reduction_mass < 0
    assert rf.weight_balance_residual(b, SPEC) == 0


def test_degenerate_limit_tank_vanishes():
    pa = rf.PowertrainAssumptions(fc_efficiency_avg=0.999999, tank_gravimetric_index=1.0, h2_lhv=1e12)
    b = rf.solve_retrofit(800, SPEC, pa)
    assert b.tank_mass_full < 1e-6
    assert b.payload_reduction_mass == pytest.approx(b.fuel_cell_mass + b.motor_mass - SPEC.weight_envelope, abs=1e-6)


def test_zero_payload_specific_power_values():
    assert rf.required_specific_power_zero_payload(1000, 0.50, SPEC, PA) == pytest.approx(1.85, abs=0.01)
    assert rf.required_specific_power_zero_payload(1000, 0.35, SPEC, PA) == pytest.approx(2.37, abs=0.01)


def test_zero_payload_budget_boundary_raises():
    # GI so low that tank + motors exceed the envelope at 1000 nmi
    with pytest.raises(rf.InfeasibleRetrofit):
        rf.required_specific_power_zero_payload(1000, 0.15, SPEC, PA)
    # exactly on the boundary
    energy = rf.mission_energy(1000, SPEC)
    h2 = energy / (PA.h2_lhv * PA.fc_efficiency_avg)
    gi = h2 / (SPEC.weight_envelope - SPEC.engine_rated_power / PA.motor_specific_power)
    with pytest.raises(rf.InfeasibleRetrofit):
        rf.required_specific_power_zero_payload(1000, gi * (1 - 1e-12), SPEC, PA)


def test_breakeven_range_near_600():
    r = rf.zero_payload_range(SPEC, replace(PA, tank_gravimetric_index=0.5, fc_specific_power=1.5))
    assert r == pytest.approx(600, rel=0.15)
    b = rf.solve_retrofit(r, SPEC, replace(PA, tank_gravimetric_index=0.5, fc_specific_power=1.5))
    assert abs(b.payload_reduction_mass) < 1e-5


def test_zero_payload_range_edge_cases():
    # spare payload over the whole window -> the window's upper end
    assert rf.zero_payload_range(SPEC, replace(PA, fc_specific_power=10.0, tank_gravimetric_index=0.9)) == SPEC.max_range
    # payload cut already at the shortest valid range -> no breakeven
    assert rf.zero_payload_range(SPEC, PA) is None


def test_sweep_order_and_consistency():
    rows = rf.sweep_grid([500, 1000], [0.35, 0.5], [1.0, 2.0], SPEC, PA)
    keys = [(r.range_nmi, r.gi, r.sp_kw_per_kg) for r in rows]
    assert keys == sorted(keys)
    assert len(rows) == 8
    b = rf.solve_retrofit(1000, SPEC, replace(PA, tank_gravimetric_index=0.5, fc_specific_power=2.0))
    row = rows[-1]
    assert row.payload_red_kg == b.payload_reduction_mass and row.h2_kg == b.hydrogen_mass


def test_sweep_flags_infeasible_cells_instead_of_dropping():
    rows = rf.sweep_grid([1100], [0.1], [0.5], SPEC, PA)
    assert len(rows) == 1 and rows[0].feasible is False


def test_sweep_rejects_bad_axes():
    with pytest.raises(ValueError):
        rf.sweep_grid([], [0.35], [1.0], SPEC, PA)
    with pytest.raises(rf.RangeOutOfModelValidity):
        rf.sweep_grid([450], [0.35], [1.0], SPEC, PA)


def test_sweep_csv_header_and_rows():
    buf = io.StringIO()
    text = rf.sweep_to_csv(rf.sweep_grid([1000], [0.35], [1.0, 2.0], SPEC, PA), buf)
    lines = text.splitlines()
    assert lines[0] == "range_nmi,gi,sp_kw_per_kg,h2_kg,tank_kg,fc_kg,motor_kg,payload_red_kg,payload_red_frac,feasible"
    assert len(lines) == 3
    assert buf.getvalue() == text


def test_residual_zero_on_randomized_sweep():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        r = rng.uniform(500, 1100)
        pa = rf.PowertrainAssumptions(
            fc_efficiency_avg=rng.uniform(0.3, 0.95),
            fc_specific_power=rng.uniform(0.3, 8.0),
            tank_gravimetric_index=rng.uniform(0.05, 1.0),
            motor_specific_power=rng.uniform(2.0, 25.0),
        )
        b = rf.solve_retrofit(r, SPEC, pa)
        scale = SPEC.weight_envelope + abs(b.payload_reduction_mass) + b.fuel_cell_mass + b.tank_mass_full
        assert abs(rf.weight_balance_residual(b, SPEC)) <= 1e-9 * scale


ranges = st.floats(500, 1100)
gis = st.floats(0.05, 1.0)
sps = st.floats(0.2, 10.0)
etas = st.floats(0.2, 0.95)


@settings(max_examples=200, deadline=None)
@given(r1=ranges, r2=ranges, gi=gis, sp=sps, eta=etas)
def test_property_monotone_in_range(r1, r2, gi, sp, eta):
    pa = rf.PowertrainAssumptions(fc_efficiency_avg=eta, fc_specific_power=sp, tank_gravimetric_index=gi)
    lo, hi = sorted((r1, r2))
    assert rf.solve_retrofit(lo, SPEC, pa).payload_reduction_mass <= rf.solve_retrofit(hi, SPEC, pa).payload_reduction_mass + 1e-9


@settings(max_examples=200, deadline=None)
@given(r=ranges, gi1=gis, gi2=gis, sp1=sps, sp2=sps, e1=etas, e2=etas)
def test_property_monotone_in_technology(r, gi1, gi2, sp1, sp2, e1, e2):
    def red(**kw):
        base = dict(fc_efficiency_avg=0.6, fc_specific_power=1.0, tank_gravimetric_index=0.35)
        base.update(kw)
        return rf.solve_retrofit(r, SPEC, rf.PowertrainAssumptions(**base)).payload_reduction_mass

    lo, hi = sorted((sp1, sp2))
    assert red(fc_specific_power=hi) <= red(fc_specific_power=lo) + 1e-9
    lo, hi = sorted((gi1, gi2))
    assert red(tank_gravimetric_index=hi) <= red(tank_gravimetric_index=lo) + 1e-9
    lo, hi = sorted((e1, e2))
    assert red(fc_efficiency_avg=hi) <= red(fc_efficiency_avg=lo) + 1e-9


@settings(max_examples=200, deadline=None)
@given(r=ranges, gi=st.floats(0.3, 1.0))
def test_property_zero_payload_round_trip(r, gi):
    try:
        sp = rf.required_specific_power_zero_payload(r, gi, SPEC, PA)
    except rf.InfeasibleRetrofit:
        return
    b = rf.solve_retrofit(r, SPEC, replace(PA, tank_gravimetric_index=gi, fc_specific_power=sp))
    assert abs(b.payload_reduction_mass) <= 1e-9 * SPEC.weight_envelope


@settings(max_examples=100, deadline=None)
@given(r1=ranges, r2=ranges)
def test_property_hydrogen_linear_in_range(r1, r2):
    h1 = rf.solve_retrofit(r1, SPEC, PA).hydrogen_mass
    h2 = rf.solve_retrofit(r2, SPEC, PA).hydrogen_mass
    assert math.isclose(h1 * r2, h2 * r1, rel_tol=1e-12)
