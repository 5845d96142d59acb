"""Weight-constrained hydrogen fuel-cell retrofit of a regional turboprop.

The retrofit keeps take-off weight fixed: the mass previously taken by the
usable jet fuel and the engines (the *weight envelope*) has to hold the
electric motors, the fuel-cell system, the full hydrogen tank and whatever
payload has to be given up.

    fuel + engines = motors + fuel cell + full tank + payload reduction

Energy demand is taken to be linear in range between 500 nmi and the
aircraft's maximum range.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, replace
from itertools import product
from typing import Iterable, Sequence

MIN_VALID_RANGE_NMI = 500.0
H2_LHV_KWH_PER_KG = 120.0 / 3.6  # 120 MJ/kg

SWEEP_COLUMNS = (
    "range_nmi",
    "gi",
    "sp_kw_per_kg",
    "h2_kg",
    "tank_kg",
    "fc_kg",
    "motor_kg",
    "payload_red_kg",
    "payload_red_frac",
    "feasible",
)


class RangeOutOfModelValidity(ValueError):
    pass


class InfeasibleRetrofit(ValueError):
    pass


@dataclass(frozen=True)
class AircraftSpec:
    max_range: float  # nmi, full mission incl. reserves
    full_tank_energy: float  # kWh of jet fuel at max fuel
    engine_thermal_efficiency: float
    engine_rated_power: float  # kW, all engines
    engine_specific_power: float  # kW/kg
    max_fuel_weight: float  # kg
    weight_envelope: float  # kg, max fuel + engines
    payload_max: float = 8480.0  # kg

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.engine_thermal_efficiency > 1:
            raise ValueError("engine_thermal_efficiency must be in (0, 1]")
        implied = self.max_fuel_weight + self.engine_mass
        if abs(implied - self.weight_envelope) > 1e-3 * self.weight_envelope:
            raise ValueError(
                f"weight_envelope {self.weight_envelope} kg inconsistent with "
                f"fuel + engines = {implied:.1f} kg"
            )

    @property
    def engine_mass(self) -> float:
        return self.engine_rated_power / self.engine_specific_power


@dataclass(frozen=True)
class PowertrainAssumptions:
    fc_efficiency_avg: float = 0.60
    fc_specific_power: float = 1.0  # kW/kg, system level at max power
    tank_gravimetric_index: float = 0.35
    motor_specific_power: float = 12.0  # kW/kg
    h2_lhv: float = H2_LHV_KWH_PER_KG  # kWh/kg

    def __post_init__(self):
        if not 0 < self.fc_efficiency_avg < 1:
            raise ValueError("fc_efficiency_avg must be in (0, 1)")
        if not 0 < self.tank_gravimetric_index <= 1:
            raise ValueError("tank_gravimetric_index must be in (0, 1]")
        for name in ("fc_specific_power", "motor_specific_power", "h2_lhv"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class RetrofitBreakdown:
    range: float
    energy_required: float
    hydrogen_mass: float
    tank_mass_full: float
    fuel_cell_mass: float
    motor_mass: float
    payload_reduction_mass: float
    payload_reduction_fraction: float


def dash8_400(payload_max: float = 8480.0) -> AircraftSpec:
    """De Havilland Dash 8-400 with a 6,800 kg fuel + engine envelope."""
    rated_power = 7562.0
    engine_sp = 5.0
    envelope = 6800.0
    return AircraftSpec(
        max_range=1100.0,
        full_tank_energy=65600.0,
        engine_thermal_efficiency=0.35,
        engine_rated_power=rated_power,
        engine_specific_power=engine_sp,
        max_fuel_weight=envelope - rated_power / engine_sp,
        weight_envelope=envelope,
        payload_max=payload_max,
    )


def _check_range(range_nmi: float, spec: AircraftSpec) -> None:
    if not MIN_VALID_RANGE_NMI <= range_nmi <= spec.max_range:
        raise RangeOutOfModelValidity(
            f"range {range_nmi} nmi outside the linear-energy window "
            f"[{MIN_VALID_RANGE_NMI:g}, {spec.max_range:g}] nmi"
        )


def mission_energy(range_nmi: float, spec: AircraftSpec) -> float:
    """Propulsive energy (kWh) needed for a mission of ``range_nmi``."""
    _check_range(range_nmi, spec)
    return range_nmi / spec.max_range * spec.full_tank_energy * spec.engine_thermal_efficiency


def _tank_and_motor(range_nmi, spec, pa):
    energy = mission_energy(range_nmi, spec)
    h2 = energy / (pa.h2_lhv * pa.fc_efficiency_avg)
    tank = h2 / pa.tank_gravimetric_index
    motor = spec.engine_rated_power / pa.motor_specific_power
    return energy, h2, tank, motor


def solve_retrofit(
    range_nmi: float, spec: AircraftSpec, pa: PowertrainAssumptions
) -> RetrofitBreakdown:
    energy, h2, tank, motor = _tank_and_motor(range_nmi, spec, pa)
    fc = spec.engine_rated_power / pa.fc_specific_power
    # closes the weight balance exactly; negative means spare payload capacity
    payload_red = (motor + fc + tank) - (spec.max_fuel_weight + spec.engine_mass)
    return RetrofitBreakdown(
        range=range_nmi,
        energy_required=energy,
        hydrogen_mass=h2,
        tank_mass_full=tank,
        fuel_cell_mass=fc,
        motor_mass=motor,
        payload_reduction_mass=payload_red,
        payload_reduction_fraction=payload_red / spec.payload_max,
    )


def weight_balance_residual(b: RetrofitBreakdown, spec: AircraftSpec) -> float:
    """Envelope minus the new system plus the payload given up; zero when closed.

    A positive reduction is payload removed to make room, so it offsets the
    powertrain mass rather than adding to it.
    """
    return (spec.max_fuel_weight + spec.engine_mass) - (
        b.motor_mass + b.fuel_cell_mass + b.tank_mass_full - b.payload_reduction_mass
    )


def required_specific_power_zero_payload(
    range_nmi: float, gi: float, spec: AircraftSpec, pa: PowertrainAssumptions
) -> float:
    """Fuel-cell system specific power (kW/kg) that leaves payload untouched."""
    pa = replace(pa, tank_gravimetric_index=gi)
    _, _, tank, motor = _tank_and_motor(range_nmi, spec, pa)
    budget = spec.max_fuel_weight + spec.engine_mass - tank - motor
    if budget <= 0:
        raise InfeasibleRetrofit(
            f"tank ({tank:.0f} kg) and motors ({motor:.0f} kg) exceed the "
            f"{spec.weight_envelope:.0f} kg envelope at {range_nmi} nmi"
        )
    return spec.engine_rated_power / budget


def zero_payload_range(
    spec: AircraftSpec, pa: PowertrainAssumptions, tol: float = 1e-9
) -> float | None:
    """Longest range with no payload reduction, by bisection.

    Returns None when even the shortest valid range needs a payload cut;
    returns ``spec.max_range`` when the full window is free of one.
    """
    lo, hi = MIN_VALID_RANGE_NMI, spec.max_range

    def red(r):
        return solve_retrofit(r, spec, pa).payload_reduction_mass

    if red(lo) > 0:
        return None
    if red(hi) <= 0:
        return hi
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if red(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SweepRow:
    range_nmi: float
    gi: float
    sp_kw_per_kg: float
    h2_kg: float
    tank_kg: float
    fc_kg: float
    motor_kg: float
    payload_red_kg: float
    payload_red_frac: float
    feasible: bool


def sweep_grid(
    ranges: Sequence[float],
    gis: Sequence[float],
    sps: Sequence[float],
    spec: AircraftSpec,
    pa: PowertrainAssumptions,
) -> list[SweepRow]:
    """Evaluate every (range, GI, SP) cell, range-major.

    A cell is infeasible when the required payload cut exceeds the whole
    payload; such cells are kept and flagged.
    """
    if not (ranges and gis and sps):
        raise ValueError("sweep axes must be non-empty")
    for r in ranges:
        _check_range(r, spec)
    rows = []
    for r, gi, sp in product(ranges, gis, sps):
        cell = replace(pa, tank_gravimetric_index=gi, fc_specific_power=sp)
        b = solve_retrofit(r, spec, cell)
        rows.append(
            SweepRow(
                range_nmi=r,
                gi=gi,
                sp_kw_per_kg=sp,
                h2_kg=b.hydrogen_mass,
                tank_kg=b.tank_mass_full,
                fc_kg=b.fuel_cell_mass,
                motor_kg=b.motor_mass,
                payload_red_kg=b.payload_reduction_mass,
                payload_red_frac=b.payload_reduction_fraction,
                feasible=b.payload_reduction_mass <= spec.payload_max,
            )
        )
    return rows


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) and math.isfinite(v):
        return f"{v:.6f}".rstrip("0").rstrip(".") if v != int(v) else f"{v:.1f}"
    return str(v)


def sweep_to_csv(rows: Iterable[SweepRow], fh: io.TextIOBase | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([_fmt(getattr(row, c)) for c in SWEEP_COLUMNS])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
