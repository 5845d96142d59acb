"""Technology and fuel catalog.

Rows keep the units of the published cost tables (EUR/kW, EUR/kW_H2,
EUR/t, M-EUR/unit, ...); ``unit_cost`` converts them into the model's
units (MW, t/h, t).  Writing a loaded catalog reproduces the file byte for
byte, so the tables round-trip without loss.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Mapping

H2_MWH_PER_T = 33.333  # LHV
H2_HHV_MWH_PER_T = 39.41
MMBTU_PER_MWH = 3.412

SECTORS = (
    "power",
    "power_storage",
    "h2_production",
    "h2_gas_to_power",
    "h2_storage",
    "liquefier",
    "h2_pipeline",
    "h2_truck",
)
STORES = ("electricity", "h2_gas", "h2_liquid")


class CatalogError(ValueError):
    pass


def fmt(v) -> str:
    """Compact, exact-enough number text used for every catalog file."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        v = float(v)
        if v == 0:
            return "0"
        return f"{v:.12g}"
    return str(v)


def _opt_float(s: str):
    return None if s.strip() == "" else float(s)


def _bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no", ""):
        return False
    raise CatalogError(f"not a boolean: {s!r}")


@dataclass(frozen=True)
class TechnologySpec:
    name: str
    sector: str
    lifetime: float  # yr, used for annualisation
    capex: float | None = None  # in capex_unit
    capex_unit: str = ""
    fom: float | None = None  # in fom_unit
    fom_unit: str = ""
    vom: float | None = None  # EUR/MWh (power) or EUR/t
    heat_rate: float | None = None  # MMBTU/MWh
    efficiency: float | None = None  # fraction
    efficiency_basis: str = ""  # LHV, HHV, RTE, kWh/kg
    fuel: str = ""
    co2_intensity: float | None = None  # t/MMBTU; blank -> taken from the fuel
    capture_rate: float = 0.0
    electricity_use: float | None = None  # kWh/kg of H2 handled
    expandable: bool = False
    zone_whitelist: tuple[str, ...] = ()
    secondary_lifetime: float | None = None  # stack / terminal / compressor
    capex_energy: float | None = None  # EUR/kWh (battery)
    compressor_capex: float | None = None  # M-EUR per t/h
    booster_capex: float | None = None  # EUR per t/h
    opex_per_km: float | None = None  # EUR/km
    fuel_use_kg_per_km: float | None = None
    boil_off: float | None = None  # liquefier: fraction of output; tanks: per hour
    unit_capacity: float | None = None  # pipeline t/h per pipe; truck payload t
    speed_kmh: float | None = None
    turnaround_h: float | None = None
    duration_h: float | None = None  # max energy/power for power storage
    stores: str = ""  # storage carrier
    profile: str = ""  # capacity-factor series name, VRE only
    note: str = ""

    def __post_init__(self):
        if self.sector not in SECTORS:
            raise CatalogError(f"{self.name}: unknown sector {self.sector!r}")
        if not self.lifetime > 0:
            raise CatalogError(f"{self.name}: lifetime must be > 0")
        if not 0.0 <= self.capture_rate <= 1.0:
            raise CatalogError(f"{self.name}: capture_rate must be in [0, 1]")
        if self.stores and self.stores not in STORES:
            raise CatalogError(f"{self.name}: stores must be one of {STORES}")
        if self.sector in ("power_storage", "h2_storage") and not self.stores:
            raise CatalogError(f"{self.name}: storage technology needs 'stores'")
        if self.efficiency is not None and not 0 < self.efficiency <= 1:
            raise CatalogError(f"{self.name}: efficiency must be in (0, 1]")

    @property
    def uses_ccs(self) -> bool:
        return self.capture_rate > 0


@dataclass(frozen=True)
class Fuel:
    name: str
    price: float  # EUR/MMBTU
    co2_intensity: float  # t/MMBTU


TECH_COLUMNS = tuple(f.name for f in fields(TechnologySpec))
FUEL_COLUMNS = ("name", "price", "co2_intensity")

_FLOATS = {
    "lifetime", "capex", "fom", "vom", "heat_rate", "efficiency", "co2_intensity",
    "electricity_use", "secondary_lifetime", "capex_energy", "compressor_capex",
    "booster_capex", "opex_per_km", "fuel_use_kg_per_km", "boil_off", "unit_capacity",
    "speed_kmh", "turnaround_h", "duration_h",
}


def _tech_from_row(row: Mapping[str, str]) -> TechnologySpec:
    kw = {}
    for col in TECH_COLUMNS:
        raw = row.get(col, "")
        if col in _FLOATS:
            kw[col] = _opt_float(raw)
        elif col == "capture_rate":
            kw[col] = float(raw) if raw.strip() else 0.0
        elif col == "expandable":
            kw[col] = _bool(raw)
        elif col == "zone_whitelist":
            kw[col] = tuple(z for z in raw.split(";") if z)
        else:
            kw[col] = raw
    if kw["lifetime"] is None:
        raise CatalogError(f"{kw['name']}: lifetime missing")
    return TechnologySpec(**kw)


def _tech_to_row(t: TechnologySpec) -> list[str]:
    out = []
    for col in TECH_COLUMNS:
        v = getattr(t, col)
        if col == "zone_whitelist":
            out.append(";".join(v))
        elif col == "capture_rate":
            out.append(fmt(v))
        else:
            out.append(fmt(v))
    return out


def read_technologies(path) -> dict[str, TechnologySpec]:
    with open(path, newline="") as fh:
        return _parse_technologies(fh)


def _parse_technologies(fh) -> dict[str, TechnologySpec]:
    techs: dict[str, TechnologySpec] = {}
    for row in csv.DictReader(fh):
        t = _tech_from_row(row)
        if t.name in techs:
            raise CatalogError(f"duplicate technology {t.name}")
        techs[t.name] = t
    return techs


def technologies_csv(techs: Mapping[str, TechnologySpec]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TECH_COLUMNS)
    for t in techs.values():
        w.writerow(_tech_to_row(t))
    return buf.getvalue()


def write_technologies(path, techs: Mapping[str, TechnologySpec]) -> None:
    Path(path).write_text(technologies_csv(techs))


def read_fuels(path) -> dict[str, Fuel]:
    with open(path, newline="") as fh:
        return _parse_fuels(fh)


def _parse_fuels(fh) -> dict[str, Fuel]:
    return {
        r["name"]: Fuel(r["name"], float(r["price"]), float(r["co2_intensity"]))
        for r in csv.DictReader(fh)
    }


def fuels_csv(fuels: Mapping[str, Fuel]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FUEL_COLUMNS)
    for f in fuels.values():
        w.writerow([f.name, fmt(f.price), fmt(f.co2_intensity)])
    return buf.getvalue()


def _bundled(name: str) -> str:
    return resources.files("h2plan.data.catalog").joinpath(name).read_text()


def default_technologies() -> dict[str, TechnologySpec]:
    return _parse_technologies(io.StringIO(_bundled("technologies.csv")))


def default_fuels() -> dict[str, Fuel]:
    return _parse_fuels(io.StringIO(_bundled("fuels.csv")))


def bundled_catalog_text(name: str) -> str:
    return _bundled(name)


# --- unit handling ---------------------------------------------------------

def annualize(capex: float, lifetime: float, rate: float) -> float:
    """Capital recovery: capex * r / (1 - (1 + r)^-L); rate 0 gives capex / L."""
    if lifetime < 1:
        raise ValueError("lifetime must be >= 1 year")
    if rate < 0:
        raise ValueError("discount rate must be >= 0")
    if rate == 0:
        return capex / lifetime
    return capex * rate / (1.0 - (1.0 + rate) ** -lifetime)


# factor from a catalog unit to the model's per-unit basis
_TO_MODEL = {
    "EUR/kW": 1e3,  # -> EUR/MW
    "EUR/MW": 1.0,
    "EUR/kW_H2": 1e3 * H2_MWH_PER_T,  # -> EUR per t/h of H2 output
    "EUR/t": 1.0,
    "EUR/km": 1.0,
    "MEUR/unit": 1e6,
    "EUR/MW-yr": 1.0,
    "EUR/kW_H2-yr": 1e3 * H2_MWH_PER_T,
    "EUR/t-yr": 1.0,
    "": 1.0,
}


def to_model_units(value: float | None, unit: str) -> float:
    if value is None:
        return 0.0
    try:
        return value * _TO_MODEL[unit]
    except KeyError:
        raise CatalogError(f"unknown unit {unit!r}") from None


def fuel_co2(tech: TechnologySpec, fuels: Mapping[str, Fuel]) -> float:
    """Gross t CO2 per MMBTU of the technology's fuel (before capture)."""
    if tech.co2_intensity is not None:
        return tech.co2_intensity
    if not tech.fuel:
        return 0.0
    return fuels[tech.fuel].co2_intensity


def fuel_mmbtu_per_unit(tech: TechnologySpec) -> float:
    """Fuel burned per MWh (power) or per tonne of H2 (production)."""
    if not tech.fuel:
        return 0.0
    if tech.sector == "power" and tech.heat_rate is not None:
        return tech.heat_rate
    if tech.sector == "h2_production" and tech.efficiency is not None:
        return H2_MWH_PER_T / tech.efficiency * MMBTU_PER_MWH
    return 0.0


def electricity_mwh_per_t(tech: TechnologySpec) -> float:
    """Electricity drawn per tonne of H2 produced or handled."""
    if tech.sector == "h2_production" and tech.efficiency_basis == "LHV" and not tech.fuel:
        return H2_MWH_PER_T / tech.efficiency
    if tech.electricity_use is not None:
        return tech.electricity_use  # kWh/kg == MWh/t
    return 0.0


def h2_t_per_mwh_e(tech: TechnologySpec) -> float:
    """H2 burned per MWh of electricity for gas-to-power plants."""
    basis = H2_HHV_MWH_PER_T if tech.efficiency_basis == "HHV" else H2_MWH_PER_T
    return 1.0 / (tech.efficiency * basis)


def is_finite(x) -> bool:
    return x is not None and math.isfinite(x)
