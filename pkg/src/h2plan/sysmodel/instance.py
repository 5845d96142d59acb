"""System instance: zones, network, technologies and reduced time series."""
from __future__ import annotations

import configparser
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .. import demand as dm
from .. import tdr
from .catalog import (
    Fuel,
    TechnologySpec,
    default_fuels,
    default_technologies,
    read_fuels,
    read_technologies,
)
from .scenarios import ScenarioConfig

log = logging.getLogger(__name__)

EDGE_KINDS = ("hvac", "hvdc", "pipeline", "truck_route")
LINE_KINDS = ("hvac", "hvdc")
MAX_TRUCK_ROUTE_KM = 500.0
MAX_LINE_EXPANSION_MW = 10_000.0
DEFAULT_LINE_COST = {"hvac": 47.5, "hvdc": 14.3}  # EUR/MW-km-yr, annualised
DEFAULT_LINE_LOSS_PCT_PER_100KM = 0.625
HOURS_PER_PERIOD = 24


class ValidationError(ValueError):
    """Structural defects in an instance; ``problems`` lists every one."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class ModelZone:
    zone_id: str
    lat: float
    lon: float
    country: str
    ccs_candidate: bool = False


@dataclass(frozen=True)
class NetworkEdge:
    kind: str
    from_zone: str
    to_zone: str
    length: float  # km
    existing_capacity: float = 0.0  # MW or t/h
    max_expansion: float = math.inf  # MW or number of pipes
    cost_per_unit: float | None = None  # lines: EUR/MW-km-yr; pipelines: EUR/km
    loss_or_fuel_use: float | None = None  # lines/pipes: %/100 km; trucks: kg H2/km

    @property
    def name(self) -> str:
        return f"{self.kind}:{self.from_zone}-{self.to_zone}"

    def problems(self) -> list[str]:
        out = []
        if self.kind not in EDGE_KINDS:
            out.append(f"edge {self.name}: unknown kind")
        if not self.length > 0:
            out.append(f"edge {self.name}: length must be > 0")
        if self.from_zone == self.to_zone:
            out.append(f"edge {self.name}: from and to zone are the same")
        if self.kind == "truck_route" and self.length > MAX_TRUCK_ROUTE_KM:
            out.append(f"edge {self.name}: truck routes are limited to {MAX_TRUCK_ROUTE_KM:g} km")
        if self.kind in LINE_KINDS and self.max_expansion > MAX_LINE_EXPANSION_MW:
            out.append(f"edge {self.name}: line expansion above {MAX_LINE_EXPANSION_MW:g} MW")
        if self.existing_capacity < 0 or self.max_expansion < 0:
            out.append(f"edge {self.name}: negative capacity")
        return out

    def loss_fraction(self) -> float:
        if self.kind == "truck_route":
            return 0.0
        pct = self.loss_or_fuel_use
        if pct is None:
            pct = DEFAULT_LINE_LOSS_PCT_PER_100KM if self.kind in LINE_KINDS else 0.0
        return pct / 100.0 * self.length / 100.0


@dataclass(frozen=True)
class SystemInstance:
    zones: tuple[ModelZone, ...]
    edges: tuple[NetworkEdge, ...]
    technologies: Mapping[str, TechnologySpec]
    fuels: Mapping[str, Fuel]
    existing: Mapping[tuple[str, str], float]  # (zone, tech) -> MW or t/h
    existing_energy: Mapping[tuple[str, str], float]  # storage: MWh or t
    weights: tuple[int, ...]  # days represented by each period
    series: Mapping[str, np.ndarray]  # name -> (P, 24)
    discount_rate: float = 0.04
    emissions_cap: float = math.inf  # t CO2/yr
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    jet_fuel_mj: float = 0.0
    aviation_h2_t: float = 0.0
    name: str = "instance"

    @property
    def zone_ids(self) -> tuple[str, ...]:
        return tuple(z.zone_id for z in self.zones)

    @property
    def n_periods(self) -> int:
        return len(self.weights)

    def get(self, name: str) -> np.ndarray | None:
        return self.series.get(name)

    def demand(self, carrier: str, zone: str) -> np.ndarray:
        s = self.series.get(f"{carrier}:{zone}")
        if s is None:
            return np.zeros((self.n_periods, HOURS_PER_PERIOD))
        return s

    def ccs_zones(self, scenario: ScenarioConfig) -> set[str]:
        if scenario.ccs_zone_whitelist is None:
            return {z.zone_id for z in self.zones if z.ccs_candidate}
        return set(scenario.ccs_zone_whitelist)

    def effective_cap(self, scenario: ScenarioConfig) -> float:
        return self.emissions_cap if scenario.emissions_cap is None else scenario.emissions_cap

    def problems(self) -> list[str]:
        out = []
        ids = self.zone_ids
        if len(set(ids)) != len(ids):
            out.append("duplicate zone ids")
        for z in ids:
            if not z or any(ch.isspace() or ch in ",[]" for ch in z):
                out.append(f"zone id {z!r} must be non-empty without spaces, commas or brackets")
        for t in self.technologies:
            if any(ch.isspace() or ch in ",[]" for ch in t):
                out.append(f"technology name {t!r} contains spaces, commas or brackets")
        known = set(ids)
        for e in self.edges:
            out.extend(e.problems())
            for z in (e.from_zone, e.to_zone):
                if z not in known:
                    out.append(f"edge {e.name}: unknown zone {z}")
        for (z, t), v in list(self.existing.items()) + list(self.existing_energy.items()):
            if z not in known:
                out.append(f"existing capacity for unknown zone {z}")
            if t not in self.technologies:
                out.append(f"existing capacity for unknown technology {t}")
            if not (v >= 0 and math.isfinite(v)):
                out.append(f"existing capacity {z}/{t} must be finite and >= 0")
        for t in self.technologies.values():
            if t.fuel and t.fuel not in self.fuels:
                out.append(f"technology {t.name}: unknown fuel {t.fuel}")
            for z in t.zone_whitelist:
                if z not in known:
                    out.append(f"technology {t.name}: whitelist names unknown zone {z}")
        if any(w <= 0 for w in self.weights):
            out.append("every period weight must be > 0")
        if self.weights and sum(self.weights) != 365:
            out.append(f"period weights sum to {sum(self.weights)}, expected 365")
        shape = (self.n_periods, HOURS_PER_PERIOD)
        for name, s in self.series.items():
            if np.shape(s) != shape:
                out.append(f"series {name} has shape {np.shape(s)}, expected {shape}")
            elif not np.all(np.isfinite(s)):
                out.append(f"series {name} has non-finite values")
            kind, _, rest = name.partition(":")
            zone = rest.rsplit(":", 1)[-1]
            if zone not in known:
                out.append(f"series {name} refers to unknown zone {zone}")
            if kind in ("load", "h2_gas", "h2_liquid") and np.any(np.asarray(s) < 0):
                out.append(f"series {name} has negative demand")
            if kind == "cf" and (np.any(np.asarray(s) < 0) or np.any(np.asarray(s) > 1)):
                out.append(f"series {name} capacity factors outside [0, 1]")
        if not 0 <= self.discount_rate < 1:
            out.append("discount_rate must be in [0, 1)")
        if not self.emissions_cap >= 0:
            out.append("emissions_cap must be >= 0")
        return out

    def validate(self) -> None:
        p = self.problems()
        if p:
            raise ValidationError(p)


# --- loading ---------------------------------------------------------------

def _opt(v: str | None, default=None):
    if v is None or v.strip() == "":
        return default
    return float(v)


def read_model_zones(path) -> tuple[ModelZone, ...]:
    with open(path, newline="") as fh:
        return tuple(
            ModelZone(
                r["zone_id"], float(r["lat"]), float(r["lon"]), r["country"],
                r.get("ccs_candidate", "").strip().lower() in ("1", "true", "yes"),
            )
            for r in csv.DictReader(fh)
        )


def read_edges(path) -> tuple[NetworkEdge, ...]:
    with open(path, newline="") as fh:
        return tuple(
            NetworkEdge(
                kind=r["kind"],
                from_zone=r["from_zone"],
                to_zone=r["to_zone"],
                length=float(r["length"]),
                existing_capacity=_opt(r.get("existing_capacity"), 0.0),
                max_expansion=_opt(r.get("max_expansion"), math.inf),
                cost_per_unit=_opt(r.get("cost_per_unit")),
                loss_or_fuel_use=_opt(r.get("loss_or_fuel_use")),
            )
            for r in csv.DictReader(fh)
        )


def read_existing(path):
    power, energy = {}, {}
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            key = (r["zone"], r["technology"])
            if _opt(r.get("capacity")):
                power[key] = float(r["capacity"])
            if _opt(r.get("energy")):
                energy[key] = float(r["energy"])
    return power, energy


@dataclass
class Settings:
    discount_rate: float = 0.04
    emissions_cap: float = math.inf
    representative_days: int = tdr.DEFAULT_K
    countries: tuple[str, ...] = dm.DEFAULT_COUNTRIES
    name: str = "instance"


def read_settings(path) -> Settings:
    s = Settings()
    if not Path(path).exists():
        return s
    cp = configparser.ConfigParser(interpolation=None)
    cp.read(path)
    sec = cp["instance"] if cp.has_section("instance") else cp["DEFAULT"]
    cap = sec.get("emissions_cap", "inf").strip().lower()
    s.discount_rate = sec.getfloat("discount_rate", s.discount_rate)
    s.emissions_cap = math.inf if cap in ("inf", "none", "") else float(cap)
    s.representative_days = sec.getint("representative_days", s.representative_days)
    s.countries = tuple(c for c in sec.get("countries", ";".join(s.countries)).split(";") if c)
    s.name = sec.get("name", s.name)
    return s


@dataclass
class InputBundle:
    """Hourly inputs before time-domain reduction."""

    zones: tuple[ModelZone, ...]
    hourly: dict[str, np.ndarray]  # name -> 8760
    demand: dm.DemandBuild
    allocation: dict[str, dm.Allocation]
    settings: Settings


def load_inputs(data_dir) -> InputBundle:
    d = Path(data_dir)
    settings = read_settings(d / "settings.ini")
    zones = read_model_zones(d / "zones.csv")
    dzones = [dm.Zone(z.zone_id, z.lat, z.lon, z.country) for z in zones]
    airports = dm.read_airports(d / "airports.csv")
    flights = dm.read_flights(d / "flights.csv")
    by_code = {a.code: a for a in airports}
    kept = dm.filter_flights(flights, by_code, settings.countries)
    alloc = dm.allocate_airports(airports, dzones)
    country = dm.read_country_demand(d / "country_demand.csv")
    base = {c: v.get("h2_base_mt", 0.0) * 1e6 for c, v in country.items()}
    targets = {c: v["elec_2040_twh"] * 1e6 for c, v in country.items() if "elec_2040_twh" in v}
    load = dm.read_zone_series(d / "load.csv")
    build = dm.build_profiles(kept, alloc, dzones, base, load, targets or None)
    hourly: dict[str, np.ndarray] = {}
    for z in zones:
        hourly[f"load:{z.zone_id}"] = build.profiles[(z.zone_id, "electricity")].series
        hourly[f"h2_gas:{z.zone_id}"] = build.profiles[(z.zone_id, "h2_gas")].series
        hourly[f"h2_liquid:{z.zone_id}"] = build.profiles[(z.zone_id, "h2_liquid")].series
    for p in sorted(d.glob("cf_*.csv")):
        profile = p.stem[3:]
        for zone, s in dm.read_zone_series(p).items():
            hourly[f"cf:{profile}:{zone}"] = s
    return InputBundle(zones, hourly, build, alloc, settings)


def load_instance(data_dir, k: int | None = None, seed: int = 0, scenario: ScenarioConfig | None = None):
    """Read a data directory, build demand, reduce to representative days.

    Returns (instance, inputs, reduction).
    """
    d = Path(data_dir)
    inputs = load_inputs(d)
    s = inputs.settings
    red = tdr.reduce(inputs.hourly, k=k or s.representative_days, seed=seed)
    series = {name: red.series(name) for name in sorted(inputs.hourly)}
    for name in series:
        if name.startswith("cf:"):
            # the energy-preserving rescale can push a medoid hour above 1
            series[name] = np.minimum(series[name], 1.0)
    techs = read_technologies(d / "technologies.csv") if (d / "technologies.csv").exists() else default_technologies()
    fuels = read_fuels(d / "fuels.csv") if (d / "fuels.csv").exists() else default_fuels()
    power, energy = read_existing(d / "existing_capacity.csv")
    edges = read_edges(d / "edges.csv") if (d / "edges.csv").exists() else ()
    inst = SystemInstance(
        zones=inputs.zones,
        edges=edges,
        technologies=techs,
        fuels=fuels,
        existing=power,
        existing_energy=energy,
        weights=tuple(int(w) for w in red.weights),
        series=series,
        discount_rate=s.discount_rate,
        emissions_cap=s.emissions_cap,
        scenario=scenario or ScenarioConfig(),
        jet_fuel_mj=inputs.demand.jet_fuel_mj,
        aviation_h2_t=inputs.demand.aviation_h2_t - inputs.demand.out_of_scope_h2_t,
        name=s.name,
    )
    inst.validate()
    return inst, inputs, red
