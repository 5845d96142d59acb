"""Aviation and base hydrogen demand profiles.

Flights are filtered to the regional segment, their jet fuel converted to
liquid hydrogen on an energy basis, allocated to the nearest model zone and
spread evenly over the hours of each day.  Non-aviation (base) hydrogen is
split across a country's zones by electrical load and spread uniformly
within two seasons.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

HOURS = 8760
DAYS = 365
JET_FUEL_LHV_MJ_PER_KG = 44.0
H2_LHV_MJ_PER_KG = 120.0
HEAVIER_AIRCRAFT_UPLIFT = 0.10
EARTH_RADIUS_KM = 6371.0
MAX_ALLOCATION_KM = 231.0

MAX_DISTANCE_NMI = 1000.0
MAX_SEATS = 220
DEFAULT_COUNTRIES = ("FR", "DE", "IT", "ES", "GB")

SUMMER_SHARE = 0.45
# May..October, 1-based month numbers
SUMMER_MONTHS = frozenset(range(5, 11))
_MONTH_DAYS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)

CARRIERS = ("electricity", "h2_gas", "h2_liquid")

# fallback fuel-burn estimate, kg per (nmi * seat); synthetic, fixtures only
SYNTHETIC_BURN_KG_PER_NMI_SEAT = 0.035


class MissingAllocation(KeyError):
    pass


@dataclass(frozen=True)
class FlightRecord:
    origin_airport: str
    dest_airport: str
    distance: float  # nmi
    seats: int
    departures_per_day: float
    jet_fuel_burn_per_flight: float  # kg
    day: int | None = None  # 1..365; None repeats every day

    def __post_init__(self):
        if not (self.distance > 0 and self.seats > 0 and self.jet_fuel_burn_per_flight > 0):
            raise ValueError(f"invalid flight record {self}")
        if self.day is not None and not 1 <= self.day <= DAYS:
            raise ValueError(f"day {self.day} outside 1..{DAYS}")


@dataclass(frozen=True)
class Airport:
    code: str
    latitude: float
    longitude: float
    country: str

    def __post_init__(self):
        if not -90 <= self.latitude <= 90 or not -180 <= self.longitude <= 180:
            raise ValueError(f"bad coordinates for airport {self.code}")


@dataclass(frozen=True)
class Zone:
    zone_id: str
    lat: float
    lon: float
    country: str


@dataclass
class DemandProfile:
    zone_id: str
    carrier: str
    series: np.ndarray  # 8760 values; MWh or tonnes

    def __post_init__(self):
        if self.carrier not in CARRIERS:
            raise ValueError(f"unknown carrier {self.carrier!r}")
        self.series = np.asarray(self.series, dtype=float)
        if self.series.shape != (HOURS,):
            raise ValueError(f"series must have {HOURS} values")
        if (self.series < 0).any():
            raise ValueError(f"negative demand in {self.zone_id}/{self.carrier}")


@dataclass(frozen=True)
class Allocation:
    airport: str
    zone_id: str | None
    km: float
    in_scope: bool


def synthetic_fuel_burn(distance_nmi: float, seats: int) -> float:
    """Crude per-flight jet fuel (kg) for test fixtures; not a performance model."""
    return distance_nmi * seats * SYNTHETIC_BURN_KG_PER_NMI_SEAT


def filter_flights(
    records: Iterable[FlightRecord],
    airports: Mapping[str, Airport],
    countries: Sequence[str] = DEFAULT_COUNTRIES,
) -> list[FlightRecord]:
    allowed = set(countries)
    kept = []
    for r in records:
        ap = airports.get(r.origin_airport)
        if ap is None or ap.country not in allowed:
            continue
        if r.distance < MAX_DISTANCE_NMI and r.seats <= MAX_SEATS:
            kept.append(r)
    return kept


def jet_fuel_to_h2(fuel_energy_mj: float) -> float:
    """kg of hydrogen carrying the same energy, plus a 10% weight uplift."""
    if fuel_energy_mj < 0:
        raise ValueError("fuel energy must be non-negative")
    return fuel_energy_mj / H2_LHV_MJ_PER_KG * (1.0 + HEAVIER_AIRCRAFT_UPLIFT)


def jet_fuel_mass_to_h2(fuel_kg: float) -> float:
    return jet_fuel_to_h2(fuel_kg * JET_FUEL_LHV_MJ_PER_KG)


def haversine_km(lat1, lon1, lat2, lon2):
    lat1, lon1, lat2, lon2 = map(np.radians, (lat1, lon1, lat2, lon2))
    a = (
        np.sin((lat2 - lat1) / 2) ** 2
        + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    )
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def allocate_airports(
    airports: Sequence[Airport], zones: Sequence[Zone], max_km: float = MAX_ALLOCATION_KM
) -> dict[str, Allocation]:
    """Nearest-zone allocation; ties go to the lowest zone_id."""
    if not zones:
        raise ValueError("no zones to allocate to")
    order = sorted(zones, key=lambda z: z.zone_id)
    zlat = np.array([z.lat for z in order])
    zlon = np.array([z.lon for z in order])
    out = {}
    for ap in airports:
        d = haversine_km(ap.latitude, ap.longitude, zlat, zlon)
        i = int(np.argmin(d))  # first minimum == lowest zone_id
        km = float(d[i])
        if km <= max_km:
            out[ap.code] = Allocation(ap.code, order[i].zone_id, km, True)
        else:
            log.info("airport %s out of scope: nearest zone %.1f km", ap.code, km)
            out[ap.code] = Allocation(ap.code, None, km, False)
    return out


def allocation_quantiles(alloc: Mapping[str, Allocation], qs=(0.25, 0.5, 0.75, 1.0)):
    km = np.array(sorted(a.km for a in alloc.values() if a.in_scope))
    if km.size == 0:
        return {q: float("nan") for q in qs}
    return {q: float(np.quantile(km, q)) for q in qs}


def season_mask() -> np.ndarray:
    """Boolean per hour of the 365-day year, True for summer hours."""
    days = np.concatenate(
        [np.full(n, (m + 1) in SUMMER_MONTHS) for m, n in enumerate(_MONTH_DAYS)]
    )
    return np.repeat(days, 24)


def seasonal_shape(summer_share: float = SUMMER_SHARE) -> np.ndarray:
    """Hourly weights summing to 1, uniform within each season."""
    summer = season_mask()
    hs = summer.sum()
    hw = HOURS - hs
    return np.where(summer, summer_share / hs, (1.0 - summer_share) / hw)


@dataclass
class DemandBuild:
    profiles: dict[tuple[str, str], DemandProfile]
    out_of_scope_h2_t: float
    aviation_h2_t: float
    jet_fuel_mj: float


def build_profiles(
    flights: Sequence[FlightRecord],
    allocation: Mapping[str, Allocation],
    zones: Sequence[Zone],
    base_demand_by_country: Mapping[str, float],
    elec_load_by_zone: Mapping[str, np.ndarray],
    elec_target_by_country: Mapping[str, float] | None = None,
    summer_share: float = SUMMER_SHARE,
) -> DemandBuild:
    """Zonal hourly profiles for the three carriers.

    Hydrogen in tonnes per hour, electricity in MWh per hour.
    ``base_demand_by_country`` is tonnes/yr, ``elec_target_by_country`` MWh/yr
    (omitted: loads pass through unscaled).
    """
    zone_ids = [z.zone_id for z in zones]
    liquid = {z: np.zeros(HOURS) for z in zone_ids}
    dropped = 0.0
    total = 0.0
    fuel_mj = 0.0
    for f in flights:
        a = allocation.get(f.origin_airport)
        if a is None:
            raise MissingAllocation(f.origin_airport)
        daily_t = jet_fuel_mass_to_h2(f.jet_fuel_burn_per_flight * f.departures_per_day) / 1000.0
        ndays = 1 if f.day is not None else DAYS
        fuel_mj += f.jet_fuel_burn_per_flight * f.departures_per_day * ndays * JET_FUEL_LHV_MJ_PER_KG
        total += daily_t * ndays
        if not a.in_scope:
            dropped += daily_t * ndays
            continue
        if a.zone_id not in liquid:
            raise MissingAllocation(f"{f.origin_airport} -> unknown zone {a.zone_id}")
        series = liquid[a.zone_id]
        if f.day is None:
            series += daily_t / 24.0
        else:
            s = (f.day - 1) * 24
            series[s : s + 24] += daily_t / 24.0

    elec = {}
    by_country: dict[str, list[str]] = {}
    for z in zones:
        by_country.setdefault(z.country, []).append(z.zone_id)
    for country, zs in by_country.items():
        loads = {z: np.asarray(elec_load_by_zone.get(z, np.zeros(HOURS)), float) for z in zs}
        for z, s in loads.items():
            if s.shape != (HOURS,):
                raise ValueError(f"electric load for {z} must have {HOURS} values")
        cur = sum(s.sum() for s in loads.values())
        factor = 1.0
        if elec_target_by_country is not None and country in elec_target_by_country:
            if cur <= 0:
                raise ValueError(f"no electric load to scale in {country}")
            factor = elec_target_by_country[country] / cur
        for z, s in loads.items():
            elec[z] = s * factor

    shape = seasonal_shape(summer_share)
    gas = {z: np.zeros(HOURS) for z in zone_ids}
    for country, zs in by_country.items():
        annual = base_demand_by_country.get(country, 0.0)
        if annual == 0:
            continue
        w = np.array([elec[z].sum() for z in zs])
        if w.sum() <= 0:
            w = np.ones(len(zs))
        w = w / w.sum()
        for z, share in zip(zs, w):
            gas[z] = annual * share * shape

    profiles = {}
    for z in zone_ids:
        profiles[(z, "electricity")] = DemandProfile(z, "electricity", elec[z])
        profiles[(z, "h2_gas")] = DemandProfile(z, "h2_gas", gas[z])
        profiles[(z, "h2_liquid")] = DemandProfile(z, "h2_liquid", liquid[z])
    if dropped:
        log.info("%.3f t/yr of aviation H2 dropped at out-of-scope airports", dropped)
    return DemandBuild(profiles, dropped, total, fuel_mj)


# --- CSV I/O ---------------------------------------------------------------

def read_flights(path) -> list[FlightRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            fuel = row.get("jet_fuel_burn_per_flight") or ""
            dist = float(row["distance"])
            seats = int(row["seats"])
            out.append(
                FlightRecord(
                    origin_airport=row["origin_airport"],
                    dest_airport=row["dest_airport"],
                    distance=dist,
                    seats=seats,
                    departures_per_day=float(row["departures_per_day"]),
                    jet_fuel_burn_per_flight=float(fuel) if fuel else synthetic_fuel_burn(dist, seats),
                    day=int(row["day"]) if row.get("day") else None,
                )
            )
    return out


def read_airports(path) -> list[Airport]:
    with open(path, newline="") as fh:
        return [
            Airport(r["code"], float(r["latitude"]), float(r["longitude"]), r["country"])
            for r in csv.DictReader(fh)
        ]


def read_zones(path) -> list[Zone]:
    with open(path, newline="") as fh:
        return [
            Zone(r["zone_id"], float(r["lat"]), float(r["lon"]), r["country"])
            for r in csv.DictReader(fh)
        ]


def read_country_demand(path) -> dict[str, dict[str, float]]:
    """country -> {elec_2016_twh, elec_2040_twh, h2_base_mt, h2_aviation_mt}."""
    out = {}
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            out[r["country"]] = {k: float(v) for k, v in r.items() if k != "country" and v != ""}
    return out


def read_zone_series(path) -> dict[str, np.ndarray]:
    """Wide CSV, one column per zone, 8760 rows (optional leading 'hour' column)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [list(map(float, r)) for r in reader if r]
    arr = np.array(rows, dtype=float)
    out = {}
    for j, name in enumerate(header):
        if name == "hour":
            continue
        out[name] = arr[:, j]
    return out


def _num(v: float) -> str:
    return repr(float(v))


def write_zone_series(path, series: Mapping[str, np.ndarray], zone_ids: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hour", *zone_ids])
        n = len(next(iter(series.values()))) if series else 0
        cols = [np.asarray(series[z]) for z in zone_ids]
        for h in range(n):
            w.writerow([h, *(_num(c[h]) for c in cols)])


def write_demand(out_dir, build: DemandBuild, zone_ids: Sequence[str]) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for carrier in CARRIERS:
        p = out_dir / f"demand_{carrier}.csv"
        write_zone_series(p, {z: build.profiles[(z, carrier)].series for z in zone_ids}, zone_ids)
        paths.append(p)
    return paths


def write_allocation(path, alloc: Mapping[str, Allocation]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["airport", "zone", "km", "in_scope"])
        for code in sorted(alloc):
            a = alloc[code]
            w.writerow([a.airport, a.zone_id or "", f"{a.km:.3f}", "true" if a.in_scope else "false"])
