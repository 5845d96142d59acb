"""Regenerate the bundled 3-zone toy instance (src/h2plan/data/toy).

Everything is synthetic: smooth seasonal/diurnal shapes plus seeded noise.
Run from the repository root:  python3 scripts/make_toy.py
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "h2plan" / "data" / "toy"
HOURS = 8760
ZONES = [
    # zone_id, lat, lon, country, ccs candidate
    ("FRN", 48.86, 2.35, "FR", True),
    ("FRS", 45.76, 4.84, "FR", False),
    ("DEW", 50.94, 6.96, "DE", False),
]


def _write(name, header, rows):
    with open(OUT / name, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _series(name, cols):
    ids = [z[0] for z in ZONES]
    _write(name, ["hour", *ids], [[h, *(f"{cols[z][h]:.4f}" for z in ids)] for h in range(HOURS)])


def main():
    rng = np.random.default_rng(2040)
    OUT.mkdir(parents=True, exist_ok=True)
    t = np.arange(HOURS)
    day = t / 24.0
    hod = t % 24
    winter = 0.5 * (1 + np.cos(2 * np.pi * (day - 15) / 365))  # 1 mid-January, 0 mid-July

    load, wind, solar = {}, {}, {}
    for i, (z, lat, *_rest) in enumerate(ZONES):
        base = (900, 600, 750)[i]
        diurnal = 1 + 0.18 * np.sin(2 * np.pi * (hod - 7) / 24)
        load[z] = base * (0.85 + 0.3 * winter) * diurnal * (1 + 0.04 * rng.standard_normal(HOURS))
        # wind: slow weather systems, windier in winter and in the north
        weather = np.convolve(rng.standard_normal(HOURS + 72), np.ones(72) / 72, mode="valid")[:HOURS]
        w = 0.16 + 0.12 * winter + 0.9 * weather + (0.04 if lat > 48 else 0.0)
        wind[z] = np.clip(w, 0.0, 0.95)
        sun = np.clip(np.sin(np.pi * (hod - 6) / 12), 0, None) * (0.55 + 0.35 * (1 - winter))
        cloud = np.clip(1 - 0.5 * np.abs(np.repeat(rng.standard_normal(365), 24)) * 0.6, 0.2, 1)
        solar[z] = np.clip(sun * cloud * (1.1 if lat < 47 else 1.0), 0.0, 1.0)

    _series("load.csv", load)
    _series("cf_onwind.csv", wind)
    _series("cf_solar.csv", solar)

    _write(
        "zones.csv",
        ["zone_id", "lat", "lon", "country", "ccs_candidate"],
        [[z, lat, lon, c, "true" if ccs else "false"] for z, lat, lon, c, ccs in ZONES],
    )
    fr = load["FRN"].sum() + load["FRS"].sum()
    de = load["DEW"].sum()
    _write(
        "country_demand.csv",
        ["country", "elec_2016_twh", "elec_2040_twh", "h2_base_mt", "h2_aviation_mt"],
        [
            ["FR", f"{fr / 1e6:.4f}", f"{1.1 * fr / 1e6:.4f}", "0.02", ""],
            ["DE", f"{de / 1e6:.4f}", f"{1.1 * de / 1e6:.4f}", "0.012", ""],
        ],
    )
    _write(
        "airports.csv",
        ["code", "latitude", "longitude", "country"],
        [
            ["CDG", 49.0097, 2.5479, "FR"],
            ["ORY", 48.7262, 2.3652, "FR"],
            ["LYS", 45.7256, 5.0811, "FR"],
            ["CGN", 50.8659, 7.1427, "DE"],
            ["DUS", 51.2895, 6.7668, "DE"],
            ["BIQ", 43.4684, -1.5311, "FR"],  # farther than the cutoff from every zone
        ],
    )
    _write(
        "flights.csv",
        ["origin_airport", "dest_airport", "distance", "seats", "departures_per_day", "jet_fuel_burn_per_flight"],
        [
            ["CDG", "LYS", 210, 180, 6, 2100],
            ["CDG", "CGN", 215, 150, 4, 1900],
            ["ORY", "BIQ", 370, 180, 3, 3000],
            ["LYS", "DUS", 390, 120, 2, 2400],
            ["CGN", "ORY", 215, 70, 5, 900],
            ["DUS", "CDG", 220, 190, 4, 2000],
            ["BIQ", "ORY", 370, 180, 3, 3000],
            ["CDG", "JFK", 3150, 300, 2, 60000],  # long haul, filtered out
            ["LYS", "CDG", 210, 240, 3, 2600],  # too many seats, filtered out
        ],
    )
    _write(
        "edges.csv",
        ["kind", "from_zone", "to_zone", "length", "existing_capacity", "max_expansion", "cost_per_unit", "loss_or_fuel_use"],
        [
            ["hvac", "FRN", "FRS", 392, 1500, 10000, "", ""],
            ["hvac", "FRN", "DEW", 403, 800, 10000, "", ""],
            ["hvdc", "FRS", "DEW", 590, 0, 5000, "", ""],
            ["pipeline", "FRN", "FRS", 392, 0, 50, "", ""],
            ["pipeline", "FRN", "DEW", 403, 0, 50, "", ""],
            ["truck_route", "FRN", "FRS", 392, 0, "", "", ""],
            ["truck_route", "FRN", "DEW", 403, 0, "", "", ""],
        ],
    )
    _write(
        "existing_capacity.csv",
        ["zone", "technology", "capacity", "energy"],
        [
            ["FRN", "nuclear", 600, ""],
            ["FRN", "ccgt", 300, ""],
            ["FRS", "nuclear", 400, ""],
            ["FRS", "hydro", 150, ""],
            ["FRS", "phs", 100, 800],
            ["DEW", "coal", 400, ""],
            ["DEW", "onwind", 300, ""],
            ["DEW", "ccgt", 200, ""],
        ],
    )


if __name__ == "__main__":
    main()
