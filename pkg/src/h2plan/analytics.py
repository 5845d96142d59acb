"""Reports derived from a solved system model.

Costs come straight from the objective terms recorded while building the
LP, so the categories always add up to the objective.  Electricity used by
the hydrogen chain is priced at the dual of the power balance in the hour
it is consumed; that transfer is reported beside the objective categories,
not inside them.
"""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .solver.lp import SolveResult
from .sysmodel.catalog import MMBTU_PER_MWH
from .sysmodel.instance import SystemInstance
from .sysmodel.model import CATEGORIES, Model

MJ_PER_MMBTU = 1055.056
JET_FUEL_CO2_T_PER_MMBTU = 0.0703  # kerosene-type jet fuel
LAST_MILE_EUR_PER_KG = (0.13, 0.27)  # display only, never optimised

GASEOUS_PARTS = (
    "h2_production_fixed",
    "h2_storage_fixed",
    "h2_pipeline_fixed",
    "h2_variable_electricity",
    "h2_fuel",
)
LIQUID_PARTS = (
    "liquefaction_fixed",
    "liquefaction_variable_electricity",
)
# liquid storage and trucking are reported in costs.csv but are not part of
# the liquid adder, which covers liquefaction only


class DivisionDomain(ZeroDivisionError):
    """A levelized cost was requested with nothing to divide by."""


@dataclass
class CostReport:
    """Annual costs in EUR/yr by category, plus dual-priced electricity."""

    categories: dict[str, float]  # objective categories, sum == objective
    electricity: dict[str, float]  # h2_variable_electricity, liquefaction_variable_electricity
    total_h2_generated: float  # t/yr
    total_h2_liquefied: float  # t/yr
    objective: float

    @property
    def total(self) -> float:
        return math.fsum(self.categories.values())

    def get(self, name: str) -> float:
        if name in self.categories:
            return self.categories[name]
        return self.electricity.get(name, 0.0)


@dataclass
class LCOH:
    gaseous: float  # EUR/kg
    liquid: float | None  # EUR/kg, None when nothing is liquefied
    gaseous_numerator: float  # EUR/yr
    liquid_numerator: float  # EUR/yr (adder only)


@dataclass
class Abatement:
    value: float  # EUR/t, >= 0
    not_binding: bool
    note: str = ""


@dataclass
class EmissionsReport:
    direct_by_sector: dict[str, float]  # t/yr
    indirect_electrolysis: float
    aviation_share: float  # liquid demand / total H2 demand
    aviation_attributed: float
    counterfactual_jet_fuel: float
    cap: float
    cap_dual: float  # EUR/t
    method_note: str = "aviation share is proportional to demand, not marginal"
    zonal_intensity: dict[str, float] = field(default_factory=dict)  # t/MWh

    @property
    def direct_total(self) -> float:
        return math.fsum(self.direct_by_sector.values())


def _weight(model: Model, j: int) -> float:
    p = model.index.col_info[j][3]
    return float(model.index.weights[p])


def electricity_prices(model: Model, result: SolveResult) -> dict[tuple[str, int, int], float]:
    """EUR/MWh per (zone, period, hour): the balance dual per unit of weight."""
    w = model.index.weights
    return {
        (z, p, h): float(result.duals[row]) / float(w[p])
        for (z, carrier, p, h), row in model.index.balance_rows.items()
        if carrier == "power"
    }


def _priced_electricity(model: Model, result: SolveResult, category: str) -> float:
    rows = model.index.balance_rows
    total = 0.0
    for j, z, p, h, mwh in model.index.elec_draw.get(category, ()):
        row = rows.get((z, "power", p, h))
        if row is not None:
            total += float(result.duals[row]) * mwh * float(result.x[j])
    return total


def cost_report(model: Model, result: SolveResult) -> CostReport:
    ix = model.index
    x = result.x
    cats = {}
    for c in CATEGORIES:
        terms = ix.cost_terms.get(c, ())
        cats[c] = math.fsum([coef * float(x[j]) for j, coef in terms]) + ix.offset_terms.get(c, 0.0)
    elec = {
        "h2_variable_electricity": _priced_electricity(model, result, "h2_electricity"),
        "liquefaction_variable_electricity": _priced_electricity(model, result, "liquefaction_electricity"),
    }
    gen = math.fsum([_weight(model, j) * float(x[j]) for j, _, _ in ix.h2_output])
    liq = math.fsum([_weight(model, j) * keep * float(x[j]) for j, _, keep in ix.liquefier_feed])
    return CostReport(cats, elec, gen, liq, result.objective)


def lcoh(costs: CostReport, need_liquid: bool = False) -> LCOH:
    """System-average levelized cost of hydrogen in EUR/kg.

    gaseous = (production, storage and pipeline fixed costs + priced
    electricity + fuel) / tonnes generated; liquid adds the liquefier
    fixed cost and its priced electricity per tonne liquefied.
    """
    if not costs.total_h2_generated > 0:
        raise DivisionDomain("no hydrogen generated")
    gnum = math.fsum(costs.get(k) for k in GASEOUS_PARTS)
    gas = gnum / costs.total_h2_generated / 1000.0
    lnum = math.fsum(costs.get(k) for k in LIQUID_PARTS)
    if costs.total_h2_liquefied > 0:
        liquid = gas + lnum / costs.total_h2_liquefied / 1000.0
    elif need_liquid:
        raise DivisionDomain("no hydrogen liquefied")
    else:
        liquid = None
    return LCOH(gas, liquid, gnum, lnum)


def abatement_cost(model: Model, result: SolveResult, tol: float = 1e-9) -> Abatement:
    row = model.index.cap_row
    if row is None:
        return Abatement(0.0, True, "no emissions cap row")
    v = -float(result.duals[row])  # raising the cap can only lower the cost
    if v <= tol * (1.0 + abs(result.objective)) / max(model.index.cap, 1.0):
        return Abatement(0.0, True, "emissions cap is slack")
    return Abatement(v, False)


def _annual(model: Model, result: SolveResult, j: int, per_unit: float = 1.0) -> float:
    return _weight(model, j) * per_unit * float(result.x[j])


def emissions_report(model: Model, result: SolveResult, instance: SystemInstance) -> EmissionsReport:
    ix = model.index
    direct: dict[str, float] = defaultdict(float)
    power_em: dict[str, float] = defaultdict(float)
    for j, sector, zone, co2 in ix.emitters:
        v = _annual(model, result, j, co2)
        direct[sector] += v
        if sector == "power":
            power_em[zone] += v
    gen: dict[str, float] = defaultdict(float)
    for j, info in enumerate(ix.col_info):
        if info[0] == "gen":
            gen[info[1]] += _annual(model, result, j)
    intensity = {z: (power_em[z] / gen[z] if gen[z] > 0 else 0.0) for z in instance.zone_ids}
    indirect = 0.0
    for j, z, p, h, mwh in ix.elec_draw.get("h2_electricity", ()):
        if ix.col_info[j][0] == "h2_prod":
            indirect += intensity[z] * _annual(model, result, j, mwh)

    sc = model.scenario
    liquid = gas = 0.0
    w = np.asarray(instance.weights, float)
    for z in instance.zone_ids:
        gas += float(w @ instance.demand("h2_gas", z).sum(axis=1))
        if sc.aviation_demand_on:
            liquid += float(w @ instance.demand("h2_liquid", z).sum(axis=1))
    share = liquid / (liquid + gas) if liquid + gas > 0 else 0.0
    h2_co2 = direct.get("h2", 0.0) + indirect
    cf = counterfactual_jet_co2(instance.jet_fuel_mj)
    ab = abatement_cost(model, result)
    return EmissionsReport(
        direct_by_sector={k: direct.get(k, 0.0) for k in ("power", "h2")},
        indirect_electrolysis=indirect,
        aviation_share=share,
        aviation_attributed=share * h2_co2,
        counterfactual_jet_fuel=cf,
        cap=ix.cap,
        cap_dual=ab.value,
        zonal_intensity=intensity,
    )


def counterfactual_jet_co2(jet_fuel_mj: float, t_per_mmbtu: float = JET_FUEL_CO2_T_PER_MMBTU) -> float:
    """t CO2 from burning the same jet fuel energy."""
    return jet_fuel_mj / MJ_PER_MMBTU * t_per_mmbtu


def fuel_burned_mmbtu(model: Model, result: SolveResult) -> dict[str, float]:
    out: dict[str, float] = defaultdict(float)
    for j, sector, _zone, mmbtu in model.index.fuel_burn:
        out[sector] += _annual(model, result, j, mmbtu)
    return dict(out)


# --- output tables -----------------------------------------------------------

def _f(v) -> str:
    if v is None:
        return ""
    v = float(v)
    if abs(v) < 1e-6:  # solver noise; every table quantity is EUR, MWh or t
        return "0"
    return f"{v:.10g}"


def _write(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _capacity_table(model: Model, result: SolveResult):
    ix = model.index
    change: dict[tuple[str, str, str], list[float]] = defaultdict(lambda: [0.0, 0.0])
    for j, z, tech, role, sign in ix.capacity_cols:
        change[(z, tech, role)][0 if sign > 0 else 1] += float(result.x[j])
    keys = sorted(set(change) | set(ix.existing))
    rows = []
    for k in keys:
        ex = ix.existing.get(k, 0.0)
        new, ret = change[k]
        rows.append([*k, _f(ex), _f(ret), _f(new), _f(ex - ret + new)])
    return rows


def _dispatch(model: Model, result: SolveResult):
    tot: dict[tuple[str, str, str], float] = defaultdict(float)
    for j, (kind, owner, tech, p, _h) in enumerate(model.index.col_info):
        if p >= 0 and kind in ("gen", "chg", "dis", "h2_prod", "liq", "inj", "wdr"):
            tot[(owner, tech, kind)] += _annual(model, result, j)
    return tot


def summarize(model: Model, result: SolveResult, instance: SystemInstance, out_dir) -> list[Path]:
    """Write the report tables and zonal GeoJSON; returns the files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ix = model.index
    x = result.x
    paths = []

    paths.append(_write(
        out / "capacity.csv",
        ["zone", "technology", "role", "existing", "retired", "new", "total"],
        _capacity_table(model, result),
    ))
    disp = _dispatch(model, result)
    paths.append(_write(
        out / "dispatch.csv",
        ["zone", "technology", "variable", "annual"],
        [[*k, _f(v)] for k, v in sorted(disp.items())],
    ))
    storage_rows = []
    cap_rows = {(r[0], r[1], r[2]): r for r in _capacity_table(model, result)}
    for z in instance.zone_ids:
        for t in instance.technologies.values():
            if t.sector not in ("power_storage", "h2_storage"):
                continue
            e = cap_rows.get((z, t.name, "energy"))
            if e is None:
                continue
            pw = cap_rows.get((z, t.name, "power"))
            storage_rows.append([
                z, t.name, t.stores, e[6], pw[6] if pw else "",
                _f(disp.get((z, t.name, "dis" if t.sector == "power_storage" else "wdr"), 0.0)),
            ])
    paths.append(_write(
        out / "storage.csv",
        ["zone", "technology", "stores", "energy_capacity", "power_capacity", "annual_discharge"],
        storage_rows,
    ))

    # network: lines, pipelines and truck routes
    edge_new: dict[str, float] = defaultdict(float)
    edge_flow: dict[tuple[str, str], float] = defaultdict(float)
    for j, (kind, owner, tech, p, _h) in enumerate(ix.col_info):
        if kind in ("line_new", "pipe_new", "fleet"):
            edge_new[owner] += float(x[j])
        elif kind in ("line_flow", "pipe_flow", "ship"):
            edge_flow[(owner, tech)] += _annual(model, result, j)
    built = {e.name: e for e in instance.edges}
    net_rows, h2_net_rows = [], []
    for name in sorted(set(edge_new) | {o for o, _ in edge_flow}):
        e = built[name]
        row = [name, e.kind, e.from_zone, e.to_zone, _f(e.length), _f(e.existing_capacity),
               _f(edge_new.get(name, 0.0)), _f(edge_flow.get((name, "0"), 0.0)),
               _f(edge_flow.get((name, "1"), 0.0))]
        net_rows.append(row)
        if e.kind in ("pipeline", "truck_route"):
            h2_net_rows.append(row)
    header = ["edge", "kind", "from_zone", "to_zone", "length_km", "existing", "new",
              "annual_forward", "annual_backward"]
    paths.append(_write(out / "transmission.csv", header, net_rows))
    paths.append(_write(out / "h2_network.csv", header, h2_net_rows))

    prod: dict[tuple[str, str], float] = defaultdict(float)
    for j, z, tech in ix.h2_output:
        prod[(z, tech)] += _annual(model, result, j)
    prod_cap = {(r[0], r[1]): r[6] for r in _capacity_table(model, result) if r[2] == "power"}
    paths.append(_write(
        out / "h2_production.csv",
        ["zone", "technology", "capacity_t_per_h", "annual_t"],
        [[z, t, prod_cap.get((z, t), "0"), _f(v)] for (z, t), v in sorted(prod.items()) if v > 1e-9],
    ))

    prices = electricity_prices(model, result)
    paths.append(_write(
        out / "prices_hourly.csv",
        ["zone", "period", "hour", "price_eur_mwh"],
        [[z, p, h, _f(v)] for (z, p, h), v in sorted(prices.items())],
    ))
    w = np.asarray(instance.weights, float)
    zone_rows, features = [], []
    zprod: dict[str, float] = defaultdict(float)
    for (z, _t), v in prod.items():
        zprod[z] += v
    zgen: dict[str, float] = defaultdict(float)
    for (z, _t, kind), v in disp.items():
        if kind == "gen":
            zgen[z] += v
    for zone in instance.zones:
        z = zone.zone_id
        load = instance.demand("load", z)
        num = sum(prices.get((z, p, h), 0.0) * load[p, h] * w[p] for p in range(len(w)) for h in range(load.shape[1]))
        den = float(w @ load.sum(axis=1))
        avg = num / den if den > 0 else 0.0
        dem = float(w @ instance.demand("h2_gas", z).sum(axis=1))
        if model.scenario.aviation_demand_on:
            dem += float(w @ instance.demand("h2_liquid", z).sum(axis=1))
        zone_rows.append([z, _f(avg), _f(zgen[z]), _f(zprod[z]), _f(dem)])
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [zone.lon, zone.lat]},
            "properties": {
                "zone_id": z,
                "h2_prod_t": round(zprod[z], 6),
                "h2_demand_t": round(dem, 6),
                "elec_gen_mwh": round(zgen[z], 6),
                "price_eur_mwh": round(avg, 6),
            },
        })
    paths.append(_write(
        out / "zone_prices.csv",
        ["zone", "avg_price_eur_mwh", "elec_gen_mwh", "h2_prod_t", "h2_demand_t"],
        zone_rows,
    ))
    gj = out / "zones.geojson"
    gj.write_text(json.dumps({"type": "FeatureCollection", "features": features}, indent=1, sort_keys=True) + "\n")
    paths.append(gj)

    costs = cost_report(model, result)
    cost_rows = [[c, _f(costs.categories[c]), "true"] for c in CATEGORIES]
    cost_rows += [[c, _f(v), "false"] for c, v in costs.electricity.items()]
    cost_rows += [["objective", _f(result.objective), "true"]]
    paths.append(_write(out / "costs.csv", ["category", "eur_per_yr", "in_objective"], cost_rows))

    lrows = []
    if costs.total_h2_generated > 0:
        lc = lcoh(costs)
        lrows = [
            ["gaseous", _f(lc.gaseous), ""],
            ["liquid", _f(lc.liquid) if lc.liquid is not None else "", ""],
            ["liquid_with_last_mile_low", _f(lc.liquid + LAST_MILE_EUR_PER_KG[0]) if lc.liquid is not None else "", "display only"],
            ["liquid_with_last_mile_high", _f(lc.liquid + LAST_MILE_EUR_PER_KG[1]) if lc.liquid is not None else "", "display only"],
        ]
    paths.append(_write(out / "lcoh.csv", ["product", "eur_per_kg", "note"], lrows))

    em = emissions_report(model, result, instance)
    ab = abatement_cost(model, result)
    erows = [
        ["direct_power_t", _f(em.direct_by_sector["power"])],
        ["direct_h2_t", _f(em.direct_by_sector["h2"])],
        ["indirect_electrolysis_t", _f(em.indirect_electrolysis)],
        ["aviation_share", _f(em.aviation_share)],
        ["aviation_attributed_t", _f(em.aviation_attributed)],
        ["counterfactual_jet_fuel_t", _f(em.counterfactual_jet_fuel)],
        ["cap_t", _f(em.cap) if math.isfinite(em.cap) else "inf"],
        ["abatement_cost_eur_per_t", _f(ab.value)],
        ["cap_not_binding", "true" if ab.not_binding else "false"],
    ]
    paths.append(_write(out / "emissions.csv", ["item", "value"], erows))
    return paths


def mmbtu_from_mwh(mwh: float) -> float:
    return mwh * MMBTU_PER_MWH
