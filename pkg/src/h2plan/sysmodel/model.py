"""Sector-coupled capacity expansion LP.

Units: power in MW (MWh per hour), hydrogen in t/h, storage energy in MWh
or t, money in EUR per year.  Every hourly quantity is weighted by the
number of days its representative period stands for.

Variables, by unit of the network:

* power plant (zone, tech): ``new``, ``ret`` and hourly ``gen``
* power storage: ``new_p``/``new_e``, ``ret_p``/``ret_e``, hourly
  ``chg``, ``dis``, ``soc``
* H2 producer and liquefier: ``new``, ``ret``, hourly output (feed for
  the liquefier)
* H2 storage: ``new_e``, ``new_c`` (compressor), ``ret_*``, hourly
  ``inj``, ``wdr``, ``soc``
* lines and pipelines: ``new`` plus directional hourly ``flow``
* truck routes: ``fleet`` plus directional hourly ``ship``

Rows: capacity limits, storage dynamics (cyclic within each period),
truck fleet limits, then the power / gaseous / liquid balance of every
zone-hour, then the joint CO2 cap.  Capacity is substituted as
``existing - ret + new`` so no capacity column is needed.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..solver.lp import LinearProgram, LPBuilder
from .catalog import (
    TechnologySpec,
    annualize,
    electricity_mwh_per_t,
    fuel_co2,
    fuel_mmbtu_per_unit,
    h2_t_per_mwh_e,
    to_model_units,
)
from .instance import (
    DEFAULT_LINE_COST,
    HOURS_PER_PERIOD,
    LINE_KINDS,
    NetworkEdge,
    SystemInstance,
    ValidationError,
)
from .scenarios import ScenarioConfig

H = HOURS_PER_PERIOD
CARRIER_ROWS = ("power", "gas", "liquid")

# cost categories; the first group is the hydrogen ledger
H2_CATEGORIES = (
    "h2_production_fixed",
    "h2_storage_fixed",
    "h2_pipeline_fixed",
    "h2_fuel",
    "liquefaction_fixed",
    "liquid_storage_fixed",
    "truck_fixed",
    "truck_opex",
)
POWER_CATEGORIES = (
    "power_capex",
    "power_fom",
    "power_vom",
    "power_fuel",
    "power_storage_fixed",
    "transmission_fixed",
)
CATEGORIES = H2_CATEGORIES + POWER_CATEGORIES


@dataclass
class ModelIndex:
    """What each column and row means, for reporting."""

    weights: np.ndarray
    col_info: list[tuple] = field(default_factory=list)  # (kind, owner, tech, p, h)
    cost_terms: dict[str, list[tuple[int, float]]] = field(default_factory=lambda: defaultdict(list))
    offset_terms: dict[str, float] = field(default_factory=lambda: defaultdict(float))
    # electricity drawn by the H2 chain: category -> [(col, zone, p, h, MWh per unit)]
    elec_draw: dict[str, list[tuple[int, str, int, int, float]]] = field(default_factory=lambda: defaultdict(list))
    # (zone, carrier, p, h) -> row
    balance_rows: dict[tuple[str, str, int, int], int] = field(default_factory=dict)
    cap_row: int | None = None
    cap: float = math.inf
    # emitting columns: (col, sector, zone, t CO2 per unit per hour)
    emitters: list[tuple[int, str, str, float]] = field(default_factory=list)
    # fuel burned: (col, sector, zone, MMBTU per unit per hour)
    fuel_burn: list[tuple[int, str, str, float]] = field(default_factory=list)
    h2_output: list[tuple[int, str, str]] = field(default_factory=list)  # (col, zone, tech), t/h
    liquefier_feed: list[tuple[int, str, float]] = field(default_factory=list)  # (col, zone, liquid yield)
    capacity_cols: list[tuple[int, str, str, str, float]] = field(default_factory=list)  # (col, zone, tech, role, sign)
    existing: dict[tuple[str, str, str], float] = field(default_factory=dict)  # (zone, tech, role) -> capacity

    def cols_of(self, kind: str) -> list[int]:
        return [j for j, info in enumerate(self.col_info) if info[0] == kind]


@dataclass
class Model:
    lp: LinearProgram
    index: ModelIndex
    scenario: ScenarioConfig


# --- which units exist -------------------------------------------------------

@dataclass(frozen=True)
class Unit:
    zone: str
    tech: TechnologySpec
    existing: float
    existing_energy: float
    expandable: bool
    cf: np.ndarray | None  # (P, 24) or None for dispatchable


def _allowed(inst: SystemInstance, sc: ScenarioConfig, zone: str, t: TechnologySpec) -> bool:
    if t.uses_ccs and (not sc.ccs_allowed or zone not in inst.ccs_zones(sc)):
        return False
    if t.zone_whitelist and zone not in t.zone_whitelist:
        return False
    return True


def _expandable(inst: SystemInstance, sc: ScenarioConfig, zone: str, t: TechnologySpec) -> bool:
    if t.fuel == "uranium":
        # nuclear only grows where it already exists, and only when the scenario allows it
        return sc.nuclear_expansion and inst.existing.get((zone, t.name), 0.0) > 0
    return t.expandable


def active_units(inst: SystemInstance, sc: ScenarioConfig) -> list[Unit]:
    """Zone-technology pairs that get columns, in build order."""
    units = []
    for z in inst.zone_ids:
        for t in inst.technologies.values():
            if t.sector in ("h2_pipeline", "h2_truck"):
                continue
            if not _allowed(inst, sc, z, t):
                continue
            ex = inst.existing.get((z, t.name), 0.0)
            ex_e = inst.existing_energy.get((z, t.name), 0.0)
            grow = _expandable(inst, sc, z, t)
            cf = None
            if t.profile:
                cf = inst.get(f"cf:{t.profile}:{z}")
                if cf is None or float(np.max(cf)) <= 0:
                    continue  # no resource here
            if ex <= 0 and ex_e <= 0 and not grow:
                continue
            units.append(Unit(z, t, ex, ex_e, grow, cf))
    return units


def _tech_of_sector(inst: SystemInstance, sector: str) -> TechnologySpec | None:
    for t in inst.technologies.values():
        if t.sector == sector:
            return t
    return None


def active_edges(inst: SystemInstance, sc: ScenarioConfig) -> list[tuple[NetworkEdge, bool]]:
    """(edge, expandable) pairs that get columns, in file order."""
    out = []
    pipe = _tech_of_sector(inst, "h2_pipeline")
    truck = _tech_of_sector(inst, "h2_truck")
    for e in inst.edges:
        if e.kind in LINE_KINDS:
            grow = min(e.max_expansion, sc.line_expansion_max_mw) > 0
            if e.existing_capacity > 0 or grow:
                out.append((e, grow))
        elif e.kind == "pipeline":
            if pipe is None:
                continue
            grow = sc.pipelines_allowed and e.max_expansion > 0
            if e.existing_capacity > 0 or grow:
                out.append((e, grow))
        elif e.kind == "truck_route":
            if truck is not None and sc.trucks_allowed and e.length <= sc.truck_max_km:
                out.append((e, True))
    return out


# --- builder ---------------------------------------------------------------

class _Build:
    def __init__(self, inst: SystemInstance, sc: ScenarioConfig):
        self.inst = inst
        self.sc = sc
        self.P = inst.n_periods
        self.w = np.asarray(inst.weights, dtype=float)
        self.b = LPBuilder(inst.name)
        self.ix = ModelIndex(weights=self.w.copy())
        # balance entries accumulated until the end: key -> list[(col, coef)]
        self.bal: dict[tuple[str, str, int, int], list[tuple[int, float]]] = defaultdict(list)
        self.cap_terms: list[tuple[int, float]] = []
        self.r = inst.discount_rate

    # helpers
    def var(self, name, kind, owner, tech="", p=-1, h=-1, lb=0.0, ub=math.inf) -> int:
        j = self.b.add_var(name, lb=lb, ub=ub)
        self.ix.col_info.append((kind, owner, tech, p, h))
        return j

    def cost(self, j: int, category: str, coef: float) -> None:
        if coef != 0:
            self.b.add_cost(j, coef)
            self.ix.cost_terms[category].append((j, coef))

    def offset(self, category: str, value: float) -> None:
        if value != 0:
            self.b.obj_offset += value
            self.ix.offset_terms[category] += value

    def ann(self, capex: float, life: float | None) -> float:
        return annualize(capex, life, self.r) if capex else 0.0

    def hourly(self, stem: str, kind: str, owner: str, tech: str = "", ub=math.inf):
        cols = np.empty((self.P, H), dtype=np.int64)
        for p in range(self.P):
            for h in range(H):
                cols[p, h] = self.var(f"{stem}[{p},{h}]", kind, owner, tech, p, h, ub=ub)
        return cols

    def capacity_pair(self, u: Unit, role: str, existing: float, stem: str):
        """new / ret columns for one capacity dimension; returns (new, ret)."""
        new = ret = None
        key = f"{u.zone},{u.tech.name}"
        if u.expandable:
            new = self.var(f"{stem}_new[{key}]", f"new_{role}", u.zone, u.tech.name)
            self.ix.capacity_cols.append((new, u.zone, u.tech.name, role, 1.0))
        if existing > 0:
            ret = self.var(f"{stem}_ret[{key}]", f"ret_{role}", u.zone, u.tech.name, ub=existing)
            self.ix.capacity_cols.append((ret, u.zone, u.tech.name, role, -1.0))
        self.ix.existing[(u.zone, u.tech.name, role)] = existing
        return new, ret

    def limit_rows(self, name: str, hourly_cols, new, ret, existing, factor=None):
        """x[p,h] <= f[p,h] * (existing - ret + new) for every hour."""
        for p in range(self.P):
            for h in range(H):
                f = 1.0 if factor is None else float(factor[p, h])
                coeffs = [(int(hourly_cols[p, h]), 1.0)]
                if new is not None:
                    coeffs.append((new, -f))
                if ret is not None:
                    coeffs.append((ret, f))
                self.b.add_row(f"{name}[{p},{h}]", coeffs, "L", f * existing)

    def fixed_costs(self, u: Unit, new, ret, capex_per_unit, fom_per_unit, life, cat_capex, cat_fom):
        if new is not None:
            self.cost(new, cat_capex, self.ann(capex_per_unit, life))
            self.cost(new, cat_fom, fom_per_unit)
        if ret is not None:
            self.cost(ret, cat_fom, -fom_per_unit)
        self.offset(cat_fom, fom_per_unit * u.existing)

    def storage_dynamics(self, name, soc, inj, wdr, eta_in=1.0, eta_out=1.0, loss=0.0):
        for p in range(self.P):
            for h in range(H):
                prev = (h - 1) % H
                coeffs = [(int(soc[p, h]), 1.0), (int(inj[p, h]), -eta_in), (int(wdr[p, h]), 1.0 / eta_out)]
                if loss:
                    coeffs.append((int(soc[p, prev]), -(1.0 - loss)))
                else:
                    coeffs.append((int(soc[p, prev]), -1.0))
                self.b.add_row(f"{name}[{p},{h}]", coeffs, "E", 0.0)

    def to_balance(self, zone, carrier, cols, coef, per_hour=None):
        for p in range(self.P):
            for h in range(H):
                c = coef if per_hour is None else coef * per_hour[p, h]
                if c != 0:
                    self.bal[(zone, carrier, p, h)].append((int(cols[p, h]), c))

    def hourly_cost(self, cols, category, per_unit):
        if per_unit:
            for p in range(self.P):
                for h in range(H):
                    self.cost(int(cols[p, h]), category, self.w[p] * per_unit)

    def draw(self, category, zone, cols, mwh_per_unit):
        for p in range(self.P):
            for h in range(H):
                self.ix.elec_draw[category].append((int(cols[p, h]), zone, p, h, mwh_per_unit))

    def emits(self, cols, sector, zone, mmbtu, co2):
        for p in range(self.P):
            for h in range(H):
                j = int(cols[p, h])
                if mmbtu:
                    self.ix.fuel_burn.append((j, sector, zone, mmbtu))
                if co2:
                    self.ix.emitters.append((j, sector, zone, co2))
                    self.cap_terms.append((j, self.w[p] * co2))

    # units
    def power_plant(self, u: Unit):
        t, z = u.tech, u.zone
        key = f"{z},{t.name}"
        new, ret = self.capacity_pair(u, "power", u.existing, "cap")
        gen = self.hourly(f"gen[{key}]", "gen", z, t.name)
        self.limit_rows(f"gen_max[{key}]", gen, new, ret, u.existing, u.cf)
        g2p = t.sector == "h2_gas_to_power"
        self.fixed_costs(
            u, new, ret, to_model_units(t.capex, t.capex_unit), to_model_units(t.fom, t.fom_unit),
            t.lifetime, "power_capex", "power_fom",
        )
        self.hourly_cost(gen, "power_vom", t.vom or 0.0)
        mmbtu = fuel_mmbtu_per_unit(t)
        if mmbtu:
            self.hourly_cost(gen, "power_fuel", mmbtu * self.inst.fuels[t.fuel].price)
        co2 = mmbtu * fuel_co2(t, self.inst.fuels) * (1.0 - t.capture_rate)
        self.emits(gen, "power", z, mmbtu, co2)
        self.to_balance(z, "power", gen, 1.0)
        if g2p:
            self.to_balance(z, "gas", gen, -h2_t_per_mwh_e(t))

    def power_storage(self, u: Unit):
        t, z = u.tech, u.zone
        key = f"{z},{t.name}"
        new_p, ret_p = self.capacity_pair(u, "power", u.existing, "capp")
        new_e, ret_e = self.capacity_pair(u, "energy", u.existing_energy, "cape")
        chg = self.hourly(f"chg[{key}]", "chg", z, t.name)
        dis = self.hourly(f"dis[{key}]", "dis", z, t.name)
        soc = self.hourly(f"soc[{key}]", "soc", z, t.name)
        self.limit_rows(f"chg_max[{key}]", chg, new_p, ret_p, u.existing)
        self.limit_rows(f"dis_max[{key}]", dis, new_p, ret_p, u.existing)
        self.limit_rows(f"soc_max[{key}]", soc, new_e, ret_e, u.existing_energy)
        eta = math.sqrt(t.efficiency or 1.0)
        self.storage_dynamics(f"soc_bal[{key}]", soc, chg, dis, eta, eta)
        if t.duration_h:
            d = t.duration_h
            coeffs = []
            for j, c in ((new_e, 1.0), (ret_e, -1.0), (new_p, -d), (ret_p, d)):
                if j is not None:
                    coeffs.append((j, c))
            if coeffs:
                self.b.add_row(f"duration[{key}]", coeffs, "L", d * u.existing - u.existing_energy)
        self.fixed_costs(
            u, new_p, ret_p, to_model_units(t.capex, t.capex_unit), to_model_units(t.fom, t.fom_unit),
            t.lifetime, "power_storage_fixed", "power_storage_fixed",
        )
        if new_e is not None:
            self.cost(new_e, "power_storage_fixed", self.ann((t.capex_energy or 0.0) * 1e3, t.lifetime))
        self.hourly_cost(dis, "power_vom", t.vom or 0.0)
        self.to_balance(z, "power", dis, 1.0)
        self.to_balance(z, "power", chg, -1.0)

    def h2_producer(self, u: Unit):
        t, z = u.tech, u.zone
        key = f"{z},{t.name}"
        new, ret = self.capacity_pair(u, "power", u.existing, "cap")
        out = self.hourly(f"h2[{key}]", "h2_prod", z, t.name)
        self.limit_rows(f"h2_max[{key}]", out, new, ret, u.existing)
        self.fixed_costs(
            u, new, ret, to_model_units(t.capex, t.capex_unit), to_model_units(t.fom, t.fom_unit),
            t.lifetime, "h2_production_fixed", "h2_production_fixed",
        )
        mmbtu = fuel_mmbtu_per_unit(t)
        if mmbtu:
            self.hourly_cost(out, "h2_fuel", mmbtu * self.inst.fuels[t.fuel].price)
        self.hourly_cost(out, "h2_fuel", t.vom or 0.0)
        co2 = mmbtu * fuel_co2(t, self.inst.fuels) * (1.0 - t.capture_rate)
        self.emits(out, "h2", z, mmbtu, co2)
        e = electricity_mwh_per_t(t)
        if e:
            self.to_balance(z, "power", out, -e)
            self.draw("h2_electricity", z, out, e)
        self.to_balance(z, "gas", out, 1.0)
        for p in range(self.P):
            for h in range(H):
                self.ix.h2_output.append((int(out[p, h]), z, t.name))

    def liquefier(self, u: Unit):
        t, z = u.tech, u.zone
        key = f"{z},{t.name}"
        new, ret = self.capacity_pair(u, "power", u.existing, "cap")
        feed = self.hourly(f"liq[{key}]", "liq", z, t.name)
        self.limit_rows(f"liq_max[{key}]", feed, new, ret, u.existing)
        self.fixed_costs(
            u, new, ret, to_model_units(t.capex, t.capex_unit), to_model_units(t.fom, t.fom_unit),
            t.lifetime, "liquefaction_fixed", "liquefaction_fixed",
        )
        e = electricity_mwh_per_t(t)
        keep = 1.0 - (t.boil_off or 0.0)
        self.to_balance(z, "gas", feed, -1.0)
        self.to_balance(z, "liquid", feed, keep)
        if e:
            self.to_balance(z, "power", feed, -e)
            self.draw("liquefaction_electricity", z, feed, e)
        for p in range(self.P):
            for h in range(H):
                self.ix.liquefier_feed.append((int(feed[p, h]), z, keep))

    def h2_storage(self, u: Unit):
        t, z = u.tech, u.zone
        key = f"{z},{t.name}"
        liquid = t.stores == "h2_liquid"
        carrier = "liquid" if liquid else "gas"
        cat = "liquid_storage_fixed" if liquid else "h2_storage_fixed"
        new_e, ret_e = self.capacity_pair(u, "energy", u.existing_energy, "cape")
        has_comp = t.compressor_capex is not None
        new_c = ret_c = None
        if has_comp:
            new_c, ret_c = self.capacity_pair(u, "power", u.existing, "capc")
        inj = self.hourly(f"inj[{key}]", "inj", z, t.name)
        wdr = self.hourly(f"wdr[{key}]", "wdr", z, t.name)
        soc = self.hourly(f"soc[{key}]", "soc", z, t.name)
        self.limit_rows(f"soc_max[{key}]", soc, new_e, ret_e, u.existing_energy)
        if has_comp:
            self.limit_rows(f"inj_max[{key}]", inj, new_c, ret_c, u.existing)
        self.storage_dynamics(f"soc_bal[{key}]", soc, inj, wdr, loss=t.boil_off or 0.0)
        capex_e = to_model_units(t.capex, t.capex_unit)
        fom_e = to_model_units(t.fom, t.fom_unit)
        if new_e is not None:
            self.cost(new_e, cat, self.ann(capex_e, t.lifetime) + fom_e)
        if ret_e is not None:
            self.cost(ret_e, cat, -fom_e)
        self.offset(cat, fom_e * u.existing_energy)
        if new_c is not None:
            self.cost(new_c, cat, self.ann(t.compressor_capex * 1e6, t.secondary_lifetime or t.lifetime))
        self.to_balance(z, carrier, wdr, 1.0)
        self.to_balance(z, carrier, inj, -1.0)
        e = electricity_mwh_per_t(t)
        if e:
            self.to_balance(z, "power", inj, -e)
            self.draw("h2_electricity", z, inj, e)

    # edges
    def line(self, e: NetworkEdge, grow: bool):
        name = e.name
        new = None
        if grow:
            ub = min(e.max_expansion, self.sc.line_expansion_max_mw)
            new = self.var(f"line_new[{name}]", "line_new", name, ub=ub)
            cost = e.cost_per_unit if e.cost_per_unit is not None else DEFAULT_LINE_COST[e.kind]
            self.cost(new, "transmission_fixed", cost * e.length)
        loss = e.loss_fraction()
        for d, (src, dst) in enumerate(((e.from_zone, e.to_zone), (e.to_zone, e.from_zone))):
            f = self.hourly(f"flow[{name},{d}]", "line_flow", name, str(d))
            self.limit_rows(f"flow_max[{name},{d}]", f, new, None, e.existing_capacity)
            self.to_balance(src, "power", f, -1.0)
            self.to_balance(dst, "power", f, 1.0 - loss)

    def pipeline(self, e: NetworkEdge, grow: bool, t: TechnologySpec):
        name = e.name
        unit = t.unit_capacity or 1.0
        new = None
        if grow:
            new = self.var(f"pipe_new[{name}]", "pipe_new", name, ub=e.max_expansion)
            per_km = e.cost_per_unit if e.cost_per_unit is not None else to_model_units(t.capex, t.capex_unit)
            comp_life = t.secondary_lifetime or t.lifetime
            c = self.ann(per_km * e.length, t.lifetime)
            c += self.ann((t.compressor_capex or 0.0) * 1e6 * unit, comp_life)
            c += self.ann((t.booster_capex or 0.0) * unit, comp_life)
            self.cost(new, "h2_pipeline_fixed", c)
        loss = e.loss_fraction()
        e_use = electricity_mwh_per_t(t)
        for d, (src, dst) in enumerate(((e.from_zone, e.to_zone), (e.to_zone, e.from_zone))):
            f = self.hourly(f"pflow[{name},{d}]", "pipe_flow", name, str(d))
            for p in range(self.P):
                for h in range(H):
                    coeffs = [(int(f[p, h]), 1.0)]
                    if new is not None:
                        coeffs.append((new, -unit))
                    self.b.add_row(f"pflow_max[{name},{d}][{p},{h}]", coeffs, "L", e.existing_capacity)
            self.to_balance(src, "gas", f, -1.0)
            self.to_balance(dst, "gas", f, 1.0 - loss)
            if e_use:
                self.to_balance(src, "power", f, -e_use)
                self.draw("h2_electricity", src, f, e_use)

    def truck_route(self, e: NetworkEdge, t: TechnologySpec):
        name = e.name
        payload = t.unit_capacity or 1.0
        rt_hours = 2 * e.length / (t.speed_kmh or 60.0) + (t.turnaround_h or 0.0)
        kg_per_km = e.loss_or_fuel_use if e.loss_or_fuel_use is not None else (t.fuel_use_kg_per_km or 0.0)
        burn = 2 * e.length * kg_per_km / 1000.0 / payload  # t H2 burned per t delivered
        fleet = self.var(f"fleet[{name}]", "fleet", name)
        self.cost(fleet, "truck_fixed", self.ann(to_model_units(t.capex, t.capex_unit), t.lifetime))
        ships = []
        for d, (src, dst) in enumerate(((e.from_zone, e.to_zone), (e.to_zone, e.from_zone))):
            s = self.hourly(f"ship[{name},{d}]", "ship", name, str(d))
            ships.append(s)
            self.to_balance(src, "liquid", s, -(1.0 + burn))
            self.to_balance(dst, "liquid", s, 1.0)
            self.hourly_cost(s, "truck_opex", 2 * e.length * (t.opex_per_km or 0.0) / payload)
        for p in range(self.P):
            for h in range(H):
                self.b.add_row(
                    f"fleet_max[{name}][{p},{h}]",
                    [(int(ships[0][p, h]), 1.0), (int(ships[1][p, h]), 1.0), (fleet, -payload / rt_hours)],
                    "L",
                    0.0,
                )

    # assembly
    def run(self) -> Model:
        inst, sc = self.inst, self.sc
        problems = inst.problems()
        if sc.ccs_allowed and not inst.ccs_zones(sc) and any(t.uses_ccs for t in inst.technologies.values()):
            problems.append("CCS allowed but the CCS zone whitelist is empty")
        for z in sc.ccs_zone_whitelist or ():
            if z not in inst.zone_ids:
                problems.append(f"CCS whitelist names unknown zone {z}")
        if problems:
            raise ValidationError(problems)

        for u in active_units(inst, sc):
            s = u.tech.sector
            if s in ("power", "h2_gas_to_power"):
                self.power_plant(u)
            elif s == "power_storage":
                self.power_storage(u)
            elif s == "h2_production":
                self.h2_producer(u)
            elif s == "liquefier":
                self.liquefier(u)
            elif s == "h2_storage":
                self.h2_storage(u)
        pipe_t = _tech_of_sector(inst, "h2_pipeline")
        truck_t = _tech_of_sector(inst, "h2_truck")
        for e, grow in active_edges(inst, sc):
            if e.kind in LINE_KINDS:
                self.line(e, grow)
            elif e.kind == "pipeline":
                self.pipeline(e, grow, pipe_t)
            else:
                self.truck_route(e, truck_t)

        missing = []
        carriers = (("power", "load"), ("gas", "h2_gas"), ("liquid", "h2_liquid"))
        for z in inst.zone_ids:
            for carrier, series in carriers:
                dem = inst.demand(series, z)
                if carrier == "liquid" and not sc.aviation_demand_on:
                    dem = np.zeros_like(dem)
                for p in range(self.P):
                    for h in range(H):
                        key = (z, carrier, p, h)
                        entries = self.bal.get(key, [])
                        rhs = float(dem[p, h])
                        if not entries:
                            if rhs > 0:
                                missing.append(f"{carrier} demand in zone {z} has no possible supply")
                            continue
                        self.ix.balance_rows[key] = self.b.add_row(
                            f"bal_{carrier}[{z}][{p},{h}]", entries, "E", rhs
                        )
        if missing:
            raise ValidationError(sorted(set(missing)))

        cap = inst.effective_cap(sc)
        self.ix.cap = cap
        if math.isfinite(cap) and self.cap_terms:
            self.ix.cap_row = self.b.add_row("co2_cap", self.cap_terms, "L", cap)

        lp = self.b.build()
        _assert_no_empty(lp)
        return Model(lp, self.ix, sc)


def _assert_no_empty(lp: LinearProgram) -> None:
    A = lp.matrix()
    empty_rows = np.flatnonzero(np.diff(A.indptr) == 0)
    empty_cols = np.flatnonzero(np.diff(A.tocsc().indptr) == 0)
    if len(empty_rows) or len(empty_cols):
        names = [lp.row_names[i] for i in empty_rows[:3]] + [lp.col_names[j] for j in empty_cols[:3]]
        raise ValidationError([f"model produced empty rows/columns, e.g. {names}"])


def build_model(instance: SystemInstance, scenario: ScenarioConfig | None = None) -> Model:
    return _Build(instance, scenario or instance.scenario).run()


def build_lp(instance: SystemInstance, scenario: ScenarioConfig | None = None) -> LinearProgram:
    return build_model(instance, scenario).lp


def expected_size(instance: SystemInstance, scenario: ScenarioConfig | None = None) -> tuple[int, int]:
    """(columns, rows) predicted from instance dimensions.

    With T = 24 * periods, [x] = 1 if x else 0:

      power plant           cols [new] + [ret] + T          rows T
      power storage         cols 2[new] + [ret_p] + [ret_e] + 3T
                            rows 4T + [duration and capacity columns exist]
      H2 producer/liquefier cols [new] + [ret] + T          rows T
      H2 storage            cols (1 + [comp])[new] + [ret_e] + [comp][ret_c] + 3T
                            rows (2 + [comp])T
      line / pipeline       cols [new] + 2T                 rows 2T
      truck route           cols 1 + 2T                     rows T
      balances              one row per (zone, carrier, hour) with any entry
      CO2 cap               1 when the cap is finite and something emits
    """
    sc = scenario or instance.scenario
    T = instance.n_periods * H
    cols = rows = 0
    touched: dict[str, set[str]] = {"power": set(), "gas": set(), "liquid": set()}
    emits = False
    for u in active_units(instance, sc):
        t, s, z = u.tech, u.tech.sector, u.zone
        new = 1 if u.expandable else 0
        ret = 1 if u.existing > 0 else 0
        if s in ("power", "h2_gas_to_power"):
            cols += new + ret + T
            rows += T
            touched["power"].add(z)
            if s == "h2_gas_to_power":
                touched["gas"].add(z)
            emits |= fuel_mmbtu_per_unit(t) * fuel_co2(t, instance.fuels) * (1 - t.capture_rate) > 0
        elif s == "power_storage":
            ret_e = 1 if u.existing_energy > 0 else 0
            cols += 2 * new + ret + ret_e + 3 * T
            rows += 4 * T + (1 if t.duration_h and (new or ret or ret_e) else 0)
            touched["power"].add(z)
        elif s in ("h2_production", "liquefier"):
            cols += new + ret + T
            rows += T
            if s == "h2_production":
                touched["gas"].add(z)
                if electricity_mwh_per_t(t):
                    touched["power"].add(z)
                emits |= fuel_mmbtu_per_unit(t) * fuel_co2(t, instance.fuels) * (1 - t.capture_rate) > 0
            else:
                touched["gas"].add(z)
                touched["liquid"].add(z)
                if electricity_mwh_per_t(t):
                    touched["power"].add(z)
        elif s == "h2_storage":
            comp = 1 if t.compressor_capex is not None else 0
            ret_e = 1 if u.existing_energy > 0 else 0
            cols += (1 + comp) * new + ret_e + comp * ret + 3 * T
            rows += (2 + comp) * T
            touched["liquid" if t.stores == "h2_liquid" else "gas"].add(z)
            if electricity_mwh_per_t(t):
                touched["power"].add(z)
    pipe_t = _tech_of_sector(instance, "h2_pipeline")
    for e, grow in active_edges(instance, sc):
        ends = {e.from_zone, e.to_zone}
        if e.kind == "truck_route":
            cols += 1 + 2 * T
            rows += T
            touched["liquid"] |= ends
        else:
            cols += (1 if grow else 0) + 2 * T
            rows += 2 * T
            if e.kind in LINE_KINDS:
                touched["power"] |= ends
            else:
                touched["gas"] |= ends
                if pipe_t is not None and electricity_mwh_per_t(pipe_t):
                    touched["power"] |= ends
    rows += T * sum(len(v) for v in touched.values())
    cap = instance.effective_cap(sc)
    if math.isfinite(cap) and emits:
        rows += 1
    return cols, rows
