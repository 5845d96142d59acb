"""Scenario toggles and the named preset file."""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class UnknownPreset(KeyError):
    pass


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "custom"
    aviation_demand_on: bool = True
    nuclear_expansion: bool = False
    ccs_allowed: bool = True
    # None: zones flagged as CCS candidates in the instance
    ccs_zone_whitelist: tuple[str, ...] | None = None
    pipelines_allowed: bool = True
    trucks_allowed: bool = False
    # None: use the instance's cap; math.inf: no cap row at all
    emissions_cap: float | None = None
    truck_max_km: float = 500.0
    line_expansion_max_mw: float = 10_000.0

    def __post_init__(self):
        if self.emissions_cap is not None and not self.emissions_cap >= 0:
            raise ScenarioError("emissions_cap must be >= 0")
        if self.ccs_allowed and self.ccs_zone_whitelist is not None and not self.ccs_zone_whitelist:
            raise ScenarioError("ccs_allowed with an empty CCS zone whitelist")
        if self.truck_max_km <= 0 or self.line_expansion_max_mw < 0:
            raise ScenarioError("truck_max_km must be > 0 and line_expansion_max_mw >= 0")


def _bundled_text() -> str:
    return resources.files("h2plan.data.presets").joinpath("scenarios.ini").read_text()


def _parser(path=None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if path is None:
        cp.read_string(_bundled_text())
    else:
        with open(path) as fh:
            cp.read_file(fh)
    return cp


def preset_names(path=None) -> list[str]:
    return _parser(path).sections()


def _section_to_config(name: str, sec) -> ScenarioConfig:
    wl = sec.get("ccs_zone_whitelist", "candidates").strip()
    cap = sec.get("emissions_cap", "instance").strip().lower()
    if cap == "instance":
        cap_v = None
    elif cap in ("inf", "none", "unlimited"):
        cap_v = math.inf
    else:
        cap_v = float(cap)
    return ScenarioConfig(
        name=name,
        aviation_demand_on=sec.getboolean("aviation_demand_on", True),
        nuclear_expansion=sec.getboolean("nuclear_expansion", False),
        ccs_allowed=sec.getboolean("ccs_allowed", True),
        ccs_zone_whitelist=None if wl == "candidates" else tuple(z for z in wl.split(";") if z),
        pipelines_allowed=sec.getboolean("pipelines_allowed", True),
        trucks_allowed=sec.getboolean("trucks_allowed", False),
        emissions_cap=cap_v,
        truck_max_km=sec.getfloat("truck_max_km", 500.0),
        line_expansion_max_mw=sec.getfloat("line_expansion_max_mw", 10_000.0),
    )


def load_preset(name: str, path=None) -> ScenarioConfig:
    cp = _parser(path)
    if name not in cp.sections():
        raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(cp.sections())}")
    return _section_to_config(name, cp[name])


def load_presets(path=None) -> dict[str, ScenarioConfig]:
    cp = _parser(path)
    return {n: _section_to_config(n, cp[n]) for n in cp.sections()}


def apply_scenario(instance, preset_name: str, path=None):
    """Instance with its scenario replaced by the named preset."""
    return dataclasses.replace(instance, scenario=load_preset(preset_name, path))


def with_cap(scenario: ScenarioConfig, cap: float | None) -> ScenarioConfig:
    return dataclasses.replace(scenario, emissions_cap=cap)


def presets_path_default() -> Path:
    return Path(str(resources.files("h2plan.data.presets").joinpath("scenarios.ini")))
