"""Sector-coupled electricity and hydrogen capacity expansion model."""
from .catalog import (
    CatalogError,
    Fuel,
    TechnologySpec,
    annualize,
    default_fuels,
    default_technologies,
    read_fuels,
    read_technologies,
    to_model_units,
    write_technologies,
)
from .instance import (
    ModelZone,
    NetworkEdge,
    SystemInstance,
    ValidationError,
    load_inputs,
    load_instance,
)
from .model import CATEGORIES, H2_CATEGORIES, POWER_CATEGORIES, Model, ModelIndex, build_lp, build_model, expected_size
from .scenarios import (
    ScenarioConfig,
    ScenarioError,
    UnknownPreset,
    apply_scenario,
    load_preset,
    load_presets,
    preset_names,
)

__all__ = [
    "CATEGORIES",
    "CatalogError",
    "Fuel",
    "H2_CATEGORIES",
    "Model",
    "ModelIndex",
    "ModelZone",
    "NetworkEdge",
    "POWER_CATEGORIES",
    "ScenarioConfig",
    "ScenarioError",
    "SystemInstance",
    "TechnologySpec",
    "UnknownPreset",
    "ValidationError",
    "annualize",
    "apply_scenario",
    "build_lp",
    "build_model",
    "default_fuels",
    "default_technologies",
    "expected_size",
    "load_inputs",
    "load_instance",
    "load_preset",
    "load_presets",
    "preset_names",
    "read_fuels",
    "read_technologies",
    "to_model_units",
    "write_technologies",
]
