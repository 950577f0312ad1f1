"""Scenario documents, bundled presets and model derivation."""

from uav_coverage.scenarios.derive import DerivedScenario, derive_model
from uav_coverage.scenarios.presets import preset, preset_group, preset_names
from uav_coverage.scenarios.schema import (
    Architecture,
    Scenario,
    SweepRange,
    load_scenario,
    parse_scenario,
    scenario_hash,
    serialize_scenario,
)

__all__ = [
    "Architecture",
    "DerivedScenario",
    "Scenario",
    "SweepRange",
    "derive_model",
    "load_scenario",
    "parse_scenario",
    "preset",
    "preset_group",
    "preset_names",
    "scenario_hash",
    "serialize_scenario",
]
