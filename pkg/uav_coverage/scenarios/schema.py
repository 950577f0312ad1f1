"""Scenario documents: schema, validation and canonical serialization."""

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from uav_coverage.core.exceptions import DomainError, ScenarioValidationError
from uav_coverage.core.geometry import NodeLayout, Point3D

logger = logging.getLogger("uav_coverage.scenarios")

SCHEMA_VERSION = 1

# 1000 nodes per pi * (100 m)^2
MICRO_DENSITY_PER_M2 = 1000.0 / (math.pi * 100.0**2)
MACRO_DENSITY_PER_M2 = MICRO_DENSITY_PER_M2 / 5.0
MACRO_BS_POWER_W = 30.0
MICRO_BS_POWER_W = 8.0
MMWAVE_CUTOFF_GHZ = 6.0
IRS_GAIN_SUB6_DB = 20.0
IRS_GAIN_MMWAVE_DB = 14.0

REQUIRED_KEYS = (
    "schema_version",
    "name",
    "architecture",
    "carrier_ghz",
    "tx_power_w",
    "uav_altitude_m",
)
OPTIONAL_KEYS = (
    "description",
    "irs_elements",
    "irs_gains_db",
    "angles_deg",
    "reflection_amplitude",
    "attenuation_mu_db",
    "alpha",
    "noise_dbm",
    "ref_distance_m",
    "densities_per_m2",
    "tier_powers_w",
    "interferer_distances_m",
    "layout",
    "sweep_db",
)
LAYOUT_KEYS = ("macro_bs", "micro_bs", "uav_or_irs", "user")
SWEEP_KEYS = ("start", "stop", "step")
DENSITY_KEYS = ("serving", "interfering")


class Architecture(str, Enum):
    CONVENTIONAL_UAV = "conventional_uav"
    IRS_UAV = "irs_uav"


def default_irs_gain_db(carrier_ghz: float) -> float:
    """20 dB antennas below 6 GHz, 14 dB for mmWave carriers."""
    return IRS_GAIN_SUB6_DB if carrier_ghz < MMWAVE_CUTOFF_GHZ else IRS_GAIN_MMWAVE_DB


@dataclass(frozen=True)
class SweepRange:
    """Threshold grid in dB, stop inclusive."""

    start: float = -10.0
    stop: float = 30.0
    step: float = 1.0

    def thresholds_db(self) -> list[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 9) for k in range(count)]


@dataclass(frozen=True)
class Scenario:
    """One named experiment. Decibel quantities stay in dB until derive_model."""

    name: str
    architecture: Architecture
    carrier_ghz: float
    tx_power_w: float
    uav_altitude_m: float
    irs_elements: int = 32
    irs_gains_db: tuple[float, float] = (IRS_GAIN_SUB6_DB, IRS_GAIN_SUB6_DB)
    angles_deg: tuple[float, float] = (45.0, 45.0)
    reflection_amplitude: float = 0.9
    attenuation_mu_db: float = 3.0
    alpha: float = 2.0
    noise_dbm: float = -90.0
    ref_distance_m: float = 1.0
    serving_density: float = MICRO_DENSITY_PER_M2
    interfering_densities: tuple[float, ...] = (MACRO_DENSITY_PER_M2, MICRO_DENSITY_PER_M2)
    tier_powers_w: tuple[float, ...] = (MACRO_BS_POWER_W, MICRO_BS_POWER_W)
    interferer_distances_m: tuple[float, ...] = (1000.0, 1000.0)
    layout: NodeLayout | None = None
    sweep: SweepRange = SweepRange()
    description: str = ""


def _fail(path: str, reason: str):
    raise ScenarioValidationError(path, reason)


def _number(doc: dict, key: str, path: str, default: Any = None) -> float:
    value = doc.get(key, default)
    if value is None:
        _fail(path, "is required")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        _fail(path, f"must be finite, got {value!r}")
    return value


def _positive(doc: dict, key: str, path: str, default: Any = None) -> float:
    value = _number(doc, key, path, default)
    if value <= 0:
        _fail(path, f"must be positive, got {value!r}")
    return value


def _number_list(value: Any, path: str, length: int | None = None) -> tuple[float, ...]:
    if not isinstance(value, list):
        _fail(path, f"must be a list of numbers, got {value!r}")
    if length is not None and len(value) != length:
        _fail(path, f"must have {length} entries, got {len(value)}")
    return tuple(_number({"v": item}, "v", f"{path}[{i}]") for i, item in enumerate(value))


def _reject_unknown(doc: dict, allowed: tuple[str, ...], prefix: str):
    for key in doc:
        if key not in allowed:
            _fail(f"{prefix}{key}", "unknown key")


def _parse_point(value: Any, path: str) -> Point3D:
    x, y, z = _number_list(value, path, 3)
    try:
        return Point3D(x, y, z)
    except DomainError as e:
        raise ScenarioValidationError(path, str(e)) from e


def _parse_layout(value: Any, altitude: float) -> NodeLayout:
    if not isinstance(value, dict):
        _fail("layout", "must be an object")
    _reject_unknown(value, LAYOUT_KEYS, "layout.")
    for key in LAYOUT_KEYS:
        if key not in value:
            _fail(f"layout.{key}", "is required")
    layout = NodeLayout(**{key: _parse_point(value[key], f"layout.{key}") for key in LAYOUT_KEYS})
    if not math.isclose(layout.uav_or_irs.z, altitude, rel_tol=0, abs_tol=1e-9):
        _fail("layout.uav_or_irs", f"height must equal uav_altitude_m ({altitude:g})")
    return layout


def _parse_sweep(value: Any) -> SweepRange:
    if not isinstance(value, dict):
        _fail("sweep_db", "must be an object")
    _reject_unknown(value, SWEEP_KEYS, "sweep_db.")
    start = _number(value, "start", "sweep_db.start", -10.0)
    stop = _number(value, "stop", "sweep_db.stop", 30.0)
    step = _positive(value, "step", "sweep_db.step", 1.0)
    if stop < start:
        _fail("sweep_db.stop", f"must be >= start ({start:g})")
    return SweepRange(start, stop, step)


def scenario_from_dict(doc: Any) -> Scenario:
    """Validate a decoded document and build the Scenario."""
    if not isinstance(doc, dict):
        _fail("$", "document must be an object")
    _reject_unknown(doc, REQUIRED_KEYS + OPTIONAL_KEYS, "")
    for key in REQUIRED_KEYS:
        if key not in doc:
            _fail(key, "is required")

    version = doc["schema_version"]
    if version != SCHEMA_VERSION or isinstance(version, bool):
        _fail("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")

    name = doc["name"]
    if not isinstance(name, str) or not name.strip():
        _fail("name", "must be a non-empty string")

    try:
        architecture = Architecture(doc["architecture"])
    except ValueError:
        valid = ", ".join(a.value for a in Architecture)
        _fail("architecture", f"must be one of {valid}, got {doc['architecture']!r}")

    carrier = _positive(doc, "carrier_ghz", "carrier_ghz")
    tx_power = _positive(doc, "tx_power_w", "tx_power_w")
    altitude = _positive(doc, "uav_altitude_m", "uav_altitude_m")

    elements = doc.get("irs_elements", 32)
    if isinstance(elements, bool) or not isinstance(elements, int) or elements < 1:
        _fail("irs_elements", f"must be a positive integer, got {elements!r}")

    gain_default = default_irs_gain_db(carrier)
    gains = _number_list(doc.get("irs_gains_db", [gain_default, gain_default]), "irs_gains_db", 2)
    angles = _number_list(doc.get("angles_deg", [45.0, 45.0]), "angles_deg", 2)
    for i, angle in enumerate(angles):
        if not 0 <= angle < 90:
            _fail(f"angles_deg[{i}]", f"must lie in [0, 90), got {angle!r}")

    amplitude = _positive(doc, "reflection_amplitude", "reflection_amplitude", 0.9)
    if amplitude > 1:
        _fail("reflection_amplitude", f"must lie in (0, 1], got {amplitude!r}")

    densities = doc.get("densities_per_m2", {})
    if not isinstance(densities, dict):
        _fail("densities_per_m2", "must be an object")
    _reject_unknown(densities, DENSITY_KEYS, "densities_per_m2.")
    serving_density = _positive(
        densities, "serving", "densities_per_m2.serving", MICRO_DENSITY_PER_M2
    )
    interfering = _number_list(
        densities.get("interfering", [MACRO_DENSITY_PER_M2, MICRO_DENSITY_PER_M2]),
        "densities_per_m2.interfering",
    )
    if not interfering:
        _fail("densities_per_m2.interfering", "needs at least one interfering tier")
    for i, value in enumerate(interfering):
        if value <= 0:
            _fail(f"densities_per_m2.interfering[{i}]", f"must be positive, got {value!r}")

    tier_count = len(interfering)
    powers = _number_list(
        doc.get("tier_powers_w", [MACRO_BS_POWER_W, MICRO_BS_POWER_W]), "tier_powers_w", tier_count
    )
    distances = _number_list(
        doc.get("interferer_distances_m", [1000.0] * tier_count),
        "interferer_distances_m",
        tier_count,
    )
    for key, values in (("tier_powers_w", powers), ("interferer_distances_m", distances)):
        for i, value in enumerate(values):
            if value <= 0:
                _fail(f"{key}[{i}]", f"must be positive, got {value!r}")

    alpha = _positive(doc, "alpha", "alpha", 2.0)
    ref_distance = _positive(doc, "ref_distance_m", "ref_distance_m", 1.0)
    description = doc.get("description", "")
    if not isinstance(description, str):
        _fail("description", "must be a string")

    layout = _parse_layout(doc["layout"], altitude) if "layout" in doc else None
    sweep = _parse_sweep(doc["sweep_db"]) if "sweep_db" in doc else SweepRange()

    return Scenario(
        name=name,
        architecture=architecture,
        carrier_ghz=carrier,
        tx_power_w=tx_power,
        uav_altitude_m=altitude,
        irs_elements=elements,
        irs_gains_db=gains,
        angles_deg=angles,
        reflection_amplitude=amplitude,
        attenuation_mu_db=_number(doc, "attenuation_mu_db", "attenuation_mu_db", 3.0),
        alpha=alpha,
        noise_dbm=_number(doc, "noise_dbm", "noise_dbm", -90.0),
        ref_distance_m=ref_distance,
        serving_density=serving_density,
        interfering_densities=interfering,
        tier_powers_w=powers,
        interferer_distances_m=distances,
        layout=layout,
        sweep=sweep,
        description=description,
    )


def parse_scenario(text: str) -> Scenario:
    """Parse a JSON scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioValidationError("$", f"malformed JSON: {e.msg} (line {e.lineno})") from e
    return scenario_from_dict(doc)


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    """Normalized document with every default spelled out."""
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": scenario.name,
        "architecture": scenario.architecture.value,
        "carrier_ghz": scenario.carrier_ghz,
        "tx_power_w": scenario.tx_power_w,
        "uav_altitude_m": scenario.uav_altitude_m,
        "irs_elements": scenario.irs_elements,
        "irs_gains_db": list(scenario.irs_gains_db),
        "angles_deg": list(scenario.angles_deg),
        "reflection_amplitude": scenario.reflection_amplitude,
        "attenuation_mu_db": scenario.attenuation_mu_db,
        "alpha": scenario.alpha,
        "noise_dbm": scenario.noise_dbm,
        "ref_distance_m": scenario.ref_distance_m,
        "densities_per_m2": {
            "serving": scenario.serving_density,
            "interfering": list(scenario.interfering_densities),
        },
        "tier_powers_w": list(scenario.tier_powers_w),
        "interferer_distances_m": list(scenario.interferer_distances_m),
        "sweep_db": {
            "start": scenario.sweep.start,
            "stop": scenario.sweep.stop,
            "step": scenario.sweep.step,
        },
    }
    if scenario.description:
        doc["description"] = scenario.description
    if scenario.layout is not None:
        doc["layout"] = {key: getattr(scenario.layout, key).as_list() for key in LAYOUT_KEYS}
    return doc


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical JSON text (sorted keys, indent 2, trailing newline)."""
    return json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + "\n"


def scenario_hash(scenario: Scenario) -> str:
    """SHA-256 of the canonical text."""
    return hashlib.sha256(serialize_scenario(scenario).encode("utf-8")).hexdigest()


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        text = f.read()
    scenario = parse_scenario(text)
    logger.debug("loaded scenario '%s' from %s", scenario.name, path)
    return scenario
