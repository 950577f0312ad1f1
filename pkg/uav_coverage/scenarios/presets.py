"""Bundled scenarios for every sub-figure of the comparative study."""

from uav_coverage.core.exceptions import CatalogError
from uav_coverage.scenarios.schema import (
    IRS_GAIN_MMWAVE_DB,
    IRS_GAIN_SUB6_DB,
    Architecture,
    Scenario,
    SweepRange,
)

SUB6_GHZ = 2.0
MMWAVE_CARRIERS_GHZ = (30.0, 55.0, 80.0, 100.0)
DEFAULT_SWEEP = SweepRange(-10.0, 30.0, 1.0)
WIDE_SWEEP = SweepRange(-10.0, 60.0, 1.0)


def _conventional(name: str, tx_power_w: float, altitude_m: float, carrier_ghz: float) -> Scenario:
    gain = IRS_GAIN_SUB6_DB if carrier_ghz == SUB6_GHZ else IRS_GAIN_MMWAVE_DB
    return Scenario(
        name=name,
        architecture=Architecture.CONVENTIONAL_UAV,
        carrier_ghz=carrier_ghz,
        tx_power_w=tx_power_w,
        uav_altitude_m=altitude_m,
        irs_gains_db=(gain, gain),
        sweep=DEFAULT_SWEEP,
    )


def _irs(
    name: str,
    feed_power_w: float,
    altitude_m: float,
    carrier_ghz: float,
    elements: int,
    sweep: SweepRange = DEFAULT_SWEEP,
) -> Scenario:
    gain = IRS_GAIN_SUB6_DB if carrier_ghz == SUB6_GHZ else IRS_GAIN_MMWAVE_DB
    return Scenario(
        name=name,
        architecture=Architecture.IRS_UAV,
        carrier_ghz=carrier_ghz,
        tx_power_w=feed_power_w,
        uav_altitude_m=altitude_m,
        irs_elements=elements,
        irs_gains_db=(gain, gain),
        sweep=sweep,
    )


def _fig1(panel: str, irs_power_w: float, altitude_m: float, elements: int) -> list[Scenario]:
    return [
        _conventional(f"fig1{panel}_conv_0.5W", 0.5, altitude_m, SUB6_GHZ),
        _conventional(f"fig1{panel}_conv_1W", 1.0, altitude_m, SUB6_GHZ),
        _irs(f"fig1{panel}_irs_{irs_power_w:g}W", irs_power_w, altitude_m, SUB6_GHZ, elements),
    ]


def _fig2(panel: str, tx_power_w: float, altitude_m: float) -> list[Scenario]:
    return [
        _conventional(f"fig2{panel}_{carrier:g}GHz", tx_power_w, altitude_m, carrier)
        for carrier in MMWAVE_CARRIERS_GHZ
    ]


def _fig3(panel: str, elements: int, altitude_m: float) -> list[Scenario]:
    return [
        _irs(f"fig3{panel}_{carrier:g}GHz", 4.0, altitude_m, carrier, elements, WIDE_SWEEP)
        for carrier in MMWAVE_CARRIERS_GHZ
    ]


def _build_catalog() -> dict[str, Scenario]:
    scenarios = [
        *_fig1("a", 0.1, 200.0, 32),
        *_fig1("b", 0.2, 200.0, 32),
        *_fig1("c", 0.2, 100.0, 32),
        *_fig1("d", 0.1, 200.0, 64),
        *_fig2("a", 6.0, 100.0),
        *_fig2("b", 8.0, 100.0),
        *_fig2("c", 6.0, 50.0),
        *_fig2("d", 8.0, 50.0),
        *_fig3("a", 128, 100.0),
        *_fig3("b", 128, 50.0),
        *_fig3("c", 256, 100.0),
        *_fig3("d", 256, 50.0),
    ]
    return {scenario.name: scenario for scenario in scenarios}


PRESETS: dict[str, Scenario] = _build_catalog()

ALIASES: dict[str, str] = {
    "fig1c": "fig1c_irs_0.2W",
    "fig1d": "fig1d_irs_0.1W",
    **{f"fig{fig}{panel}": f"fig{fig}{panel}_30GHz" for fig in (2, 3) for panel in "abcd"},
}

GROUPS: dict[str, list[str]] = {
    f"fig{fig}{panel}": [name for name in PRESETS if name.startswith(f"fig{fig}{panel}_")]
    for fig in (1, 2, 3)
    for panel in "abcd"
}


def preset_names() -> list[str]:
    """Canonical preset names in catalog order."""
    return list(PRESETS)


def preset(name: str) -> Scenario:
    """Look up a preset by canonical name or alias."""
    key = ALIASES.get(name, name)
    if key not in PRESETS:
        raise CatalogError(name, preset_names())
    return PRESETS[key]


def preset_group(group: str) -> list[Scenario]:
    """All members of one sub-figure, e.g. 'fig1a'."""
    if group not in GROUPS:
        raise CatalogError(group, sorted(GROUPS))
    return [PRESETS[name] for name in GROUPS[group]]
