"""Scenario -> geometry -> link budget -> coverage model."""

import math
from dataclasses import dataclass

from uav_coverage.core.coverage import CoverageModel, TierParams
from uav_coverage.core.geometry import NodeLayout, cascade_distances, default_layout, distance
from uav_coverage.core.link_budget import (
    ConventionalLink,
    InterferenceSum,
    IrsLink,
    aggregate_interference,
    conventional_rx_power,
    interferer_power,
    irs_rx_power,
    sinr,
)
from uav_coverage.core.units import Frequency, db_to_linear, dbm_to_watts
from uav_coverage.scenarios.schema import Architecture, Scenario


@dataclass(frozen=True)
class DerivedScenario:
    """Everything computed from a scenario on the way to its coverage model."""

    scenario: Scenario
    layout: NodeLayout
    link: ConventionalLink | IrsLink
    rx_power: float
    interference: InterferenceSum
    noise_w: float
    downlink_sinr: float
    model: CoverageModel
    serving_distance: float


def scenario_layout(scenario: Scenario) -> NodeLayout:
    return scenario.layout or default_layout(scenario.uav_altitude_m)


def build_link(scenario: Scenario, layout: NodeLayout) -> ConventionalLink | IrsLink:
    carrier = Frequency.from_ghz(scenario.carrier_ghz)
    if scenario.architecture is Architecture.CONVENTIONAL_UAV:
        return ConventionalLink(
            tx_power=scenario.tx_power_w,
            carrier=carrier,
            attenuation_linear=db_to_linear(scenario.attenuation_mu_db),
            tx_rx_distance=distance(layout.uav_or_irs, layout.user),
            ref_distance=scenario.ref_distance_m,
        )

    d1, d2 = cascade_distances(layout)
    theta_t, theta_r = (math.radians(a) for a in scenario.angles_deg)
    g_t, g_r = (db_to_linear(g) for g in scenario.irs_gains_db)
    return IrsLink.half_wavelength_elements(
        carrier,
        feed_power=scenario.tx_power_w,
        elements_m=scenario.irs_elements,
        elements_n=scenario.irs_elements,
        tx_gain_linear=g_t,
        rx_gain_linear=g_r,
        incidence_angle=theta_t,
        departure_angle=theta_r,
        reflection_amplitude_sq=scenario.reflection_amplitude**2,
        d1=d1,
        d2=d2,
    )


def derive_model(scenario: Scenario, threshold: float = 1.0) -> DerivedScenario:
    """
    Build the coverage model of a scenario.

    The downlink SINR feeding the closed form is the deterministic link-budget SINR at the
    scenario geometry; interferers go through the conventional path loss at their
    configured distances.
    """
    layout = scenario_layout(scenario)
    link = build_link(scenario, layout)

    if isinstance(link, IrsLink):
        rx_power = irs_rx_power(link)
        serving_distance = link.d2
    else:
        rx_power = conventional_rx_power(link)
        serving_distance = link.tx_rx_distance

    carrier = Frequency.from_ghz(scenario.carrier_ghz)
    mu = db_to_linear(scenario.attenuation_mu_db)
    interference = aggregate_interference(
        interferer_power(power, carrier, mu, dist, scenario.ref_distance_m)
        for power, dist in zip(scenario.tier_powers_w, scenario.interferer_distances_m)
    )
    noise_w = dbm_to_watts(scenario.noise_dbm)
    downlink_sinr = sinr(rx_power, interference, noise_w)

    model = CoverageModel(
        serving=TierParams(scenario.serving_density, scenario.tx_power_w),
        interferers=tuple(
            TierParams(density, power)
            for density, power in zip(scenario.interfering_densities, scenario.tier_powers_w)
        ),
        threshold=threshold,
        alpha=scenario.alpha,
        noise_variance=noise_w,
        downlink_sinr=downlink_sinr,
    )
    return DerivedScenario(
        scenario=scenario,
        layout=layout,
        link=link,
        rx_power=rx_power,
        interference=interference,
        noise_w=noise_w,
        downlink_sinr=downlink_sinr,
        model=model,
        serving_distance=serving_distance,
    )
