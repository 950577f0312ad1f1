import math

import numpy as np
import pytest

from uav_coverage.core.exceptions import (
    DegenerateGeometryError,
    DomainError,
    OutOfModelError,
    ZeroGainError,
)
from uav_coverage.core.link_budget import (
    ConventionalLink,
    InterferenceSum,
    IrsLink,
    aggregate_interference,
    conventional_rx_power,
    interferer_power,
    irs_rx_power,
    scattering_gain,
    sinr,
)
from uav_coverage.core.units import Frequency, db_to_linear, watts_to_dbm

CARRIER = Frequency.from_ghz(2.0)
MU = db_to_linear(3.0)


def _conv(tx_power=0.5, d=200.0, mu=MU, carrier=CARRIER):
    return ConventionalLink(
        tx_power=tx_power, carrier=carrier, attenuation_linear=mu, tx_rx_distance=d
    )


def _irs(**overrides):
    params = dict(
        feed_power=0.1,
        elements_m=32,
        elements_n=32,
        tx_gain_linear=100.0,
        rx_gain_linear=100.0,
        incidence_angle=math.radians(45),
        departure_angle=math.radians(45),
        reflection_amplitude_sq=0.81,
        d1=100.0,
        d2=223.66,
    )
    params.update(overrides)
    return IrsLink.half_wavelength_elements(CARRIER, **params)


class TestConventional:
    def test_reference_link(self):
        rx = conventional_rx_power(_conv())
        assert rx == pytest.approx(8.914e-10, rel=1e-3)
        assert watts_to_dbm(rx) == pytest.approx(-60.50, abs=0.01)

    def test_linear_in_power(self):
        assert conventional_rx_power(_conv(tx_power=1.0)) == pytest.approx(
            2 * conventional_rx_power(_conv(tx_power=0.5)), rel=1e-15
        )

    def test_constants_cancel_at_reference_distance(self):
        k0 = CARRIER.free_space_constant()
        link = _conv(tx_power=k0, d=1.0, mu=1.0)
        assert conventional_rx_power(link) == pytest.approx(1.0, rel=1e-12)

    def test_power_law_on_random_inputs(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            p, d, k = rng.uniform(0.1, 10), rng.uniform(1, 1000), rng.uniform(1.1, 5)
            base = conventional_rx_power(_conv(tx_power=p, d=d))
            assert conventional_rx_power(_conv(tx_power=k * p, d=d)) == pytest.approx(
                k * base, rel=1e-12
            )
            assert conventional_rx_power(_conv(tx_power=p, d=k * d)) == pytest.approx(
                base / k**2, rel=1e-12
            )

    def test_below_reference_distance(self):
        with pytest.raises(OutOfModelError) as exc_info:
            conventional_rx_power(_conv(d=0.5))
        assert exc_info.value.distance == 0.5

    def test_invalid_link(self):
        with pytest.raises(DomainError):
            _conv(tx_power=0.0)
        with pytest.raises(DomainError):
            _conv(mu=-1.0)

    def test_macro_interferer_at_400m(self):
        assert interferer_power(30.0, CARRIER, MU, 400.0) == pytest.approx(1.3371e-8, rel=1e-3)


class TestScattering:
    def test_half_wavelength_elements(self):
        lam = CARRIER.wavelength
        assert scattering_gain(lam / 2, lam / 2, lam) == pytest.approx(math.pi, rel=1e-12)

    def test_full_wavelength_elements(self):
        assert scattering_gain(0.3, 0.3, 0.3) == pytest.approx(4 * math.pi, rel=1e-12)

    def test_numeric_cancellation(self):
        assert scattering_gain(0.075, 0.075, 0.15) == pytest.approx(math.pi, rel=1e-12)

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            scattering_gain(0.0, 0.1, 0.1)


class TestIrs:
    def test_regression_value(self):
        assert irs_rx_power(_irs()) == pytest.approx(1.696273e-7, rel=1e-4)

    def test_element_scaling(self):
        base = irs_rx_power(_irs())
        doubled = irs_rx_power(_irs(elements_m=64, elements_n=64))
        assert doubled / base == pytest.approx(16.0, rel=1e-12)
        assert 10 * math.log10(doubled / base) == pytest.approx(12.04, abs=0.01)
        single = irs_rx_power(_irs(elements_m=1, elements_n=1))
        assert base / single == pytest.approx(32.0**4, rel=1e-12)

    def test_inverse_square_in_both_hops(self):
        base = irs_rx_power(_irs())
        assert irs_rx_power(_irs(d1=200.0)) == pytest.approx(base / 4, rel=1e-12)
        assert irs_rx_power(_irs(d2=2 * 223.66)) == pytest.approx(base / 4, rel=1e-12)

    def test_matches_direct_evaluation(self):
        link = _irs()
        lam = CARRIER.wavelength
        cos_product = math.cos(math.radians(45)) ** 2
        assert cos_product == pytest.approx(0.5, rel=1e-15)
        expected = (
            (lam / 2) ** 2 * lam**2 * 32**4 * 1e4 * math.pi * cos_product * 0.81
            / ((100.0 * 223.66) ** 2 * 64 * math.pi**3)
            * 0.1
        )
        assert irs_rx_power(link) == pytest.approx(expected, rel=1e-12)

    def test_grazing_angle(self):
        with pytest.raises(ZeroGainError) as exc_info:
            irs_rx_power(_irs(incidence_angle=math.pi / 2))
        assert exc_info.value.name == "incidence_angle"
        with pytest.raises(ZeroGainError):
            irs_rx_power(_irs(departure_angle=2.0))

    def test_zero_hop_length(self):
        with pytest.raises(DegenerateGeometryError):
            irs_rx_power(_irs(d1=0.0))
        with pytest.raises(DegenerateGeometryError):
            irs_rx_power(_irs(d2=0.0))

    def test_invalid_link(self):
        with pytest.raises(DomainError):
            _irs(elements_m=0)
        with pytest.raises(DomainError):
            _irs(reflection_amplitude_sq=1.5)


class TestSinr:
    def test_noise_limited(self):
        assert sinr(1e-9, InterferenceSum(), 1e-12) == pytest.approx(1000.0, rel=1e-12)

    def test_equal_powers(self):
        assert sinr(1e-12, InterferenceSum(0.0), 1e-12) == pytest.approx(1.0, rel=1e-12)

    def test_interference_limited(self):
        assert sinr(8.921e-10, InterferenceSum(9e-10), 1e-12) == pytest.approx(0.9901, abs=1e-4)

    def test_monotonicity(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            rx, i, n = rng.uniform(1e-12, 1e-9, 3)
            assert sinr(rx * 1.5, InterferenceSum(i), n) > sinr(rx, InterferenceSum(i), n)
            assert sinr(rx, InterferenceSum(i * 1.5), n) < sinr(rx, InterferenceSum(i), n)

    def test_rejects_non_positive_noise(self):
        with pytest.raises(DomainError):
            sinr(1e-9, InterferenceSum(), 0.0)


class TestAggregate:
    def test_empty(self):
        assert aggregate_interference([]).total == 0.0

    def test_sum(self):
        assert aggregate_interference([1e-10, 2e-10]).total == pytest.approx(3e-10, rel=1e-15)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            aggregate_interference([1e-10, -1e-12])
