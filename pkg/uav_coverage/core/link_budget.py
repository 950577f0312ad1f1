"""Received power and SINR for the conventional and IRS-assisted downlinks."""

import math
from collections.abc import Iterable
from dataclasses import dataclass

from uav_coverage.core.exceptions import (
    DegenerateGeometryError,
    DomainError,
    OutOfModelError,
    ZeroGainError,
)
from uav_coverage.core.units import Frequency


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ConventionalLink:
    """Direct UAV -> user link with free-space loss and a lumped attenuation factor."""

    tx_power: float
    carrier: Frequency
    attenuation_linear: float
    tx_rx_distance: float
    ref_distance: float = 1.0

    def __post_init__(self):
        _positive(self.tx_power, "tx_power")
        _positive(self.attenuation_linear, "attenuation_linear")
        _positive(self.tx_rx_distance, "tx_rx_distance")
        _positive(self.ref_distance, "ref_distance")


@dataclass(frozen=True)
class IrsLink:
    """
    BS -> IRS -> user cascade in the far field.

    Angles are in radians, gains and reflection amplitude are linear.
    """

    feed_power: float
    carrier: Frequency
    element_len_x: float
    element_len_y: float
    elements_m: int
    elements_n: int
    tx_gain_linear: float
    rx_gain_linear: float
    incidence_angle: float
    departure_angle: float
    reflection_amplitude_sq: float
    d1: float
    d2: float

    def __post_init__(self):
        _positive(self.feed_power, "feed_power")
        _positive(self.element_len_x, "element_len_x")
        _positive(self.element_len_y, "element_len_y")
        _positive(self.tx_gain_linear, "tx_gain_linear")
        _positive(self.rx_gain_linear, "rx_gain_linear")
        for name in ("elements_m", "elements_n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
        if not 0 < self.reflection_amplitude_sq <= 1:
            raise DomainError(
                f"reflection_amplitude_sq must lie in (0, 1], got {self.reflection_amplitude_sq!r}"
            )
        for name in ("incidence_angle", "departure_angle"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be a finite non-negative angle, got {value!r}")
        for name in ("d1", "d2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and non-negative, got {value!r}")

    @classmethod
    def half_wavelength_elements(cls, carrier: Frequency, **kwargs) -> "IrsLink":
        """Build a link whose elements are lambda/2 on both sides."""
        half = carrier.wavelength / 2.0
        return cls(carrier=carrier, element_len_x=half, element_len_y=half, **kwargs)


@dataclass(frozen=True)
class InterferenceSum:
    """Total interference power at the user, watts."""

    total: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.total) or self.total < 0:
            raise DomainError(f"interference must be finite and non-negative, got {self.total!r}")


def conventional_rx_power(link: ConventionalLink) -> float:
    """P_r = P_t / (K0 * d^2 * mu)."""
    if link.tx_rx_distance < link.ref_distance:
        raise OutOfModelError(link.tx_rx_distance, link.ref_distance)
    k0 = link.carrier.free_space_constant(link.ref_distance)
    return link.tx_power / (k0 * link.tx_rx_distance**2 * link.attenuation_linear)


def interferer_power(
    tx_power: float,
    carrier: Frequency,
    attenuation_linear: float,
    distance: float,
    ref_distance: float = 1.0,
) -> float:
    """Power received from one interfering node through the conventional path loss."""
    link = ConventionalLink(
        tx_power=tx_power,
        carrier=carrier,
        attenuation_linear=attenuation_linear,
        tx_rx_distance=distance,
        ref_distance=ref_distance,
    )
    return conventional_rx_power(link)


def scattering_gain(d_x: float, d_y: float, wavelength: float) -> float:
    """G_sct = 4*pi*d_x*d_y / lambda^2."""
    d_x = _positive(d_x, "d_x")
    d_y = _positive(d_y, "d_y")
    wavelength = _positive(wavelength, "wavelength")
    return 4.0 * math.pi * d_x * d_y / wavelength**2


def irs_rx_power(link: IrsLink) -> float:
    """
    Received power of the IRS cascade.

    P_r = d_x d_y lambda^2 M^2 N^2 G_t G_r G_sct cos(theta_t) cos(theta_r) A^2
          / ((d1 d2)^2 64 pi^3) * P_feed
    """
    if link.d1 == 0:
        raise DegenerateGeometryError("micro_bs", "uav_or_irs")
    if link.d2 == 0:
        raise DegenerateGeometryError("uav_or_irs", "user")

    cos_t = math.cos(link.incidence_angle)
    cos_r = math.cos(link.departure_angle)
    if cos_t <= 1e-15:
        raise ZeroGainError("incidence_angle", link.incidence_angle)
    if cos_r <= 1e-15:
        raise ZeroGainError("departure_angle", link.departure_angle)

    lam = link.carrier.wavelength
    g_sct = scattering_gain(link.element_len_x, link.element_len_y, lam)
    numerator = (
        link.element_len_x
        * link.element_len_y
        * lam**2
        * (link.elements_m * link.elements_n) ** 2
        * link.tx_gain_linear
        * link.rx_gain_linear
        * g_sct
        * cos_t
        * cos_r
        * link.reflection_amplitude_sq
    )
    denominator = (link.d1 * link.d2) ** 2 * 64.0 * math.pi**3
    return numerator / denominator * link.feed_power


def aggregate_interference(contributions: Iterable[float]) -> InterferenceSum:
    """Sum the interfering powers."""
    total = 0.0
    for value in contributions:
        value = float(value)
        if not math.isfinite(value) or value < 0:
            raise DomainError(f"interference contribution must be non-negative, got {value!r}")
        total += value
    return InterferenceSum(total)


def sinr(rx_power: float, interference: InterferenceSum, noise: float) -> float:
    """rx / (interference + noise)."""
    rx_power = _positive(rx_power, "rx_power")
    noise = float(noise)
    if not math.isfinite(noise) or noise <= 0:
        raise DomainError(f"noise power must be positive, got {noise!r}")
    return rx_power / (interference.total + noise)
