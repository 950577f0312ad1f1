"""Unit conversions and physical constants.

Everything crossing a module boundary is in linear SI units (watts, meters, hertz).
Decibel quantities only appear when parsing scenarios and when writing reports.
"""

import math
from dataclasses import dataclass

from scipy.constants import speed_of_light

from uav_coverage.core.exceptions import DomainError

SPEED_OF_LIGHT = float(speed_of_light)  # exact SI value, 299 792 458 m/s


def _finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def db_to_linear(x: float) -> float:
    """Power ratio in dB to linear ratio, 10^(x/10)."""
    return 10.0 ** (_finite(x, "dB value") / 10.0)


def linear_to_db(x: float) -> float:
    """Linear power ratio to dB."""
    x = _finite(x, "linear ratio")
    if x <= 0:
        raise DomainError(f"linear ratio must be positive, got {x!r}")
    return 10.0 * math.log10(x)


def dbm_to_watts(x: float) -> float:
    """Power in dBm to watts."""
    return 10.0 ** ((_finite(x, "dBm value") - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    """Power in watts to dBm."""
    return linear_to_db(w) + 30.0


def wavelength(hertz: float) -> float:
    """Free-space wavelength in meters."""
    hertz = _finite(hertz, "frequency")
    if hertz <= 0:
        raise DomainError(f"frequency must be positive, got {hertz!r} Hz")
    return SPEED_OF_LIGHT / hertz


def free_space_constant(hertz: float, d0: float = 1.0) -> float:
    """K0 = (4*pi*f*d0/c)^2, the free-space loss at the reference distance."""
    hertz = _finite(hertz, "frequency")
    d0 = _finite(d0, "reference distance")
    if hertz <= 0 or d0 <= 0:
        raise DomainError(
            f"frequency and reference distance must be positive, got {hertz!r} Hz, {d0!r} m"
        )
    return (4.0 * math.pi * hertz * d0 / SPEED_OF_LIGHT) ** 2


@dataclass(frozen=True)
class Decibel:
    """Power ratio expressed in dB."""

    value: float

    def __post_init__(self):
        _finite(self.value, "dB value")

    @property
    def linear(self) -> float:
        return db_to_linear(self.value)


@dataclass(frozen=True)
class DbmPower:
    """Absolute power expressed in dBm."""

    value: float

    def __post_init__(self):
        _finite(self.value, "dBm value")

    @property
    def watts(self) -> float:
        return dbm_to_watts(self.value)


@dataclass(frozen=True)
class Frequency:
    """Carrier frequency."""

    hertz: float

    def __post_init__(self):
        if not math.isfinite(self.hertz) or self.hertz <= 0:
            raise DomainError(f"frequency must be positive and finite, got {self.hertz!r} Hz")

    @classmethod
    def from_ghz(cls, ghz: float) -> "Frequency":
        return cls(float(ghz) * 1e9)

    @property
    def ghz(self) -> float:
        return self.hertz / 1e9

    @property
    def wavelength(self) -> float:
        return wavelength(self.hertz)

    def free_space_constant(self, d0: float = 1.0) -> float:
        return free_space_constant(self.hertz, d0)
