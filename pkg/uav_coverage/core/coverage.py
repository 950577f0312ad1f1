"""
Coverage probability of a downlink served by one tier amid Poisson interfering tiers.

Three evaluations are offered:
- the closed-form corollary driven by a deterministic downlink SINR,
- the radial integral of the coverage theorem (Rayleigh fading, PPP interferers),
- the Monte Carlo oracle (see mc_oracle), selected through sweep().
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
from scipy import integrate

from uav_coverage.core.exceptions import (
    CoverageError,
    DegenerateModelError,
    DomainError,
    NumericalError,
    SweepPointError,
)
from uav_coverage.core.units import db_to_linear

logger = logging.getLogger("uav_coverage.coverage")

DEFAULT_TOLERABLE_COVERAGE = 0.55


class Method(str, Enum):
    """Evaluation method; values are the command-line spellings."""

    CLOSED_FORM = "closed-form"
    INTEGRAL = "integral"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class TierParams:
    """Density (nodes per m^2) and transmit power (W) of one tier."""

    density: float
    tx_power: float

    def __post_init__(self):
        for name in ("density", "tx_power"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"tier {name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class CoverageModel:
    """
    Inputs of the coverage theorem and its corollary.

    threshold and downlink_sinr are linear ratios; noise_variance is in watts and only
    enters the noise-augmented integral and the oracle.
    """

    serving: TierParams
    interferers: tuple[TierParams, ...]
    threshold: float
    alpha: float
    noise_variance: float = 0.0
    downlink_sinr: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple(self.interferers))
        if not math.isfinite(self.threshold) or self.threshold <= 0:
            raise DomainError(f"threshold must be positive, got {self.threshold!r}")
        if not math.isfinite(self.alpha) or self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not math.isfinite(self.noise_variance) or self.noise_variance < 0:
            raise DomainError(f"noise_variance must be non-negative, got {self.noise_variance!r}")
        if not math.isfinite(self.downlink_sinr) or self.downlink_sinr <= 0:
            raise DomainError(f"downlink_sinr must be positive, got {self.downlink_sinr!r}")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    @property
    def interfering_density(self) -> float:
        return sum(tier.density for tier in self.interferers)

    def with_threshold(self, threshold: float) -> "CoverageModel":
        return replace(self, threshold=threshold)


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances of the radial quadrature and the Gaussian-tail truncation."""

    epsabs: float = 1e-14
    epsrel: float = 1e-8
    limit: int = 200
    tail_tolerance: float = 1e-12

    def __post_init__(self):
        if self.epsabs < 0 or self.epsrel < 0 or (self.epsabs == 0 and self.epsrel == 0):
            raise DomainError("quadrature tolerances must be non-negative and not both zero")
        if self.limit < 1:
            raise DomainError(f"quadrature limit must be >= 1, got {self.limit!r}")
        if not 0 < self.tail_tolerance < 1:
            raise DomainError(f"tail_tolerance must lie in (0, 1), got {self.tail_tolerance!r}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "epsabs": self.epsabs,
            "epsrel": self.epsrel,
            "limit": self.limit,
            "tail_tolerance": self.tail_tolerance,
        }


@dataclass(frozen=True)
class CoverageResult:
    """Integral evaluation with its quadrature provenance."""

    probability: float
    raw: float
    abserr: float
    truncation_radius: float
    method: Method = Method.INTEGRAL


@dataclass(frozen=True)
class CoverageCurve:
    """Ordered (threshold_dB, p_cov) samples of one method for one scenario."""

    method: Method
    samples: tuple[tuple[float, float], ...]
    scenario_name: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple((float(t), float(p)) for t, p in self.samples))
        thresholds = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise DomainError("curve thresholds must be strictly increasing")
        for t, p in self.samples:
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"coverage probability {p!r} at {t:g} dB is outside [0, 1]")

    @property
    def thresholds_db(self) -> list[float]:
        return [t for t, _ in self.samples]

    @property
    def probabilities(self) -> list[float]:
        return [p for _, p in self.samples]

    def __len__(self) -> int:
        return len(self.samples)


def _clamp_probability(value: float) -> float:
    return min(1.0, max(0.0, value))


def coverage_closed_form(model: CoverageModel) -> float:
    """P = 1 - exp(-pi * S_D^(2/a) * lambda_j * S_thr^(-2/a) / sum(lambda_i))."""
    total_density = model.interfering_density
    if total_density <= 0:
        raise DegenerateModelError("closed form needs at least one interfering tier")
    delta = model.delta
    exponent = (
        math.pi
        * model.downlink_sinr**delta
        * model.serving.density
        * model.threshold ** (-delta)
        / total_density
    )
    return _clamp_probability(-math.expm1(-exponent))


def laplace_interference(s: float, tiers: Sequence[TierParams], alpha: float) -> float:
    """Laplace functional of the faded PPP interference, exp(-s^(2/a) * sum(lambda P^(2/a)))."""
    if not math.isfinite(s) or s < 0:
        raise DomainError(f"Laplace argument must be non-negative, got {s!r}")
    if not math.isfinite(alpha) or alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    delta = 2.0 / alpha
    weight = sum(tier.density * tier.tx_power**delta for tier in tiers)
    return math.exp(-(s**delta) * weight)


def gaussian_coefficient(model: CoverageModel) -> float:
    """Coefficient c of the Gaussian envelope exp(-c r^2) of the radial integrand."""
    ratio = model.threshold / model.serving.tx_power
    weight = sum(tier.density * tier.tx_power**model.delta for tier in model.interferers)
    return ratio**model.delta * weight + ratio


def radial_integrand(model: CoverageModel, r, include_noise: bool = False):
    """Integrand of the coverage theorem at serving distance r (array-friendly)."""
    r = np.asarray(r, dtype=float)
    ratio = model.threshold / model.serving.tx_power
    value = np.exp(-gaussian_coefficient(model) * r**2)
    if include_noise and model.noise_variance > 0:
        value = value * np.exp(-ratio * model.noise_variance * r**model.alpha)
    return value if value.ndim else float(value)


def truncation_radius(model: CoverageModel, quad: QuadratureSettings) -> float:
    """Radius beyond which the integral tail adds less than quad.tail_tolerance to P_cov."""
    c = gaussian_coefficient(model)
    eps = quad.tail_tolerance * min(1.0, c / (math.pi * model.serving.density))
    return math.sqrt(math.log(1.0 / eps) / c)


def radial_integral(
    model: CoverageModel,
    quad: QuadratureSettings | None = None,
    include_noise: bool = False,
) -> tuple[float, float, float]:
    """
    Evaluate 2*pi * int_0^R r * f(r) dr by adaptive quadrature.

    Returns:
        (value, abserr, truncation_radius)

    Raises:
        NumericalError: if the requested tolerance is not reached.
    """
    quad = quad or QuadratureSettings()
    radius = truncation_radius(model, quad)

    def polar(r: float) -> float:
        return 2.0 * math.pi * r * radial_integrand(model, r, include_noise)

    result = integrate.quad(
        polar,
        0.0,
        radius,
        epsabs=quad.epsabs,
        epsrel=quad.epsrel,
        limit=quad.limit,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3:
        raise NumericalError(f"radial quadrature did not converge: {result[3]}", abserr)
    if not math.isfinite(value):
        raise NumericalError("radial quadrature returned a non-finite value", abserr)
    return value, abserr, radius


def coverage_integral(
    model: CoverageModel,
    quad: QuadratureSettings | None = None,
    include_noise: bool = False,
) -> CoverageResult:
    """P = 1 - lambda_j * int_{R^2} f(||q||) dq, clamped to [0, 1] for reporting."""
    value, abserr, radius = radial_integral(model, quad, include_noise)
    raw = 1.0 - model.serving.density * value
    return CoverageResult(
        probability=_clamp_probability(raw),
        raw=raw,
        abserr=model.serving.density * abserr,
        truncation_radius=radius,
    )


def tolerable_threshold(
    curve: CoverageCurve, level: float = DEFAULT_TOLERABLE_COVERAGE
) -> float | None:
    """Largest threshold (dB) at which coverage is still >= level, or None."""
    passing = [t for t, p in curve.samples if p >= level]
    return max(passing) if passing else None


def _check_thresholds(thresholds_db: Sequence[float]) -> list[float]:
    thresholds = [float(t) for t in thresholds_db]
    for t in thresholds:
        if not math.isfinite(t):
            raise DomainError(f"threshold must be finite, got {t!r}")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise DomainError("sweep thresholds must be strictly increasing")
    return thresholds


def sweep(
    model_template: CoverageModel,
    thresholds_db: Sequence[float],
    method: Method | str = Method.CLOSED_FORM,
    quad: QuadratureSettings | None = None,
    oracle=None,
    workers: int = 1,
    scenario_name: str = "",
    include_noise: bool = False,
) -> CoverageCurve:
    """
    Evaluate coverage at every threshold of the grid.

    Args:
        model_template: model whose threshold is replaced point by point
        thresholds_db: strictly increasing grid in dB
        method: closed-form, integral or mc
        quad: quadrature settings for the integral method
        oracle: OracleSettings for the mc method
        workers: thread count for closed-form/integral points; output order is preserved
        scenario_name: provenance label
        include_noise: use the noise-augmented integrand

    Raises:
        SweepPointError: wrapping the first failing point
    """
    method = Method(method)
    thresholds = _check_thresholds(thresholds_db)
    metadata: dict[str, Any] = {"method": method.value}

    if not thresholds:
        return CoverageCurve(method, (), scenario_name, metadata)

    if method is Method.MONTE_CARLO:
        return _sweep_monte_carlo(model_template, thresholds, oracle, scenario_name, metadata)

    quad = quad or QuadratureSettings()
    if method is Method.INTEGRAL:
        metadata["quadrature"] = quad.as_dict()
        metadata["include_noise"] = include_noise

    def evaluate(threshold_db: float) -> tuple[float, float | None]:
        try:
            model = model_template.with_threshold(db_to_linear(threshold_db))
            if method is Method.CLOSED_FORM:
                return coverage_closed_form(model), None
            result = coverage_integral(model, quad, include_noise)
            return result.probability, result.raw
        except CoverageError as e:
            raise SweepPointError(threshold_db, e) from e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, thresholds))
    else:
        values = [evaluate(t) for t in thresholds]

    if method is Method.INTEGRAL:
        metadata["raw_values"] = [raw for _, raw in values]
    samples = tuple((t, p) for t, (p, _) in zip(thresholds, values))
    logger.debug("sweep method=%s points=%d", method.value, len(samples))
    return CoverageCurve(method, samples, scenario_name, metadata)


def _sweep_monte_carlo(
    model_template: CoverageModel,
    thresholds: list[float],
    oracle,
    scenario_name: str,
    metadata: dict[str, Any],
) -> CoverageCurve:
    from uav_coverage.core import mc_oracle

    oracle = oracle or mc_oracle.OracleSettings()
    linear = [db_to_linear(t) for t in thresholds]
    try:
        samples = mc_oracle.empirical_sweep(model_template, linear, oracle)
    except CoverageError as e:
        # thresholds are strictly increasing; the serving disc is planned at the lowest one
        raise SweepPointError(min(thresholds), e) from e

    estimates = [sample.primary for sample in samples]
    metadata.update(mc_oracle.settings_metadata(oracle))
    metadata["half_widths_99"] = [e.half_width_99 for e in estimates]
    tail_bounds = [s.tail_bound for s in samples if s.tail_bound is not None]
    if tail_bounds:
        metadata["max_tail_bound"] = max(tail_bounds)
    points = tuple((t, e.p_cov) for t, e in zip(thresholds, estimates))
    return CoverageCurve(Method.MONTE_CARLO, points, scenario_name, metadata)
