"""
Monte Carlo oracle for the coverage theorem.

The user sits at the origin. Interfering tiers are homogeneous PPPs on a disc, every link
carries an independent unit-mean exponential fading mark, and the serving node is either
fixed at a representative distance or drawn from its own PPP.

Trials run in fixed-size blocks; block k draws from rng_stream(seed, k), so aggregate counts
do not depend on how blocks are scheduled across workers.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

import numpy as np
from scipy.special import gamma

from uav_coverage.core.coverage import CoverageModel
from uav_coverage.core.exceptions import (
    DomainError,
    RadiusRequiredError,
    ResourceLimitError,
    UsageError,
)

logger = logging.getLogger("uav_coverage.oracle")

Z_99 = 2.576
DEFAULT_RADIUS_M = 10_000.0
DEFAULT_BLOCK_SIZE = 50_000
DEFAULT_MAX_EXPECTED_POINTS = 1e7
SERVING_TAIL_TOLERANCE = 1e-9


class ServingMode(str, Enum):
    FIXED = "fixed"
    PPP = "ppp"


@dataclass(frozen=True)
class PppField:
    """Points of a homogeneous PPP on a disc centred at the origin, as an (n, 2) array."""

    points: np.ndarray
    density: float
    region_radius: float

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])


@dataclass(frozen=True)
class McEstimate:
    """
    Empirical coverage with its 99% half-width.

    For Bernoulli estimators half_width_99 = 2.576 * sqrt(p(1-p)/trials); the union-bound
    estimator uses the sample variance of the covering count instead and keeps its
    unclamped value in raw.
    """

    p_cov: float
    trials: int
    half_width_99: float
    seed: int
    estimator: str = "fixed"
    raw: float | None = None

    @property
    def low(self) -> float:
        return self.center - self.half_width_99

    @property
    def high(self) -> float:
        return self.center + self.half_width_99

    @property
    def center(self) -> float:
        return self.p_cov if self.raw is None else self.raw

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.low - slack <= value <= self.high + slack


@dataclass(frozen=True)
class OracleSample:
    """Estimates at one threshold; which estimators are present depends on the serving mode."""

    threshold: float
    fixed: McEstimate | None = None
    union_bound: McEstimate | None = None
    max_sinr: McEstimate | None = None
    tail_bound: float | None = None

    @property
    def primary(self) -> McEstimate:
        return self.fixed if self.fixed is not None else self.union_bound


@dataclass(frozen=True)
class OracleSettings:
    """
    Knobs of an oracle run.

    radius: interferer disc radius; None means DEFAULT_RADIUS_M when alpha > 2
    serving_distance: serving node distance for FIXED mode
    serving_radius: serving PPP disc radius for PPP mode; None derives it from a tail bound
    reference_noise: nu, extra noise referred through an r^2 law (nu * r^(2 - alpha))
    include_noise: add the model's noise_variance to the denominator
    fading: draw exponential marks; False forces every mark to 1
    laplace_equivalent: draw interferers at the intensity reproducing the model's
        Laplace functional (alpha > 2 only)
    fixed_interferers: deterministic (distance_m, power_w) interferers added to the field
    """

    trials: int = 100_000
    seed: int = 20240601
    radius: float | None = None
    serving_mode: ServingMode = ServingMode.FIXED
    serving_distance: float = 1.0
    serving_radius: float | None = None
    reference_noise: float = 0.0
    include_noise: bool = True
    fading: bool = True
    laplace_equivalent: bool = True
    fixed_interferers: tuple[tuple[float, float], ...] = ()
    block_size: int = DEFAULT_BLOCK_SIZE
    max_expected_points: float = DEFAULT_MAX_EXPECTED_POINTS
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "serving_mode", ServingMode(self.serving_mode))
        object.__setattr__(
            self, "fixed_interferers", tuple(tuple(item) for item in self.fixed_interferers)
        )
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise DomainError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.block_size < 1:
            raise DomainError(f"block_size must be >= 1, got {self.block_size!r}")
        if self.reference_noise < 0:
            raise DomainError(f"reference_noise must be >= 0, got {self.reference_noise!r}")
        if self.serving_distance <= 0:
            raise DomainError(f"serving_distance must be > 0, got {self.serving_distance!r}")
        for name in ("radius", "serving_radius"):
            value = getattr(self, name)
            if value is not None and (not math.isfinite(value) or value <= 0):
                raise DomainError(f"{name} must be positive, got {value!r}")


def rng_stream(seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for (seed, stream_id); identical inputs give identical draws."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream_id,)))


def laplace_equivalent_density(density: float, alpha: float) -> float:
    """
    Intensity of a Rayleigh-faded PPP whose Laplace functional is exp(-s^(2/a) lambda P^(2/a)).

    lambda / (pi * Gamma(1 + 2/a) * Gamma(1 - 2/a)), defined for alpha > 2 only.
    """
    if alpha <= 2:
        raise DomainError(f"Laplace-equivalent intensity needs alpha > 2, got {alpha!r}")
    delta = 2.0 / alpha
    return density / (math.pi * float(gamma(1.0 + delta)) * float(gamma(1.0 - delta)))


def _check_expected(expected: float, cap: float):
    if expected > cap:
        raise ResourceLimitError(expected, cap)


def _poisson_disc(
    rng: np.random.Generator, mean: float, radius: float, trials: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial Poisson counts and the concatenated radii of uniform points on the disc."""
    counts = rng.poisson(mean, trials)
    # 1 - U lies in (0, 1], keeping every radius strictly positive
    radii = radius * np.sqrt(1.0 - rng.random(int(counts.sum())))
    return counts, radii


def sample_ppp(
    density: float,
    radius: float,
    rng: np.random.Generator,
    max_expected_points: float = DEFAULT_MAX_EXPECTED_POINTS,
) -> PppField:
    """Poisson(density * pi * r^2) points, i.i.d. uniform on the disc."""
    if not math.isfinite(density) or density <= 0:
        raise DomainError(f"density must be positive, got {density!r}")
    if not math.isfinite(radius) or radius < 0:
        raise DomainError(f"radius must be non-negative, got {radius!r}")
    if radius == 0:
        return PppField(np.empty((0, 2)), density, 0.0)

    expected = density * math.pi * radius**2
    _check_expected(expected, max_expected_points)
    _, r = _poisson_disc(rng, expected, radius, 1)
    theta = 2.0 * math.pi * rng.random(r.size)
    points = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return PppField(points, density, radius)


def thin(field: PppField, keep_probability: float, rng: np.random.Generator) -> PppField:
    """Keep each point independently with the given probability."""
    if not 0.0 <= keep_probability <= 1.0:
        raise DomainError(f"keep_probability must lie in [0, 1], got {keep_probability!r}")
    keep = rng.random(field.count) < keep_probability
    return PppField(field.points[keep], field.density * keep_probability, field.region_radius)


def fading_marks(rng: np.random.Generator, size: int, enabled: bool = True) -> np.ndarray:
    """Unit-mean exponential power marks (Rayleigh amplitude), or ones when disabled."""
    if not enabled:
        return np.ones(size)
    return rng.standard_exponential(size)


@dataclass(frozen=True)
class _Plan:
    """Resolved run parameters shared by every block."""

    alpha: float
    serving_power: float
    noise: float
    reference_noise: float
    tiers: tuple[tuple[float, float], ...]  # (sampled density, power)
    radius: float
    mode: ServingMode
    serving_distance: float
    serving_density: float
    serving_radius: float
    fading: bool
    fixed_interference: float
    expected_points: float


@dataclass
class _Tally:
    trials: int
    cover: np.ndarray
    n_sum: np.ndarray | None = None
    n_sq_sum: np.ndarray | None = None

    def __iadd__(self, other: "_Tally") -> "_Tally":
        self.trials += other.trials
        self.cover = self.cover + other.cover
        if self.n_sum is not None:
            self.n_sum = self.n_sum + other.n_sum
            self.n_sq_sum = self.n_sq_sum + other.n_sq_sum
        return self


def _resolve_radius(model: CoverageModel, settings: OracleSettings) -> float:
    if settings.radius is not None:
        if model.alpha <= 2:
            logger.warning(
                "alpha=%g <= 2: interference of the disc grows with its radius, "
                "results depend on radius=%g m",
                model.alpha,
                settings.radius,
            )
        return settings.radius
    if model.alpha <= 2 and model.interferers:
        raise RadiusRequiredError(model.alpha)
    return DEFAULT_RADIUS_M


def _sampled_tiers(model: CoverageModel, settings: OracleSettings):
    use_equivalent = settings.laplace_equivalent and model.alpha > 2
    tiers = []
    for tier in model.interferers:
        density = (
            laplace_equivalent_density(tier.density, model.alpha)
            if use_equivalent
            else tier.density
        )
        tiers.append((density, tier.tx_power))
    return tuple(tiers)


def serving_radius_for(
    model: CoverageModel, threshold: float, settings: OracleSettings
) -> float:
    """
    Serving disc radius beyond which covering nodes add less than SERVING_TAIL_TOLERANCE.

    Uses P(cover at r) <= exp(-(S/P)(nu r^2 + sigma^2 r^a)).
    """
    if settings.serving_radius is not None:
        return settings.serving_radius
    ratio = threshold / model.serving.tx_power
    lam = model.serving.density
    noise = model.noise_variance if settings.include_noise else 0.0
    if ratio > 0 and settings.reference_noise > 0:
        a = ratio * settings.reference_noise
        return math.sqrt(max(math.log(lam * math.pi / (a * SERVING_TAIL_TOLERANCE)), 1.0) / a)
    if ratio > 0 and noise > 0 and model.alpha >= 2:
        # r^a >= r^2 for r >= 1
        b = ratio * noise
        r2 = max(math.log(lam * math.pi / (b * SERVING_TAIL_TOLERANCE)), 1.0) / b
        return max(1.0, math.sqrt(r2))
    raise UsageError(
        "serving PPP radius cannot be bounded without reference or thermal noise; "
        "pass an explicit serving radius"
    )


def truncation_tail_bound(
    model: CoverageModel,
    threshold: float,
    settings: OracleSettings,
    radius: float | None = None,
) -> float | None:
    """
    Upper bound on the coverage error caused by ignoring interferers beyond the disc.

    Missing interference has mean K_r = (S/P) r^a * sum(lambda P_i 2 pi R^(2-a) / (a - 2));
    the error at a serving distance r is at most K_r. Returns None for alpha <= 2 or when the
    serving PPP tail cannot be bounded.
    """
    alpha = model.alpha
    if alpha <= 2:
        return None
    radius = radius if radius is not None else _resolve_radius(model, settings)
    ratio = threshold / model.serving.tx_power
    k = sum(
        density * 2.0 * math.pi * ratio * power * radius ** (2.0 - alpha) / (alpha - 2.0)
        for density, power in _sampled_tiers(model, settings)
    )
    if settings.serving_mode is ServingMode.FIXED:
        return k * settings.serving_distance**alpha

    lam = model.serving.density
    bounds = []
    if settings.reference_noise > 0:
        a = ratio * settings.reference_noise
        bounds.append(lam * math.pi * k * math.gamma(alpha / 2 + 1) / a ** (alpha / 2 + 1))
    noise = model.noise_variance if settings.include_noise else 0.0
    if noise > 0:
        b = ratio * noise
        delta = 2.0 / alpha
        bounds.append(lam * 2.0 * math.pi * k * math.gamma(1 + delta) / (alpha * b ** (1 + delta)))
    return min(bounds) if bounds else None


def _plan(
    model: CoverageModel, thresholds: np.ndarray, settings: OracleSettings
) -> _Plan:
    radius = _resolve_radius(model, settings)
    tiers = _sampled_tiers(model, settings)
    expected = sum(density * math.pi * radius**2 for density, _ in tiers)
    _check_expected(expected, settings.max_expected_points)

    serving_radius = 0.0
    if settings.serving_mode is ServingMode.PPP:
        smallest = float(np.min(thresholds))
        serving_radius = serving_radius_for(model, smallest, settings)
        serving_expected = model.serving.density * math.pi * serving_radius**2
        _check_expected(serving_expected, settings.max_expected_points)
        expected += serving_expected

    fixed_interference = 0.0
    for distance, power in settings.fixed_interferers:
        if distance <= 0 or power < 0:
            raise DomainError(f"fixed interferer ({distance!r}, {power!r}) is invalid")
        fixed_interference += power * distance ** (-model.alpha)

    return _Plan(
        alpha=model.alpha,
        serving_power=model.serving.tx_power,
        noise=model.noise_variance if settings.include_noise else 0.0,
        reference_noise=settings.reference_noise,
        tiers=tiers,
        radius=radius,
        mode=settings.serving_mode,
        serving_distance=settings.serving_distance,
        serving_density=model.serving.density,
        serving_radius=serving_radius,
        fading=settings.fading,
        fixed_interference=fixed_interference,
        expected_points=expected,
    )


def _interference(plan: _Plan, rng: np.random.Generator, n: int) -> np.ndarray:
    total = np.full(n, plan.fixed_interference)
    trial_ids = np.arange(n)
    for density, power in plan.tiers:
        counts, radii = _poisson_disc(rng, density * math.pi * plan.radius**2, plan.radius, n)
        marks = fading_marks(rng, radii.size, plan.fading)
        contributions = marks * power * radii ** (-plan.alpha)
        total += np.bincount(np.repeat(trial_ids, counts), weights=contributions, minlength=n)
    return total


def _sinr(signal: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(denominator > 0, signal / np.where(denominator > 0, denominator, 1.0),
                        np.inf)


def _exceedances(values: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    ordered = np.sort(values)
    return values.size - np.searchsorted(ordered, thresholds, side="right")


def _run_block(
    plan: _Plan, thresholds: np.ndarray, seed: int, block_id: int, n: int
) -> _Tally:
    rng = rng_stream(seed, block_id)
    interference = _interference(plan, rng, n)

    if plan.mode is ServingMode.FIXED:
        r0 = plan.serving_distance
        marks = fading_marks(rng, n, plan.fading)
        signal = marks * plan.serving_power * r0 ** (-plan.alpha)
        denominator = interference + plan.noise + plan.reference_noise * r0 ** (2.0 - plan.alpha)
        return _Tally(n, _exceedances(_sinr(signal, denominator), thresholds))

    serving_mean = plan.serving_density * math.pi * plan.serving_radius**2
    counts, radii = _poisson_disc(rng, serving_mean, plan.serving_radius, n)
    marks = fading_marks(rng, radii.size, plan.fading)
    owners = np.repeat(np.arange(n), counts)
    signal = marks * plan.serving_power * radii ** (-plan.alpha)
    denominator = (
        interference[owners] + plan.noise + plan.reference_noise * radii ** (2.0 - plan.alpha)
    )
    values = _sinr(signal, denominator)

    best = np.zeros(n)
    occupied = counts > 0
    if values.size:
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        best[occupied] = np.maximum.reduceat(values, starts[occupied])
    cover = _exceedances(best[occupied], thresholds)

    n_sum = np.zeros(thresholds.size, dtype=np.int64)
    n_sq_sum = np.zeros(thresholds.size, dtype=np.int64)
    for k, threshold in enumerate(thresholds):
        per_trial = np.bincount(owners[values > threshold], minlength=n)
        n_sum[k] = per_trial.sum()
        n_sq_sum[k] = (per_trial.astype(np.int64) ** 2).sum()
    return _Tally(n, cover, n_sum, n_sq_sum)


def _bernoulli(cover: int, trials: int, seed: int, estimator: str) -> McEstimate:
    p = cover / trials
    return McEstimate(p, trials, Z_99 * math.sqrt(p * (1.0 - p) / trials), seed, estimator)


def _union_bound(n_sum: int, n_sq_sum: int, trials: int, seed: int) -> McEstimate:
    mean = n_sum / trials
    variance = 0.0
    if trials > 1:
        variance = max(0.0, (n_sq_sum - trials * mean**2) / (trials - 1))
    raw = 1.0 - mean
    return McEstimate(
        min(1.0, max(0.0, raw)),
        trials,
        Z_99 * math.sqrt(variance / trials),
        seed,
        "union-bound",
        raw,
    )


def empirical_sweep(
    model: CoverageModel, thresholds: Sequence[float], settings: OracleSettings
) -> list[OracleSample]:
    """
    Common-random-number sweep: every threshold is counted on the same simulated trials.

    Args:
        model: densities, powers, alpha and noise; model.threshold is ignored
        thresholds: linear SINR thresholds (>= 0)
        settings: oracle knobs

    Returns:
        one OracleSample per threshold, in input order
    """
    if settings.trials < 1:
        raise DomainError(f"trials must be >= 1, got {settings.trials!r}")
    grid = np.asarray(list(thresholds), dtype=float)
    if grid.size == 0:
        return []
    if not np.all(np.isfinite(grid)) or np.any(grid < 0):
        raise DomainError("oracle thresholds must be finite and non-negative")

    plan = _plan(model, grid, settings)
    # a block holds at most max_expected_points expected points
    block = min(
        settings.block_size,
        max(1, int(settings.max_expected_points // max(plan.expected_points, 1.0))),
    )
    sizes = [min(block, settings.trials - start) for start in range(0, settings.trials, block)]

    def run(block_id: int) -> _Tally:
        return _run_block(plan, grid, settings.seed, block_id, sizes[block_id])

    if settings.workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            tallies = list(pool.map(run, range(len(sizes))))
    else:
        tallies = [run(block_id) for block_id in range(len(sizes))]

    total = tallies[0]
    for tally in tallies[1:]:
        total += tally

    logger.info(
        "oracle mode=%s trials=%d blocks=%d block_size=%d radius=%g serving_radius=%g seed=%d",
        plan.mode.value,
        total.trials,
        len(sizes),
        block,
        plan.radius,
        plan.serving_radius,
        settings.seed,
    )

    samples = []
    for k, threshold in enumerate(grid):
        bound = truncation_tail_bound(model, float(threshold), settings, plan.radius)
        if plan.mode is ServingMode.FIXED:
            fixed = _bernoulli(int(total.cover[k]), total.trials, settings.seed, "fixed")
            sample = OracleSample(float(threshold), fixed=fixed, tail_bound=bound)
        else:
            sample = OracleSample(
                float(threshold),
                union_bound=_union_bound(
                    int(total.n_sum[k]), int(total.n_sq_sum[k]), total.trials, settings.seed
                ),
                max_sinr=_bernoulli(
                    total.trials - int(total.cover[k]), total.trials, settings.seed, "max-sinr"
                ),
                tail_bound=bound,
            )
        half_width = sample.primary.half_width_99
        if bound is not None and half_width > 0 and bound > 0.1 * half_width:
            logger.warning(
                "truncation tail bound %.3e exceeds 0.1 x half-width %.3e at threshold %g",
                bound,
                half_width,
                threshold,
            )
        samples.append(sample)
    return samples


def empirical_coverage(
    model: CoverageModel,
    trials: int,
    radius: float | None = None,
    seed: int = 20240601,
    settings: OracleSettings | None = None,
) -> McEstimate:
    """Estimate coverage at model.threshold with the primary estimator of the serving mode."""
    settings = settings or OracleSettings()
    radius = radius if radius is not None else settings.radius
    settings = replace(settings, trials=trials, radius=radius, seed=seed)
    return empirical_sweep(model, [model.threshold], settings)[0].primary


def settings_metadata(settings: OracleSettings) -> dict[str, Any]:
    """Provenance of an oracle run for curve metadata and manifests."""
    return {
        "seed": settings.seed,
        "trials": settings.trials,
        "block_size": settings.block_size,
        "radius_m": settings.radius,
        "serving_mode": settings.serving_mode.value,
        "serving_distance_m": settings.serving_distance,
        "serving_radius_m": settings.serving_radius,
        "reference_noise": settings.reference_noise,
        "include_noise": settings.include_noise,
        "laplace_equivalent": settings.laplace_equivalent,
    }
