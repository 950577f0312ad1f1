"""Use cases behind the command-line surface."""

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any

from uav_coverage import __version__
from uav_coverage.core.coverage import (
    CoverageCurve,
    Method,
    QuadratureSettings,
    coverage_closed_form,
    coverage_integral,
    sweep,
    tolerable_threshold,
)
from uav_coverage.core.exceptions import CoverageError, SweepPointError, UsageError
from uav_coverage.core.mc_oracle import (
    OracleSample,
    OracleSettings,
    ServingMode,
    empirical_sweep,
    settings_metadata,
)
from uav_coverage.core.units import db_to_linear, linear_to_db
from uav_coverage.decorators import log_action
from uav_coverage.infra.settings import settings
from uav_coverage.scenarios import (
    DerivedScenario,
    Scenario,
    derive_model,
    load_scenario,
    preset,
    scenario_hash,
)

logger = logging.getLogger("uav_coverage.usecases")


def resolve_scenario(preset_name: str | None = None, path: str | None = None) -> Scenario:
    """Scenario from a preset name or a scenario file."""
    if preset_name and path:
        raise UsageError("give either --preset or --scenario, not both")
    if preset_name:
        return preset(preset_name)
    if path:
        return load_scenario(path)
    raise UsageError("--preset or --scenario is required")


def oracle_settings(
    derived: DerivedScenario,
    trials: int | None = None,
    seed: int | None = None,
    radius: float | None = None,
    serving_mode: ServingMode = ServingMode.FIXED,
    reference_noise: float = 0.0,
    include_noise: bool = True,
    workers: int | None = None,
) -> OracleSettings:
    """Oracle knobs for a scenario; unset values come from settings."""
    if radius is None and derived.model.alpha > 2:
        radius = float(settings.get("mc_radius_m"))
    return OracleSettings(
        trials=int(trials if trials is not None else settings.get("mc_trials")),
        seed=int(seed if seed is not None else settings.get("mc_seed")),
        radius=radius,
        serving_mode=serving_mode,
        serving_distance=derived.serving_distance,
        reference_noise=reference_noise,
        include_noise=include_noise,
        block_size=int(settings.get("mc_block_size")),
        max_expected_points=float(settings.get("mc_max_expected_points")),
        workers=workers if workers is not None else settings.workers,
    )


@dataclass
class CurveRun:
    derived: DerivedScenario
    curve: CoverageCurve
    tolerable_db: float | None

    @property
    def points(self) -> int:
        return len(self.curve)

    @property
    def summary(self) -> str:
        tolerable = "none" if self.tolerable_db is None else f"{self.tolerable_db:g}"
        sinr_db = linear_to_db(self.derived.downlink_sinr)
        return f"downlink_sinr_db={sinr_db:.2f} tolerable_db={tolerable}"


@log_action("CURVE", verbose=True)
def compute_curve(
    scenario: Scenario,
    method: Method = Method.CLOSED_FORM,
    thresholds_db: list[float] | None = None,
    quad: QuadratureSettings | None = None,
    oracle: OracleSettings | None = None,
    workers: int | None = None,
) -> CurveRun:
    """Sweep one scenario with one method."""
    derived = derive_model(scenario)
    grid = thresholds_db if thresholds_db is not None else scenario.sweep.thresholds_db()
    if method is Method.MONTE_CARLO and oracle is None:
        oracle = oracle_settings(derived)
    curve = sweep(
        derived.model,
        grid,
        method,
        quad=quad or settings.quadrature(),
        oracle=oracle,
        workers=workers if workers is not None else settings.workers,
        scenario_name=scenario.name,
    )
    level = float(settings.get("tolerable_coverage"))
    return CurveRun(derived, curve, tolerable_threshold(curve, level))


@dataclass
class ComparisonRun:
    runs: list[CurveRun]
    thresholds_db: list[float]

    @property
    def points(self) -> int:
        return len(self.thresholds_db)

    @property
    def summary(self) -> str:
        parts = []
        for run in self.runs:
            value = "none" if run.tolerable_db is None else f"{run.tolerable_db:g}"
            parts.append(f"{run.curve.scenario_name}={value}")
        return "tolerable_db " + ",".join(parts)


@log_action("COMPARE", verbose=True)
def compare_scenarios(
    scenarios: list[Scenario],
    method: Method = Method.CLOSED_FORM,
    oracle_overrides: dict[str, Any] | None = None,
) -> ComparisonRun:
    """Sweep several scenarios on a shared grid."""
    if len(scenarios) < 2:
        raise UsageError("compare needs at least two scenarios")
    grid = scenarios[0].sweep.thresholds_db()
    for scenario in scenarios[1:]:
        if scenario.sweep.thresholds_db() != grid:
            raise UsageError(
                f"sweep grid of '{scenario.name}' differs from '{scenarios[0].name}'"
            )

    runs = []
    for scenario in scenarios:
        oracle = None
        if method is Method.MONTE_CARLO:
            oracle = oracle_settings(derive_model(scenario), **(oracle_overrides or {}))
        runs.append(compute_curve(scenario=scenario, method=method, oracle=oracle))
    return ComparisonRun(runs, grid)


@dataclass
class ValidationRow:
    threshold_db: float
    closed_form: float
    integral: float
    mc: OracleSample

    @property
    def mc_agrees(self) -> bool:
        estimate = self.mc.union_bound
        return estimate.contains(self.integral, slack=self.mc.tail_bound or 0.0)

    def form_gap(self) -> float:
        return abs(self.closed_form - self.integral)


@dataclass
class ValidationReport:
    derived: DerivedScenario
    rows: list[ValidationRow]
    tolerance: float | None
    oracle: OracleSettings
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def points(self) -> int:
        return len(self.rows)

    @property
    def mc_passed(self) -> bool:
        return all(row.mc_agrees for row in self.rows)

    @property
    def forms_passed(self) -> bool:
        if self.tolerance is None:
            return True
        return all(row.form_gap() <= self.tolerance for row in self.rows)

    @property
    def passed(self) -> bool:
        return self.mc_passed and self.forms_passed

    @property
    def max_form_gap(self) -> float:
        return max((row.form_gap() for row in self.rows), default=0.0)

    @property
    def summary(self) -> str:
        return (
            f"mc_passed={self.mc_passed} forms_passed={self.forms_passed} "
            f"max_form_gap={self.max_form_gap:.3e}"
        )


@log_action("VALIDATE", verbose=True)
def validate_scenario(
    scenario: Scenario,
    thresholds_db: list[float] | None = None,
    trials: int | None = None,
    seed: int | None = None,
    radius: float | None = None,
    tolerance: float | None = None,
    workers: int | None = None,
) -> ValidationReport:
    """
    Cross-check closed form, radial integral and oracle at every threshold.

    The oracle runs in PPP serving mode with unit reference noise and no thermal noise,
    which is the model the radial integral evaluates.
    """
    if trials is not None and trials < 1:
        raise UsageError(f"--trials must be >= 1, got {trials}")
    if tolerance is not None and (not math.isfinite(tolerance) or tolerance < 0):
        raise UsageError(f"--tolerance must be >= 0, got {tolerance}")

    derived = derive_model(scenario)
    grid = thresholds_db if thresholds_db is not None else scenario.sweep.thresholds_db()
    if not grid:
        raise UsageError("validation needs at least one threshold")

    oracle = oracle_settings(
        derived,
        trials=trials,
        seed=seed,
        radius=radius,
        serving_mode=ServingMode.PPP,
        reference_noise=1.0,
        include_noise=False,
        workers=workers,
    )
    quad = settings.quadrature()
    linear = [db_to_linear(t) for t in grid]
    samples = empirical_sweep(derived.model, linear, oracle)

    rows = []
    for threshold_db, threshold, sample in zip(grid, linear, samples):
        model = derived.model.with_threshold(threshold)
        try:
            closed = coverage_closed_form(model)
            integral = coverage_integral(model, quad).raw
        except CoverageError as e:
            raise SweepPointError(threshold_db, e) from e
        rows.append(ValidationRow(threshold_db, closed, integral, sample))

    metadata = settings_metadata(oracle)
    metadata["quadrature"] = quad.as_dict()
    return ValidationReport(derived, rows, tolerance, oracle, metadata)


@dataclass
class RunManifest:
    """Provenance written next to every output; replaying it reproduces the outputs."""

    command: str
    argv: list[str]
    resolved: dict[str, Any]
    scenario_hashes: dict[str, str]
    outputs: list[str]
    seeds: list[int] = field(default_factory=list)
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "argv": list(self.argv),
            "resolved": dict(self.resolved),
            "scenario_hashes": dict(self.scenario_hashes),
            "outputs": list(self.outputs),
            "seeds": list(self.seeds),
            "version": self.version,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunManifest":
        try:
            return cls(
                command=data["command"],
                argv=list(data["argv"]),
                resolved=dict(data.get("resolved", {})),
                scenario_hashes=dict(data.get("scenario_hashes", {})),
                outputs=list(data.get("outputs", [])),
                seeds=list(data.get("seeds", [])),
                version=data.get("version", ""),
                timestamp=data.get("timestamp", ""),
            )
        except (KeyError, TypeError) as e:
            raise UsageError(f"malformed manifest: {e}") from e

    def replay_argv(self) -> list[str]:
        """Recorded command line with every resolved default made explicit."""
        argv = list(self.argv)
        for key, value in self.resolved.items():
            flag = f"--{key}"
            if flag not in argv and value is not None:
                argv.extend([flag, str(value)])
        return argv


def scenario_hashes(scenarios: list[Scenario]) -> dict[str, str]:
    return {scenario.name: scenario_hash(scenario) for scenario in scenarios}


def manifest_path(output: Path) -> Path:
    return output.with_suffix(".manifest.json")


def summary_path(output: Path) -> Path:
    return output.with_suffix(".summary.txt")


def plot_path(output: Path) -> Path:
    return output.with_suffix(".gp")
