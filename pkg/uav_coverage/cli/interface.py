"""CLI commands."""

import json
import logging
import shlex
import sys
from pathlib import Path

from prettytable import PrettyTable

from uav_coverage.core import usecases
from uav_coverage.core.coverage import Method
from uav_coverage.core.exceptions import (
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    CoverageError,
    UsageError,
)
from uav_coverage.core.units import linear_to_db
from uav_coverage.infra.settings import settings
from uav_coverage.infra.storage import ResultsStorage, format_float
from uav_coverage.scenarios import Architecture, preset_group, preset_names
from uav_coverage.scenarios.presets import ALIASES, GROUPS, PRESETS

logger = logging.getLogger("uav_coverage.cli")

REPEATABLE = {"preset", "scenario", "figure"}
CURVE_HEADER = ["threshold_db", "p_cov", "method", "scenario"]
VALIDATE_HEADER = [
    "threshold_db",
    "closed_form",
    "integral",
    "mc_union_bound",
    "mc_half_width_99",
    "mc_max_sinr",
    "tail_bound",
    "mc_agrees",
]


def parse_args(args: str | list[str]) -> dict:
    """Parse --key value tokens into a dictionary; repeatable keys collect lists."""
    tokens = shlex.split(args) if isinstance(args, str) else list(args)
    result = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token.startswith("--"):
            key = token[2:]
            if i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
                value = tokens[i + 1]
                i += 2
            else:
                value = True
                i += 1
            if key in REPEATABLE:
                result.setdefault(key, []).append(value)
            else:
                result[key] = value
        else:
            raise UsageError(f"unexpected argument '{token}'")
    return result


def _flag(args: dict, key: str, cast, default=None):
    value = args.get(key)
    if value is None:
        return default
    if value is True:
        raise UsageError(f"--{key} needs a value")
    try:
        return cast(value)
    except ValueError:
        raise UsageError(f"--{key}: invalid value '{value}'") from None


def _single(args: dict, key: str) -> str | None:
    values = args.get(key) or []
    if len(values) > 1:
        raise UsageError(f"--{key} accepts one value for this command")
    return values[0] if values else None


def _method(args: dict) -> Method:
    value = args.get("method", Method.CLOSED_FORM.value)
    try:
        return Method(value)
    except ValueError:
        valid = ", ".join(m.value for m in Method)
        raise UsageError(f"--method must be one of {valid}, got '{value}'") from None


def _thresholds(args: dict) -> list[float] | None:
    raw = args.get("thresholds")
    if raw is None:
        return None
    if raw is True:
        raise UsageError("--thresholds needs a comma-separated list")
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError:
        raise UsageError(f"--thresholds: invalid list '{raw}'") from None


def _output(args: dict, default_name: str) -> Path:
    out = args.get("out")
    if out is True:
        raise UsageError("--out needs a path")
    return Path(out) if out else settings.output_dir / default_name


def _oracle_overrides(args: dict) -> dict:
    overrides = {
        "trials": _flag(args, "trials", int),
        "seed": _flag(args, "seed", int),
        "radius": _flag(args, "radius", float),
        "workers": _flag(args, "workers", int),
    }
    if overrides["trials"] is not None and overrides["trials"] < 1:
        raise UsageError(f"--trials must be >= 1, got {overrides['trials']}")
    return overrides


def _write_plot(storage: ResultsStorage, csv_path: Path, titles: list[str]) -> Path:
    lines = [
        "set datafile separator ','",
        "set xlabel 'SINR threshold (dB)'",
        "set ylabel 'Coverage probability'",
        "set yrange [0:1]",
        "set key bottom left",
        "set grid",
    ]
    plots = [
        f"'{csv_path.name}' using 1:{column} skip 1 with linespoints title '{title}'"
        for column, title in enumerate(titles, start=2)
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    return storage.write_text(usecases.plot_path(csv_path), "\n".join(lines) + "\n")


def _write_manifest(
    storage: ResultsStorage,
    output: Path,
    command: str,
    argv: list[str],
    resolved: dict,
    scenarios: list,
    outputs: list[Path],
    seeds: list[int] | None = None,
) -> Path:
    manifest = usecases.RunManifest(
        command=command,
        argv=argv,
        resolved=resolved,
        scenario_hashes=usecases.scenario_hashes(scenarios),
        outputs=[str(path) for path in outputs],
        seeds=seeds or [],
    )
    return storage.write_json(usecases.manifest_path(output), manifest.to_dict())


def cmd_curve(args: dict, argv: list[str]) -> int:
    """Handle curve command."""
    scenario = usecases.resolve_scenario(_single(args, "preset"), _single(args, "scenario"))
    method = _method(args)
    output = _output(args, f"{scenario.name}_{method.value}.csv")

    oracle = None
    resolved = {"method": method.value, "out": str(output)}
    if method is Method.MONTE_CARLO:
        derived = usecases.derive_model(scenario)
        oracle = usecases.oracle_settings(derived, **_oracle_overrides(args))
        resolved.update({"trials": oracle.trials, "seed": oracle.seed})

    run = usecases.compute_curve(
        scenario=scenario,
        method=method,
        thresholds_db=_thresholds(args),
        oracle=oracle,
        workers=_flag(args, "workers", int),
    )

    storage = ResultsStorage()
    rows = [(t, p, method.value, scenario.name) for t, p in run.curve.samples]
    outputs = [storage.write_csv(output, CURVE_HEADER, rows)]
    if args.get("plot"):
        outputs.append(_write_plot(storage, output, [scenario.name]))
    seeds = [oracle.seed] if oracle else []
    _write_manifest(storage, output, "curve", argv, resolved, [scenario], outputs, seeds)

    tolerable = "none" if run.tolerable_db is None else f"{run.tolerable_db:g} dB"
    print(f"Scenario '{scenario.name}' ({method.value}): {len(run.curve)} points -> {output}")
    print(f"Downlink SINR: {linear_to_db(run.derived.downlink_sinr):.2f} dB")
    print(f"Tolerable threshold (p_cov >= {settings.get('tolerable_coverage')}): {tolerable}")
    return EXIT_OK


def _compare_scenarios(args: dict) -> list:
    scenarios = []
    for group in args.get("figure", []):
        scenarios.extend(preset_group(group))
    for name in args.get("preset", []):
        scenarios.append(usecases.resolve_scenario(preset_name=name))
    for path in args.get("scenario", []):
        scenarios.append(usecases.resolve_scenario(path=path))
    return scenarios


def cmd_compare(args: dict, argv: list[str]) -> int:
    """Handle compare command."""
    scenarios = _compare_scenarios(args)
    method = _method(args)
    output = _output(args, f"compare_{scenarios[0].name if scenarios else 'none'}.csv")
    overrides = _oracle_overrides(args) if method is Method.MONTE_CARLO else None

    comparison = usecases.compare_scenarios(
        scenarios=scenarios, method=method, oracle_overrides=overrides
    )

    storage = ResultsStorage()
    names = [run.curve.scenario_name for run in comparison.runs]
    header = ["threshold_db", *names]
    columns = [run.curve.probabilities for run in comparison.runs]
    rows = [
        (threshold, *(column[k] for column in columns))
        for k, threshold in enumerate(comparison.thresholds_db)
    ]
    outputs = [storage.write_csv(output, header, rows)]

    table = PrettyTable()
    table.field_names = ["Scenario", "Architecture", "Downlink SINR (dB)", "Tolerable (dB)"]
    table.align["Scenario"] = "l"
    table.align["Architecture"] = "l"
    table.align["Downlink SINR (dB)"] = "r"
    table.align["Tolerable (dB)"] = "r"
    for run in comparison.runs:
        tolerable = "none" if run.tolerable_db is None else f"{run.tolerable_db:g}"
        table.add_row(
            [
                run.curve.scenario_name,
                run.derived.scenario.architecture.value,
                f"{linear_to_db(run.derived.downlink_sinr):.2f}",
                tolerable,
            ]
        )
    level = settings.get("tolerable_coverage")
    summary = f"Tolerable threshold: largest SINR threshold with p_cov >= {level}\n{table}\n"
    outputs.append(storage.write_text(usecases.summary_path(output), summary))
    if args.get("plot"):
        outputs.append(_write_plot(storage, output, names))

    resolved = {"method": method.value, "out": str(output)}
    seeds = []
    if method is Method.MONTE_CARLO:
        seed = overrides["seed"] if overrides["seed"] is not None else settings.get("mc_seed")
        resolved["seed"] = seed
        seeds = [int(seed)]
    _write_manifest(storage, output, "compare", argv, resolved, scenarios, outputs, seeds)

    print(summary, end="")
    print(f"Wrote {output}")
    return EXIT_OK


def cmd_validate(args: dict, argv: list[str]) -> int:
    """Handle validate command."""
    scenario = usecases.resolve_scenario(_single(args, "preset"), _single(args, "scenario"))
    overrides = _oracle_overrides(args)
    tolerance = _flag(args, "tolerance", float)
    output = _output(args, f"validate_{scenario.name}.csv")

    report = usecases.validate_scenario(
        scenario=scenario,
        thresholds_db=_thresholds(args),
        tolerance=tolerance,
        **overrides,
    )

    table = PrettyTable()
    table.field_names = [
        "Threshold (dB)",
        "Closed form",
        "Integral",
        "MC union bound",
        "MC 99% CI",
        "MC max-SINR",
        "Agrees",
    ]
    rows = []
    for row in report.rows:
        union = row.mc.union_bound
        table.add_row(
            [
                f"{row.threshold_db:g}",
                f"{row.closed_form:.6f}",
                f"{row.integral:.6f}",
                f"{union.raw:.6f}",
                f"±{union.half_width_99:.2e}",
                f"{row.mc.max_sinr.p_cov:.6f}",
                "yes" if row.mc_agrees else "NO",
            ]
        )
        tail = row.mc.tail_bound
        rows.append(
            (
                row.threshold_db,
                row.closed_form,
                row.integral,
                union.raw,
                union.half_width_99,
                row.mc.max_sinr.p_cov,
                "" if tail is None else tail,
                "true" if row.mc_agrees else "false",
            )
        )

    storage = ResultsStorage()
    outputs = [storage.write_csv(output, VALIDATE_HEADER, rows)]
    resolved = {
        "trials": report.oracle.trials,
        "seed": report.oracle.seed,
        "radius": report.oracle.radius,
        "out": str(output),
    }
    _write_manifest(
        storage, output, "validate", argv, resolved, [scenario], outputs, [report.oracle.seed]
    )

    print(f"Validation of '{scenario.name}' ({report.oracle.trials} trials, "
          f"seed {report.oracle.seed}):")
    print(table)
    print(f"Max closed-form/integral gap: {report.max_form_gap:.3e}"
          + ("" if tolerance is None else f" (tolerance {tolerance:g})"))
    if report.passed:
        print("Validation passed.")
        return EXIT_OK
    if not report.mc_passed:
        print("Validation FAILED: the Monte Carlo interval excludes the integral value.")
    if not report.forms_passed:
        print("Validation FAILED: closed form and integral differ beyond tolerance.")
    return EXIT_NUMERICAL


def cmd_presets(_args: dict, _argv: list[str]) -> int:
    """List bundled presets."""
    table = PrettyTable()
    table.field_names = ["Preset", "Architecture", "Carrier (GHz)", "Power (W)", "Altitude (m)",
                         "Elements", "Sweep (dB)"]
    table.align["Preset"] = "l"
    table.align["Architecture"] = "l"
    for name in preset_names():
        scenario = PRESETS[name]
        elements = (
            scenario.irs_elements if scenario.architecture is Architecture.IRS_UAV else "-"
        )
        sweep = scenario.sweep
        table.add_row(
            [
                name,
                scenario.architecture.value,
                format_float(scenario.carrier_ghz),
                format_float(scenario.tx_power_w),
                format_float(scenario.uav_altitude_m),
                elements,
                f"{sweep.start:g}..{sweep.stop:g} step {sweep.step:g}",
            ]
        )
    print(table)
    print("Aliases: " + ", ".join(f"{alias} -> {name}" for alias, name in ALIASES.items()))
    print("Figures (compare --figure): " + ", ".join(GROUPS))
    return EXIT_OK


def cmd_replay(args: dict, _argv: list[str]) -> int:
    """Re-run the command recorded in a manifest."""
    path = args.get("manifest")
    if not path or path is True:
        raise UsageError("--manifest is required")
    try:
        document = ResultsStorage().load_json(path)
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed manifest {path}: {e}") from e
    manifest = usecases.RunManifest.from_dict(document)
    if manifest.command == "replay" or manifest.command not in COMMANDS:
        raise UsageError(f"manifest records an unreplayable command '{manifest.command}'")
    replay_argv = [manifest.command, *manifest.replay_argv()]
    print(f"Replaying: {shlex.join(replay_argv)}")
    return run_cli(replay_argv)


def cmd_help(_args: dict, _argv: list[str]) -> int:
    """Show available commands."""
    print("Available commands:")
    print("  curve (--preset <name> | --scenario <path>) [--method closed-form|integral|mc]")
    print("        [--thresholds a,b,c] [--trials n] [--seed s] [--radius m] [--out path] [--plot]")
    print("                                               - Coverage curve as CSV")
    print("  compare --preset <a> --preset <b> ... | --figure fig1a [--method m] [--out path]")
    print("                                               - Wide CSV + tolerable-threshold summary")
    print("  validate (--preset <name> | --scenario <path>) [--trials n] [--seed s] [--radius m]")
    print("           [--thresholds a,b,c] [--tolerance t] - Closed form vs integral vs oracle")
    print("  presets                                      - List bundled scenarios")
    print("  replay --manifest <path>                     - Re-run a recorded command")
    print("  help                                         - Show this help")
    return EXIT_OK


COMMANDS = {
    "curve": cmd_curve,
    "compare": cmd_compare,
    "validate": cmd_validate,
    "presets": cmd_presets,
    "replay": cmd_replay,
    "help": cmd_help,
}


def run_cli(argv: list[str] | None = None) -> int:
    """Run one command and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        cmd_help({}, [])
        return EXIT_USAGE

    command, rest = argv[0].lower(), argv[1:]
    if command not in COMMANDS:
        print(f"Unknown command: {command}. Type 'help' for available commands.")
        return EXIT_USAGE

    try:
        args = parse_args(rest)
        return COMMANDS[command](args, rest)
    except CoverageError as e:
        print(f"Error: {e}")
        return e.exit_code
    except OSError as e:
        logger.error("io error command=%s error_message='%s'", command, e)
        print(f"Error: {e}")
        return EXIT_IO
