#!/usr/bin/env python3
import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from ..attenuators import (
    AttenuatorError,
    LineKind,
    back_propagate_current,
    line_active_loads,
    pump_rms_current,
    watts_to_dbm,
)
from ..cables import CableError, StaticMode
from ..fitting import (
    DEFAULT_T_CAP,
    MAX_DEGREE,
    FittingError,
    filter_measurements,
    fit_polylog,
    read_measurements_csv,
    write_residuals_csv,
)
from ..fridge import FridgeError
from ..materials import MaterialError, MaterialLibrary, UnitKind, eval_property
from ..system import (
    BudgetError,
    BudgetReport,
    static_only_budget,
    sweep_sizes,
    system_budget,
)
from .config import OUTPUT_FORMATS, ConfigError, RunConfig, load_config
from .reports import (
    active_frame,
    budget_frame,
    format_report,
    format_table,
    layer_frame,
    plot_frame,
    sweep_frame,
    write_csv,
    write_summary_json,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2
EXIT_CAPACITY = 3

CRYOWIRE_ERRORS = (
    ConfigError,
    MaterialError,
    FittingError,
    FridgeError,
    CableError,
    AttenuatorError,
    BudgetError,
)


def create_parser():
    """Create command line argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration JSON (default: search path)")
    common.add_argument(
        "--margin", type=float, help="Largest allowed fraction of each stage's cooling power"
    )
    common.add_argument("--plot-data", help="Write n against per-stage fraction to this CSV")
    common.add_argument(
        "--format", choices=OUTPUT_FORMATS, help="Terminal output format (default: from config)"
    )
    common.add_argument("--output-dir", help="Write CSV and JSON reports into this directory")
    common.add_argument("--emit-config", help="Write the resolved configuration to this file")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        prog="cryowire",
        description="Heat budget of coaxial wiring in a dilution refrigerator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Evaluate and list material models
  cryowire materials list
  cryowire materials eval inner_k 4 40 300

  # Refit a conductivity model from measurements
  cryowire fit outer_k.csv --degree 8 --output outer_k.json --residuals residuals.csv

  # Static load of 1008 idle cables
  cryowire cable static --count 1008 --layers

  # Loads of one flux line, then of one pump line terminated at the cold plate
  cryowire line active --kind qubit_flux
  cryowire line active --kind twpa_pump --termination CP

  # Budget of a 12 x 12 processor, and a sweep writing plot data
  cryowire budget --n 12
  cryowire sweep --sweep 10..16 --plot-data fractions.csv --output-dir reports

Exit codes: 0 all stages within margin, 2 budget exceeded, 3 line capacity exceeded,
1 configuration or input error.
""",
    )

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # Materials commands
    materials_cmd = subparsers.add_parser("materials", help="Material property models")
    materials_sub = materials_cmd.add_subparsers(dest="materials_command")
    materials_sub.add_parser("list", parents=[common], help="List available materials")
    eval_cmd = materials_sub.add_parser("eval", parents=[common], help="Evaluate a model")
    eval_cmd.add_argument("material", help="Material id")
    eval_cmd.add_argument("temperatures", nargs="+", type=float, help="Temperatures in K")
    dump_cmd = materials_sub.add_parser(
        "dump", parents=[common], help="Write the material library as JSON"
    )
    dump_cmd.add_argument("--output", help="Output file (default: stdout)")

    # Fit command
    fit_cmd = subparsers.add_parser("fit", parents=[common], help="Fit a model to measurements")
    fit_cmd.add_argument("csv", help="Measurements with header temperature_K,value")
    fit_cmd.add_argument(
        "--degree", type=int, default=MAX_DEGREE, help=f"Degree (default: {MAX_DEGREE})"
    )
    fit_cmd.add_argument(
        "--t-cap",
        type=float,
        default=DEFAULT_T_CAP,
        help=f"Drop points above this temperature in K (default: {DEFAULT_T_CAP:g})",
    )
    fit_cmd.add_argument("--name", help="Model name (default: file stem)")
    fit_cmd.add_argument(
        "--unit-kind",
        choices=[u.value for u in UnitKind],
        default=UnitKind.THERMAL_CONDUCTIVITY.value,
        help="Measured quantity (default: thermal_conductivity)",
    )
    fit_cmd.add_argument("--output", help="Write the fitted model as a material file")
    fit_cmd.add_argument("--residuals", help="Write per-point residuals to this CSV")

    # Cable commands
    cable_cmd = subparsers.add_parser("cable", help="Cable heat loads")
    cable_sub = cable_cmd.add_subparsers(dest="cable_command")
    static_cmd = cable_sub.add_parser("static", parents=[common], help="Static load per stage")
    static_cmd.add_argument("--count", type=int, help="Number of cables (default: capacity)")
    static_cmd.add_argument(
        "--mode",
        choices=[m.value for m in StaticMode],
        help="net (incoming - outgoing) or incoming run only (default: from config)",
    )
    static_cmd.add_argument("--layers", action="store_true", help="Show the per-layer breakdown")

    # Line commands
    line_cmd = subparsers.add_parser("line", help="Signal line loads")
    line_sub = line_cmd.add_subparsers(dest="line_command")
    active_cmd = line_sub.add_parser("active", parents=[common], help="Active load of one line")
    active_cmd.add_argument(
        "--kind",
        choices=[k.value for k in LineKind],
        default=LineKind.QUBIT_FLUX.value,
        help="Line kind (default: qubit_flux)",
    )
    active_cmd.add_argument("--termination", help="Pump termination stage (twpa_pump only)")

    # Budget commands
    budget_cmd = subparsers.add_parser("budget", parents=[common], help="Budget of one processor")
    budget_cmd.add_argument("--n", type=int, help="Array edge, n x n qubits (default: config)")

    sweep_cmd = subparsers.add_parser("sweep", parents=[common], help="Budgets over array sizes")
    sweep_cmd.add_argument("--sweep", required=True, help="Inclusive size range A..B")

    return parser


def parse_sweep(text: str) -> List[int]:
    """Parse an inclusive `A..B` range of array sizes."""
    try:
        start, stop = (int(part) for part in text.split(".."))
    except ValueError:
        raise ConfigError(f"Invalid sweep range '{text}'. Use A..B, e.g. 10..16") from None
    if start < 1 or stop < start:
        raise ConfigError(f"Invalid sweep range '{text}': need 1 <= A <= B")
    return list(range(start, stop + 1))


def exit_code(reports: Sequence[BudgetReport]) -> int:
    if any(not r.capacity_ok for r in reports):
        return EXIT_CAPACITY
    if any(not r.budget_ok for r in reports):
        return EXIT_BUDGET
    return EXIT_OK


def _resolve(args) -> RunConfig:
    config = load_config(args.config)
    logger.debug(f"Using config {config.source}")
    if args.margin is not None:
        if not args.margin > 0:
            raise ConfigError(f"--margin must be positive, got {args.margin}")
        config.margin = args.margin
    if args.format is not None:
        config.output_format = args.format
    if getattr(args, "n", None) is not None:
        config.processor = replace(config.processor, n=args.n)
    return config


def _output_path(args, filename: str) -> Optional[str]:
    if not args.output_dir:
        return None
    os.makedirs(args.output_dir, exist_ok=True)
    return os.path.join(args.output_dir, filename)


def _show(frame: pd.DataFrame, config: RunConfig, args, filename: str) -> None:
    """Print a table and, with --output-dir, also write it as CSV."""
    path = _output_path(args, filename)
    if path:
        write_csv(frame, path)
    if config.output_format == "csv":
        write_csv(frame, sys.stdout)
    else:
        print(format_table(frame))
    if path:
        print(f"✓ Wrote {path}")


def _show_reports(reports: Sequence[BudgetReport], config: RunConfig, args, stem: str) -> None:
    csv_path = _output_path(args, f"{stem}.csv")
    if csv_path:
        frame = sweep_frame(reports) if len(reports) > 1 else budget_frame(reports[0])
        write_csv(frame, csv_path)
        write_summary_json(reports, _output_path(args, f"{stem}_summary.json"))
    if args.plot_data:
        write_csv(plot_frame(reports), args.plot_data)

    if config.output_format == "csv":
        write_csv(sweep_frame(reports), sys.stdout)
        for report in reports:
            for note in report.notes:
                print(f"Note: n={report.n}: {note}", file=sys.stderr)
    else:
        print("\n\n".join(format_report(r) for r in reports))

    if csv_path:
        print(f"✓ Wrote {csv_path}")
    if args.plot_data:
        print(f"✓ Wrote {args.plot_data}")


def cmd_materials(args, config: RunConfig) -> int:
    library = config.library
    if args.materials_command == "list":
        frame = pd.DataFrame(
            [
                {
                    "material": name,
                    "quantity": library.get(name).unit_kind.value,
                    "unit": library.get(name).unit_kind.unit,
                    "t_min_K": library.get(name).t_min,
                    "t_max_K": library.get(name).t_max,
                    "source": library.get(name).source,
                }
                for name in library.names()
            ]
        )
        _show(frame, config, args, "materials.csv")
    elif args.materials_command == "eval":
        model = library.get(args.material)
        temperatures = np.array(args.temperatures, dtype=float)
        values = eval_property(model, temperatures)
        frame = pd.DataFrame({"temperature_K": temperatures, model.unit_kind.value: values})
        _show(frame, config, args, f"{model.name}.csv")
    elif args.materials_command == "dump":
        if args.output:
            library.dump(args.output)
            print(f"✓ Wrote {len(library)} materials to {args.output}")
        else:
            print(json.dumps(library.to_dict(), indent=2))
    else:
        print("Error: Use 'materials list', 'materials eval' or 'materials dump'", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_fit(args, config: RunConfig) -> int:
    unit_kind = UnitKind(args.unit_kind)
    series = filter_measurements(read_measurements_csv(args.csv, unit_kind), args.t_cap)
    name = args.name or os.path.splitext(os.path.basename(args.csv))[0]
    result = fit_polylog(series, degree=args.degree, name=name)

    removed = f" ({result.removed} above {args.t_cap:g} K removed)" if result.removed else ""
    print(f"{name}: degree {result.degree}, {result.points} points{removed}")
    print(f"  range {result.model.t_min:g}-{result.model.t_max:g} K, rms residual {result.rms:.3e}")
    print("  coefficients: " + " ".join(result.rounded_coefficients))

    if args.output:
        MaterialLibrary([result.model]).dump(args.output)
        print(f"✓ Wrote model to {args.output}")
    if args.residuals:
        write_residuals_csv(result, series, args.residuals)
        print(f"✓ Wrote residuals to {args.residuals}")
    return EXIT_OK


def cmd_cable(args, config: RunConfig) -> int:
    if args.cable_command != "static":
        print("Error: Use 'cable static'", file=sys.stderr)
        return EXIT_ERROR
    mode = StaticMode(args.mode) if args.mode else config.static_mode
    report = static_only_budget(
        config.fridge, config.cable, args.count, margin=config.margin, static_mode=mode
    )
    columns = ["stage", "temperature_K", "static_W", "cooling_power_W", "fraction", "passed"]
    frame = budget_frame(report)[columns]
    print(f"{config.cable.name} x {report.lines} in {config.fridge.name} ({mode.value})")
    _show(frame, config, args, f"static_{report.lines}.csv")
    if args.layers:
        print()
        _show(layer_frame(config.cable, config.fridge), config, args, "static_layers.csv")
    return exit_code([report])


def cmd_line(args, config: RunConfig) -> int:
    if args.line_command != "active":
        print("Error: Use 'line active'", file=sys.stderr)
        return EXIT_ERROR
    kind = LineKind(args.kind)
    line = config.processor.lines.get(kind)
    if line is None:
        raise ConfigError(f"No template for {kind.value} lines in the configuration")
    if args.termination:
        if kind is not LineKind.TWPA_PUMP:
            raise ConfigError("--termination only applies to twpa_pump lines")
        config.fridge.index(args.termination)
        line = replace(line, termination_stage=args.termination)

    loads = line_active_loads(line, config.fridge, config.cable, config.z0)
    if kind.is_dc:
        profile = back_propagate_current(line, config.fridge, config.cable, config.z0)
        print(
            f"{kind.value}: {line.target_current * 1e3:.4g} mA at the processor, "
            f"{profile.input_current * 1e3:.4g} mA at the fridge input"
        )
    elif kind is LineKind.TWPA_PUMP:
        current = pump_rms_current(line.pump_power, config.z0)
        dbm = watts_to_dbm(line.pump_power)
        print(f"{kind.value}: {dbm:.1f} dBm, {current * 1e3:.4g} mA rms at the coupler")
    else:
        print(f"{kind.value}: negligible current, no active load")
    _show(active_frame(loads), config, args, f"active_{kind.value}.csv")
    return EXIT_OK


def cmd_budget(args, config: RunConfig) -> int:
    report = system_budget(
        config.processor,
        config.fridge,
        config.cable,
        config.fixed_loads,
        enforce_capacity=False,
        **config.budget_options(),
    )
    _show_reports([report], config, args, f"budget_n{report.n}")
    return exit_code([report])


def cmd_sweep(args, config: RunConfig) -> int:
    sizes = parse_sweep(args.sweep)
    reports = sweep_sizes(
        sizes,
        config.processor,
        config.fridge,
        config.cable,
        config.fixed_loads,
        **config.budget_options(),
    )
    _show_reports(reports, config, args, f"sweep_{sizes[0]}-{sizes[-1]}")
    return exit_code(reports)


COMMANDS = {
    "materials": cmd_materials,
    "fit": cmd_fit,
    "cable": cmd_cable,
    "line": cmd_line,
    "budget": cmd_budget,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.command or not hasattr(args, "config"):
        parser.print_help()
        return EXIT_ERROR

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        config = _resolve(args)
        if args.emit_config:
            config.save(args.emit_config)
            print(f"✓ Wrote resolved config to {args.emit_config}")
        return COMMANDS[args.command](args, config)
    except CRYOWIRE_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
