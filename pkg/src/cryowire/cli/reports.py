"""
Report tables: pandas frames for CSV output and fixed-width text for the terminal.
"""

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Dict, List, Optional, Sequence, Union

import pandas as pd

from .. import __version__
from ..attenuators import ActiveLoads
from ..cables import CableSpec, layer_static_loads
from ..fridge import FridgeModel
from ..system import BudgetReport

BUDGET_COLUMNS = [
    "stage",
    "temperature_K",
    "static_W",
    "flux_W",
    "pump_W",
    "active_W",
    "fixed_W",
    "total_W",
    "cooling_power_W",
    "fraction",
    "passed",
]


def budget_frame(report: BudgetReport) -> pd.DataFrame:
    """One row per cooled stage."""
    rows = [
        {
            "stage": s.stage,
            "temperature_K": s.temperature,
            "static_W": s.static,
            "flux_W": s.flux,
            "pump_W": s.pump,
            "active_W": s.active,
            "fixed_W": s.fixed,
            "total_W": s.total,
            "cooling_power_W": s.cooling_power,
            "fraction": s.fraction,
            "passed": s.passed,
        }
        for s in report.stages
    ]
    return pd.DataFrame(rows, columns=BUDGET_COLUMNS)


def sweep_frame(reports: Sequence[BudgetReport]) -> pd.DataFrame:
    """Budgets of several sizes in long form, one row per (n, stage)."""
    frames = []
    for report in reports:
        frame = budget_frame(report)
        frame.insert(0, "capacity_ok", report.capacity_ok)
        frame.insert(0, "lines", report.lines)
        frame.insert(0, "n", report.n)
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=["n", "lines", "capacity_ok", *BUDGET_COLUMNS])
    return pd.concat(frames, ignore_index=True)


def plot_frame(reports: Sequence[BudgetReport]) -> pd.DataFrame:
    """n against the cooling-power fraction of every stage, one row per size."""
    long = sweep_frame(reports)
    if long.empty:
        return pd.DataFrame(columns=["n", "lines"])
    wide = long.pivot(index=["n", "lines"], columns="stage", values="fraction")
    wide = wide[list(dict.fromkeys(long["stage"]))]
    wide.columns = [f"{stage}_fraction" for stage in wide.columns]
    return wide.reset_index()


def active_frame(loads: ActiveLoads) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "stage": stage,
                "coax_W": loads.coax[stage],
                "attenuator_W": loads.attenuator[stage],
                "termination_W": loads.termination[stage],
                "total_W": loads.total(stage),
            }
            for stage in loads.coax
        ]
    )


def layer_frame(cable: CableSpec, fridge: FridgeModel) -> pd.DataFrame:
    """Static load of each cable layer on each run, one cable."""
    rows = []
    for segment in fridge.segments():
        row: Dict = {"upper": segment.upper, "lower": segment.lower, "length_m": segment.length}
        for name, load in layer_static_loads(cable, segment).items():
            row[f"{name}_W"] = load
        rows.append(row)
    return pd.DataFrame(rows)


def summary_dict(report: BudgetReport) -> Dict:
    peak = report.max_fraction_stage
    data: Dict = {
        "n": report.n,
        "lines": report.lines,
        "capacity": report.capacity,
        "capacity_ok": report.capacity_ok,
        "margin": report.margin,
        "static_mode": report.static_mode.value,
        "passed": report.passed,
        "max_fraction_stage": peak.stage,
        "max_fraction": peak.fraction,
        "stages": budget_frame(report).to_dict(orient="records"),
        "notes": list(report.notes),
    }
    if report.counts is not None:
        counts = report.counts
        data["counts"] = {
            "qubits": counts.qubits,
            "couplers": counts.couplers,
            "readout_circuits": counts.readout_circuits,
            **{kind.value: count for kind, count in counts.by_kind().items()},
        }
    return data


def write_summary_json(reports: Sequence[BudgetReport], path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump([summary_dict(r) for r in reports], f, indent=2)
        f.write("\n")


def generated_line(when: Optional[datetime] = None) -> str:
    when = when or datetime.now(timezone.utc)
    return f"# generated {when.isoformat(timespec='seconds')} by cryowire {__version__}\n"


def write_csv(
    frame: pd.DataFrame, target: Union[str, Path, IO[str]], when: Optional[datetime] = None
) -> None:
    """
    Write a frame as CSV at full precision after a single `# generated` line.

    Args:
        frame: Table to write
        target: File path or open text stream
        when: Timestamp for the header (default now, UTC)
    """
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as f:
            f.write(generated_line(when))
            frame.to_csv(f, index=False, lineterminator="\n")
    else:
        target.write(generated_line(when))
        frame.to_csv(target, index=False, lineterminator="\n")


def format_table(frame: pd.DataFrame) -> str:
    """Fixed-width text with four significant figures and fractions as percentages."""
    formatters = {}
    for column in frame.columns:
        if column.endswith("fraction"):
            formatters[column] = "{:.1%}".format
        elif pd.api.types.is_bool_dtype(frame[column]):
            formatters[column] = lambda v: "yes" if v else "NO"
        elif pd.api.types.is_float_dtype(frame[column]):
            formatters[column] = "{:.3e}".format
    return frame.to_string(index=False, formatters=formatters)


def format_report(report: BudgetReport) -> str:
    """Budget table with a header line and notes."""
    peak = report.max_fraction_stage
    status = "PASS" if report.passed else "FAIL"
    label = f"n={report.n}" if report.n is not None else "idle cables"
    lines: List[str] = [
        f"{label}: {report.lines} lines (capacity {report.capacity}), "
        f"peak {peak.stage} at {peak.fraction:.1%}, margin {report.margin:.0%}: {status}",
        format_table(budget_frame(report)),
    ]
    lines.extend(f"  note: {note}" for note in report.notes)
    return "\n".join(lines)
