"""
Processor sizing and per-stage heat budgets.

A model processor is an n x n array of flux-tunable transmons with tunable couplers
and multiplexed readout. Every line costs one coax; static load scales with the total
line count, active load with the lines of each kind, and fixed loads (amplifiers) with
the number of readout circuits.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence

from ..attenuators import (
    DEFAULT_Z0,
    ActiveLoads,
    FixedLoad,
    LineKind,
    LineSpec,
    LoadScale,
    dbm_to_watts,
    line_active_loads,
)
from ..cables import CableSpec, StaticMode, stage_net_static
from ..fridge import FridgeModel

logger = logging.getLogger(__name__)

DEFAULT_MULTIPLEX = 6
DEFAULT_READOUT_CHAIN_LIMIT = 24
DEFAULT_PRACTICAL_QUBIT_LIMIT = 140
FLUX_BIAS_CURRENT = 0.4e-3  # A
LNA_POWER = 7.8e-3  # W


class BudgetError(Exception):
    """Custom exception for processor and budget errors."""

    pass


class CapacityExceededError(BudgetError):
    """Raised when a processor needs more lines than the fridge can hold."""

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(f"Processor requires {required} lines, fridge capacity is {available}")


def default_line_templates() -> Dict[LineKind, LineSpec]:
    """Line templates: 20 dB at 4K on flux lines, 3 x 10 dB on pump lines."""
    return {
        LineKind.QUBIT_XY: LineSpec(LineKind.QUBIT_XY),
        LineKind.QUBIT_FLUX: LineSpec(
            LineKind.QUBIT_FLUX, {"4K": 20.0}, target_current=FLUX_BIAS_CURRENT
        ),
        LineKind.COUPLER_FLUX: LineSpec(
            LineKind.COUPLER_FLUX, {"4K": 20.0}, target_current=FLUX_BIAS_CURRENT
        ),
        LineKind.READ_IN: LineSpec(LineKind.READ_IN),
        LineKind.READ_OUT: LineSpec(LineKind.READ_OUT, {"4K": 0.0}),
        LineKind.TWPA_PUMP: LineSpec(
            LineKind.TWPA_PUMP,
            {"4K": 10.0, "Still": 10.0, "CP": 10.0},
            pump_power=dbm_to_watts(-40.0),
        ),
    }


def default_fixed_loads() -> List[FixedLoad]:
    return [FixedLoad("4K", LNA_POWER, "LNA", LoadScale.READOUT_CIRCUIT)]


@dataclass
class ProcessorModel:
    """Square array of n x n qubits with its line templates."""

    n: int
    readout_multiplex: int = DEFAULT_MULTIPLEX
    lines: Dict[LineKind, LineSpec] = field(default_factory=default_line_templates)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise BudgetError(f"Array edge must be a positive integer, got {self.n}")
        if int(self.readout_multiplex) != self.readout_multiplex or self.readout_multiplex < 1:
            raise BudgetError(f"Readout multiplex must be >= 1, got {self.readout_multiplex}")
        self.n = int(self.n)
        self.readout_multiplex = int(self.readout_multiplex)
        self.lines = {LineKind(k): v for k, v in self.lines.items()}
        for kind, line in self.lines.items():
            if line.kind is not kind:
                raise BudgetError(f"Template for {kind.value} describes a {line.kind.value} line")


@dataclass(frozen=True)
class LineCounts:
    """Qubits, couplers, readout circuits and lines of a processor."""

    qubits: int
    couplers: int
    readout_circuits: int
    qubit_xy: int
    qubit_flux: int
    coupler_flux: int
    read_in: int
    read_out: int
    pump: int

    @property
    def total(self) -> int:
        return sum(self.by_kind().values())

    def by_kind(self) -> Dict[LineKind, int]:
        return {
            LineKind.QUBIT_XY: self.qubit_xy,
            LineKind.QUBIT_FLUX: self.qubit_flux,
            LineKind.COUPLER_FLUX: self.coupler_flux,
            LineKind.READ_IN: self.read_in,
            LineKind.READ_OUT: self.read_out,
            LineKind.TWPA_PUMP: self.pump,
        }


def processor_line_counts(p: ProcessorModel) -> LineCounts:
    """
    Line counts of an n x n processor.

    One XY and one flux line per qubit, one flux line per coupler, and a read-in,
    read-out and pump line per readout circuit. A partly filled readout circuit still
    costs a full chain.
    """
    qubits = p.n * p.n
    couplers = 2 * p.n * (p.n - 1)
    readout = math.ceil(qubits / p.readout_multiplex)
    return LineCounts(
        qubits=qubits,
        couplers=couplers,
        readout_circuits=readout,
        qubit_xy=qubits,
        qubit_flux=qubits,
        coupler_flux=couplers,
        read_in=readout,
        read_out=readout,
        pump=readout,
    )


@dataclass
class StageBudget:
    """Loads on one stage against its cooling power, in W."""

    stage: str
    temperature: float
    cooling_power: float
    static: float
    active: float
    fixed: float
    pump: float = 0.0  # part of active from pump lines
    margin: float = 1.0

    def __post_init__(self):
        self.total = self.static + self.active + self.fixed
        self.fraction = self.total / self.cooling_power
        self.passed = self.fraction <= self.margin

    @property
    def flux(self) -> float:
        """Part of active from DC bias lines."""
        return self.active - self.pump


@dataclass
class BudgetReport:
    """Per-stage budgets of one configuration."""

    n: Optional[int]
    counts: Optional[LineCounts]
    lines: int
    stages: List[StageBudget]
    capacity: int
    margin: float = 1.0
    static_mode: StaticMode = StaticMode.NET
    notes: List[str] = field(default_factory=list)

    @property
    def capacity_ok(self) -> bool:
        return self.lines <= self.capacity

    @property
    def budget_ok(self) -> bool:
        return all(s.passed for s in self.stages)

    @property
    def passed(self) -> bool:
        return self.capacity_ok and self.budget_ok

    @property
    def max_fraction_stage(self) -> StageBudget:
        return max(self.stages, key=lambda s: s.fraction)

    def stage(self, stage_id: str) -> StageBudget:
        for s in self.stages:
            if s.stage == stage_id:
                return s
        raise BudgetError(f"No budget for stage '{stage_id}'")


def _static_per_stage(
    cable: CableSpec, fridge: FridgeModel, lines: int, mode: StaticMode
) -> Dict[str, float]:
    return {s.id: stage_net_static(cable, fridge, s.id, lines, mode) for s in fridge.cooled_stages}


def _fixed_per_stage(
    fixed: Sequence[FixedLoad], fridge: FridgeModel, readout_circuits: int
) -> Dict[str, float]:
    totals = {s.id: 0.0 for s in fridge.cooled_stages}
    for load in fixed:
        if fridge.index(load.stage) == 0:
            raise BudgetError(f"Fixed load '{load.label}' sits on the uncooled stage {load.stage}")
        multiplier = readout_circuits if load.scale is LoadScale.READOUT_CIRCUIT else 1
        totals[load.stage] += multiplier * load.power
    return totals


def _assemble(
    fridge: FridgeModel,
    static: Dict[str, float],
    active: ActiveLoads,
    pump: ActiveLoads,
    fixed: Dict[str, float],
    margin: float,
) -> List[StageBudget]:
    return [
        StageBudget(
            stage=s.id,
            temperature=s.temperature,
            cooling_power=s.cooling_power,
            static=static[s.id],
            active=active.total(s.id),
            fixed=fixed[s.id],
            pump=pump.total(s.id),
            margin=margin,
        )
        for s in fridge.cooled_stages
    ]


def system_budget(
    p: ProcessorModel,
    fridge: FridgeModel,
    cable: CableSpec,
    fixed: Optional[Sequence[FixedLoad]] = None,
    margin: float = 1.0,
    static_mode: StaticMode = StaticMode.NET,
    z0: float = DEFAULT_Z0,
    readout_chain_limit: Optional[int] = DEFAULT_READOUT_CHAIN_LIMIT,
    practical_qubit_limit: Optional[int] = DEFAULT_PRACTICAL_QUBIT_LIMIT,
    enforce_capacity: bool = True,
) -> BudgetReport:
    """
    Aggregate static, active and fixed loads of a processor per stage.

    Args:
        p: Processor model
        fridge: Refrigerator model
        cable: Coax used for every line
        fixed: Fixed loads (default one 7.8 mW LNA at 4K per readout circuit)
        margin: Largest allowed fraction of each stage's cooling power
        static_mode: NET or INCOMING per-stage static loads
        z0: Characteristic impedance of lines and pads
        readout_chain_limit: Readout circuits above which a space note is added
        practical_qubit_limit: Qubit count above which an engineering-margin note is added
        enforce_capacity: Raise when the line count exceeds the capacity instead of flagging

    Returns:
        BudgetReport: One StageBudget per cooled stage

    Raises:
        CapacityExceededError: If lines exceed capacity and enforce_capacity is set
    """
    if not margin > 0:
        raise BudgetError(f"Margin must be positive, got {margin}")
    fixed = default_fixed_loads() if fixed is None else list(fixed)
    counts = processor_line_counts(p)
    total_lines = counts.total
    notes: List[str] = []

    if total_lines > fridge.capacity:
        if enforce_capacity:
            raise CapacityExceededError(total_lines, fridge.capacity)
        notes.append(f"requires {total_lines} lines, capacity is {fridge.capacity}")

    static = _static_per_stage(cable, fridge, total_lines, static_mode)

    active = ActiveLoads.zeros(fridge)
    pump = ActiveLoads.zeros(fridge)
    for kind, count in counts.by_kind().items():
        line = p.lines.get(kind)
        if line is None or count == 0:
            continue
        loads = line_active_loads(line, fridge, cable, z0).scaled(count)
        active = active + loads
        if kind is LineKind.TWPA_PUMP:
            pump = pump + loads

    fixed_loads = _fixed_per_stage(fixed, fridge, counts.readout_circuits)
    stages = _assemble(fridge, static, active, pump, fixed_loads, margin)

    if readout_chain_limit is not None and counts.readout_circuits > readout_chain_limit:
        notes.append(
            f"{counts.readout_circuits} readout circuits exceed the {readout_chain_limit} "
            "readout chains that fit comfortably in the fridge"
        )
    if practical_qubit_limit is not None and counts.qubits > practical_qubit_limit:
        notes.append(
            f"{counts.qubits} qubits exceed the practical limit of about {practical_qubit_limit} "
            "once engineering margins are applied"
        )
    for s in stages:
        if not s.passed:
            notes.append(f"{s.stage} at {s.fraction:.1%} of cooling power exceeds {margin:.0%}")

    report = BudgetReport(
        n=p.n,
        counts=counts,
        lines=total_lines,
        stages=stages,
        capacity=fridge.capacity,
        margin=margin,
        static_mode=StaticMode(static_mode),
        notes=notes,
    )
    peak = report.max_fraction_stage
    logger.debug(
        f"n={p.n}: {total_lines} lines, peak {peak.stage} at {peak.fraction:.3f}, "
        f"passed={report.passed}"
    )
    return report


def static_only_budget(
    fridge: FridgeModel,
    cable: CableSpec,
    count: Optional[int] = None,
    margin: float = 1.0,
    static_mode: StaticMode = StaticMode.NET,
) -> BudgetReport:
    """Budget of `count` idle cables (default: the fridge capacity)."""
    count = fridge.capacity if count is None else count
    static = _static_per_stage(cable, fridge, count, static_mode)
    zeros = ActiveLoads.zeros(fridge)
    fixed = {s.id: 0.0 for s in fridge.cooled_stages}
    return BudgetReport(
        n=None,
        counts=None,
        lines=count,
        stages=_assemble(fridge, static, zeros, zeros, fixed, margin),
        capacity=fridge.capacity,
        margin=margin,
        static_mode=StaticMode(static_mode),
    )


def sweep_sizes(
    n_values: Iterable[int],
    p: ProcessorModel,
    fridge: FridgeModel,
    cable: CableSpec,
    fixed: Optional[Sequence[FixedLoad]] = None,
    max_workers: Optional[int] = None,
    **options,
) -> List[BudgetReport]:
    """
    Budgets for a range of array sizes, in input order.

    Over-capacity sizes are flagged in their reports rather than raised. Keyword
    options are passed on to system_budget.
    """
    sizes = list(n_values)
    if not sizes:
        return []
    options["enforce_capacity"] = False

    def evaluate(n: int) -> BudgetReport:
        return system_budget(replace(p, n=n), fridge, cable, fixed, **options)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        reports = list(pool.map(evaluate, sizes))
    logger.info(f"Swept {len(reports)} size(s) from n={sizes[0]} to n={sizes[-1]}")
    return reports
