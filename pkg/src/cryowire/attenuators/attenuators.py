"""
Active heat loads of signal lines.

DC flux lines are solved by walking up from the processor: the current required at
the lowest stage fixes the current through every T-pad and cable run above it. RF
pump lines are solved as matched power flow from the termination upward.

Ohmic load in a run is charged to the lower stage the run is anchored to; the load of
the isothermal run below the lowest stage is charged to the lowest stage.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from ..cables import CableSpec
from ..fridge import FridgeModel, Segment
from ..materials import eval_property, integrate_property

logger = logging.getLogger(__name__)

DEFAULT_Z0 = 50.0  # Ohm


class AttenuatorError(Exception):
    """Custom exception for attenuator and line errors."""

    pass


class InvalidAttenuationError(AttenuatorError):
    """Raised when a pad is requested with a non-positive rating."""

    pass


class NoTargetCurrentError(AttenuatorError):
    """Raised when a DC current profile is requested for an RF line."""

    pass


class LineKind(str, Enum):
    """Signal line types of a flux-tunable transmon processor."""

    QUBIT_XY = "qubit_xy"
    QUBIT_FLUX = "qubit_flux"
    COUPLER_FLUX = "coupler_flux"
    READ_IN = "read_in"
    READ_OUT = "read_out"
    TWPA_PUMP = "twpa_pump"

    @property
    def is_dc(self) -> bool:
        return self in (LineKind.QUBIT_FLUX, LineKind.COUPLER_FLUX)


class LoadScale(str, Enum):
    """What a fixed load is counted per."""

    READOUT_CIRCUIT = "readout_circuit"
    SYSTEM = "system"


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class TPad:
    """
    Symmetric T attenuator: series r1, shunt r3, series r2.

    Resistances in Ohm; currents are DC or RMS.
    """

    attenuation_db: float
    z0: float
    r1: float
    r2: float
    r3: float

    def input_resistance(self, load: float) -> float:
        """Resistance seen at the input with `load` on the output."""
        return self.r1 + self.r3 * (self.r2 + load) / (self.r3 + self.r2 + load)

    def current_ratio(self, load: float) -> float:
        """I_out / I_in with `load` on the output."""
        return self.r3 / (self.r2 + self.r3 + load)

    def dissipation(self, i_in: float, i_out: float) -> float:
        """Power dissipated in the three resistors, in W."""
        return i_in**2 * self.r1 + (i_in - i_out) ** 2 * self.r3 + i_out**2 * self.r2


def synthesize_tpad(db: float, z0: float = DEFAULT_Z0) -> TPad:
    """
    Matched T-pad for a given attenuation and characteristic impedance.

    Args:
        db: Attenuation in dB, > 0
        z0: Characteristic impedance in Ohm, > 0

    Returns:
        TPad: r1 = r2 = z0 (a - 1) / (a + 1), r3 = 2 z0 a / (a² - 1), a = 10^(dB/20)

    Raises:
        InvalidAttenuationError: If db <= 0 or z0 <= 0
    """
    if not db > 0:
        raise InvalidAttenuationError(f"Attenuation must be positive, got {db} dB")
    if not z0 > 0:
        raise InvalidAttenuationError(f"Characteristic impedance must be positive, got {z0} Ohm")
    a = 10.0 ** (db / 20.0)
    series = z0 * (a - 1.0) / (a + 1.0)
    shunt = 2.0 * z0 * a / (a * a - 1.0)
    return TPad(attenuation_db=float(db), z0=float(z0), r1=series, r2=series, r3=shunt)


@dataclass(frozen=True)
class LineSpec:
    """One signal line: kind, per-stage attenuators and drive."""

    kind: LineKind
    attenuation: Dict[str, float] = field(default_factory=dict)  # stage id -> dB
    target_current: float = 0.0  # A, at the lowest stage (DC kinds)
    pump_power: float = 0.0  # W, at the directional coupler input (TWPA pump)
    termination_stage: Optional[str] = None  # pump termination, default lowest stage

    def __post_init__(self):
        object.__setattr__(self, "kind", LineKind(self.kind))
        attenuation = {str(k): float(v) for k, v in self.attenuation.items()}
        object.__setattr__(self, "attenuation", attenuation)
        for stage, db in self.attenuation.items():
            if not db >= 0:
                raise AttenuatorError(f"{self.kind.value}: attenuation at {stage} must be >= 0 dB")
        if not self.target_current >= 0:
            raise AttenuatorError(f"{self.kind.value}: target current must be >= 0")
        if not self.pump_power >= 0:
            raise AttenuatorError(f"{self.kind.value}: pump power must be >= 0")

    def pads(self, fridge: FridgeModel, z0: float = DEFAULT_Z0) -> Dict[str, TPad]:
        """
        Synthesized pads keyed by stage, top to bottom.

        0 dB entries are absent pads. Pads on the uncooled top stage are ignored.
        """
        pads: Dict[str, TPad] = {}
        for stage_id in sorted(self.attenuation, key=fridge.index):
            db = self.attenuation[stage_id]
            if db == 0:
                continue
            if fridge.index(stage_id) == 0:
                logger.warning(
                    f"{self.kind.value}: {db} dB pad at uncooled stage {stage_id} ignored"
                )
                continue
            pads[stage_id] = synthesize_tpad(db, z0)
        return pads

    def to_dict(self) -> Dict:
        data: Dict = {"kind": self.kind.value, "attenuation_dB": dict(self.attenuation)}
        if self.kind.is_dc:
            data["target_current_A"] = self.target_current
        if self.kind is LineKind.TWPA_PUMP:
            data["pump_power_W"] = self.pump_power
            if self.termination_stage:
                data["termination_stage"] = self.termination_stage
        return data


@dataclass(frozen=True)
class FixedLoad:
    """A fixed dissipator such as an amplifier."""

    stage: str
    power: float  # W
    label: str = ""
    scale: LoadScale = LoadScale.READOUT_CIRCUIT

    def __post_init__(self):
        object.__setattr__(self, "scale", LoadScale(self.scale))
        if not self.power >= 0:
            raise AttenuatorError(f"Fixed load '{self.label}' must not be negative")

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "stage": self.stage,
            "power_W": self.power,
            "per": self.scale.value,
        }


@dataclass
class CurrentProfile:
    """DC currents along a line, in A."""

    run_currents: Dict[str, float]  # run arriving at each cooled stage
    below_lowest: float  # isothermal run down to the processor
    pad_currents: Dict[str, Tuple[float, float]]  # stage -> (I_in, I_out)
    pads: Dict[str, TPad]

    @property
    def input_current(self) -> float:
        """Current entering the fridge at the top run."""
        return next(iter(self.run_currents.values()))


@dataclass
class ActiveLoads:
    """Per-stage active loads of one line, in W."""

    coax: Dict[str, float]
    attenuator: Dict[str, float]
    termination: Dict[str, float]
    below_lowest: float = 0.0  # part of coax at the lowest stage from the run below it

    @classmethod
    def zeros(cls, fridge: FridgeModel) -> "ActiveLoads":
        ids = [s.id for s in fridge.cooled_stages]
        return cls(
            coax=dict.fromkeys(ids, 0.0),
            attenuator=dict.fromkeys(ids, 0.0),
            termination=dict.fromkeys(ids, 0.0),
        )

    def total(self, stage: str) -> float:
        return self.coax[stage] + self.attenuator[stage] + self.termination[stage]

    def totals(self) -> Dict[str, float]:
        return {stage: self.total(stage) for stage in self.coax}

    def scaled(self, factor: float) -> "ActiveLoads":
        return ActiveLoads(
            coax={k: factor * v for k, v in self.coax.items()},
            attenuator={k: factor * v for k, v in self.attenuator.items()},
            termination={k: factor * v for k, v in self.termination.items()},
            below_lowest=factor * self.below_lowest,
        )

    def __add__(self, other: "ActiveLoads") -> "ActiveLoads":
        return ActiveLoads(
            coax={k: v + other.coax[k] for k, v in self.coax.items()},
            attenuator={k: v + other.attenuator[k] for k, v in self.attenuator.items()},
            termination={k: v + other.termination[k] for k, v in self.termination.items()},
            below_lowest=self.below_lowest + other.below_lowest,
        )


def segment_resistance(cable: CableSpec, segment: Segment) -> float:
    """
    DC resistance of the signal conductor over a run, in Ohm.

    Assumes a temperature profile linear in position: (L / A) times the mean of rho
    over [t_low, t_high].
    """
    if segment.length == 0:
        return 0.0
    geometry = segment.length / cable.signal_area
    if segment.isothermal:
        return geometry * eval_property(cable.resistivity, segment.t_low)
    mean_rho = integrate_property(cable.resistivity, segment.t_low, segment.t_high) / (
        segment.t_high - segment.t_low
    )
    return geometry * mean_rho


def back_propagate_current(
    line: LineSpec, fridge: FridgeModel, cable: CableSpec, z0: float = DEFAULT_Z0
) -> CurrentProfile:
    """
    Currents needed upstream to deliver the target current at the processor.

    Walking up from the lowest stage, a pad at stage s with output load R_load needs
    I_in = I_out (r2 + r3 + R_load) / r3. R_load is the DC resistance seen at the pad
    output: the cable runs down to the lowest plate (chip as a short, the run below
    the lowest plate excluded) plus the input resistance of any pad further down.

    Raises:
        NoTargetCurrentError: If the line is not a DC kind
    """
    if not line.kind.is_dc:
        raise NoTargetCurrentError(f"{line.kind.value} lines carry no DC target current")

    pads = line.pads(fridge, z0)
    current = line.target_current
    load = 0.0
    run_currents: Dict[str, float] = {}
    pad_currents: Dict[str, Tuple[float, float]] = {}

    for stage in reversed(fridge.cooled_stages):
        pad = pads.get(stage.id)
        if pad is not None:
            i_out = current
            current = i_out * (pad.r2 + pad.r3 + load) / pad.r3
            pad_currents[stage.id] = (current, i_out)
            logger.debug(
                f"{line.kind.value}: {pad.attenuation_db} dB at {stage.id}, load {load:.4f} Ohm, "
                f"I_in {current * 1e3:.4f} mA, I_out {i_out * 1e3:.4f} mA"
            )
            load = pad.input_resistance(load)
        run_currents[stage.id] = current
        load += segment_resistance(cable, fridge.incoming_segment(stage.id))

    ordered = {s.id: run_currents[s.id] for s in fridge.cooled_stages}
    return CurrentProfile(
        run_currents=ordered,
        below_lowest=line.target_current,
        pad_currents={s: pad_currents[s] for s in pads if s in pad_currents},
        pads=pads,
    )


def line_active_loads(
    line: LineSpec, fridge: FridgeModel, cable: CableSpec, z0: float = DEFAULT_Z0
) -> ActiveLoads:
    """
    Ohmic, attenuator and termination loads of one line, per stage.

    DC lines use the back-propagated current profile; pump lines use matched power
    flow; other RF lines carry negligible current and contribute nothing.
    """
    if line.kind is LineKind.TWPA_PUMP:
        return twpa_pump_loads(line, fridge, cable, z0)

    loads = ActiveLoads.zeros(fridge)
    if not line.kind.is_dc:
        return loads

    profile = back_propagate_current(line, fridge, cable, z0)
    for stage_id, current in profile.run_currents.items():
        resistance = segment_resistance(cable, fridge.incoming_segment(stage_id))
        loads.coax[stage_id] += current**2 * resistance

    below = profile.below_lowest**2 * segment_resistance(cable, fridge.below_lowest_segment())
    loads.coax[fridge.lowest.id] += below
    loads.below_lowest = below

    for stage_id, (i_in, i_out) in profile.pad_currents.items():
        loads.attenuator[stage_id] += profile.pads[stage_id].dissipation(i_in, i_out)
    return loads


def pump_rms_current(power: float, z0: float = DEFAULT_Z0) -> float:
    """RMS current that dissipates `power` in a matched load, in A."""
    return math.sqrt(power / z0)


def twpa_pump_loads(
    pump: LineSpec,
    fridge: FridgeModel,
    cable: Optional[CableSpec] = None,
    z0: float = DEFAULT_Z0,
) -> ActiveLoads:
    """
    Matched power-flow loads of a pump line.

    The power at the coupler input is dissipated in the termination. Walking upward,
    each pad passes P_out and takes P_in = P_out 10^(dB/10), dissipating the difference
    at its stage. With a cable, runs above the termination also carry I² R with
    I = sqrt(P / z0); the current scales by sqrt(P_in / P_out) across each pad.

    Raises:
        AttenuatorError: If the line is not a pump or terminates on the top stage
    """
    if pump.kind is not LineKind.TWPA_PUMP:
        raise AttenuatorError(f"{pump.kind.value} is not a pump line")

    loads = ActiveLoads.zeros(fridge)
    if pump.pump_power == 0:
        return loads

    termination = pump.termination_stage or fridge.lowest.id
    end = fridge.index(termination)
    if end == 0:
        raise AttenuatorError(f"Pump termination cannot sit on the uncooled stage {termination}")
    loads.termination[termination] = pump.pump_power

    pads = pump.pads(fridge, z0)
    for stage_id in pads:
        if fridge.index(stage_id) > end:
            logger.warning(f"Pump pad at {stage_id} lies below the termination and is ignored")

    power = pump.pump_power
    for stage in reversed(fridge.stages[1 : end + 1]):
        pad = pads.get(stage.id)
        if pad is not None:
            p_in = power * 10.0 ** (pad.attenuation_db / 10.0)
            loads.attenuator[stage.id] += p_in - power
            power = p_in
        if cable is not None:
            resistance = segment_resistance(cable, fridge.incoming_segment(stage.id))
            loads.coax[stage.id] += power / z0 * resistance
    return loads
