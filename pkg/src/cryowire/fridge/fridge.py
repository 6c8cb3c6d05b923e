"""
Dilution refrigerator geometry: stages, their cooling powers and the cable runs
between them.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

DEFAULT_LINE_CAPACITY = 1008
PROCESSOR_ID = "processor"


class FridgeError(Exception):
    """Custom exception for fridge model errors."""

    pass


class UnknownStageError(FridgeError):
    """Raised when a stage id is not part of the fridge."""

    pass


@dataclass(frozen=True)
class Stage:
    """One temperature stage (plate) of the refrigerator."""

    id: str
    temperature: float  # K
    cooling_power: Optional[float] = None  # W, None for the room-temperature stage
    length: Optional[float] = None  # m, cable run from the stage above
    name: str = ""

    @property
    def cooled(self) -> bool:
        return self.cooling_power is not None

    def to_dict(self) -> Dict:
        data: Dict = {"id": self.id, "temperature_K": self.temperature}
        if self.name:
            data["name"] = self.name
        if self.cooling_power is not None:
            data["cooling_power_W"] = self.cooling_power
        if self.length is not None:
            data["length_m"] = self.length
        return data


@dataclass(frozen=True)
class Segment:
    """A cable run between two anchoring points."""

    upper: str
    lower: str
    length: float  # m
    t_high: float  # K
    t_low: float  # K

    def __post_init__(self):
        if self.length < 0:
            raise FridgeError(f"Segment {self.upper}->{self.lower} has negative length")
        if not 0 < self.t_low <= self.t_high:
            raise FridgeError(
                f"Segment {self.upper}->{self.lower} needs 0 < t_low <= t_high, "
                f"got {self.t_low} K, {self.t_high} K"
            )

    @property
    def isothermal(self) -> bool:
        return self.t_high == self.t_low


@dataclass(frozen=True)
class FridgeModel:
    """
    Ordered stages from room temperature down to the mixing chamber.

    Every stage after the first carries the length of the cable run coming from the
    stage above it. The run from the lowest stage down to the processor is isothermal.
    """

    name: str
    stages: Tuple[Stage, ...]
    below_lowest_length: float = 0.0  # m
    capacity: int = DEFAULT_LINE_CAPACITY

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if len(stages) < 2:
            raise FridgeError(f"Fridge '{self.name}' needs at least two stages")
        ids = [s.id for s in stages]
        if len(set(ids)) != len(ids) or PROCESSOR_ID in ids:
            raise FridgeError(f"Fridge '{self.name}' has duplicate or reserved stage ids: {ids}")
        for upper, lower in zip(stages, stages[1:]):
            if not lower.temperature < upper.temperature:
                raise FridgeError(
                    f"Stage temperatures must strictly decrease: {upper.id} {upper.temperature} K, "
                    f"{lower.id} {lower.temperature} K"
                )
        if stages[-1].temperature <= 0:
            raise FridgeError(f"Stage {stages[-1].id} temperature must be positive")
        for stage in stages[1:]:
            if stage.length is None or not stage.length > 0:
                raise FridgeError(f"Stage {stage.id} needs a positive incoming cable length")
            if stage.cooling_power is None or not stage.cooling_power > 0:
                raise FridgeError(f"Stage {stage.id} needs a positive cooling power")
        if self.below_lowest_length < 0:
            raise FridgeError("Below-lowest-stage length must not be negative")
        if not self.capacity > 0:
            raise FridgeError(f"Line capacity must be positive, got {self.capacity}")

    @property
    def stage_ids(self) -> List[str]:
        return [s.id for s in self.stages]

    @property
    def top(self) -> Stage:
        return self.stages[0]

    @property
    def lowest(self) -> Stage:
        return self.stages[-1]

    @property
    def cooled_stages(self) -> List[Stage]:
        return list(self.stages[1:])

    def index(self, stage_id: str) -> int:
        for i, stage in enumerate(self.stages):
            if stage.id == stage_id:
                return i
        raise UnknownStageError(
            f"Unknown stage '{stage_id}'. Stages: {', '.join(self.stage_ids)}"
        )

    def stage(self, stage_id: str) -> Stage:
        return self.stages[self.index(stage_id)]

    def incoming_segment(self, stage_id: str) -> Optional[Segment]:
        """The run arriving at a stage from above, None for the top stage."""
        i = self.index(stage_id)
        if i == 0:
            return None
        upper, lower = self.stages[i - 1], self.stages[i]
        return Segment(upper.id, lower.id, lower.length, upper.temperature, lower.temperature)

    def outgoing_segment(self, stage_id: str) -> Optional[Segment]:
        """The run leaving a stage downward, None for the lowest stage."""
        i = self.index(stage_id)
        if i == len(self.stages) - 1:
            return None
        return self.incoming_segment(self.stages[i + 1].id)

    def segments(self) -> List[Segment]:
        return [self.incoming_segment(s.id) for s in self.stages[1:]]

    def below_lowest_segment(self) -> Segment:
        t = self.lowest.temperature
        return Segment(self.lowest.id, PROCESSOR_ID, self.below_lowest_length, t, t)

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "stages": [s.to_dict() for s in self.stages],
            "below_mxc_length_m": self.below_lowest_length,
            "line_capacity": self.capacity,
        }


def xld1000_sl() -> FridgeModel:
    """Bluefors XLD1000-SL stage temperatures, cooling powers and HDW cable lengths."""
    return FridgeModel(
        name="XLD1000-SL",
        stages=(
            Stage("300K", 297.0, name="Room temperature"),
            Stage("50K", 40.0, 30.0, 0.3053, "50K flange"),
            Stage("4K", 3.5, 0.7, 0.3155, "4K flange"),
            Stage("Still", 1.4, 7e-3, 0.2775, "Still flange"),
            Stage("CP", 0.2, 1e-3, 0.1965, "Cold plate"),
            Stage("MXC", 0.02, 30e-6, 0.1965, "Mixing chamber"),
        ),
        below_lowest_length=0.1965,
        capacity=DEFAULT_LINE_CAPACITY,
    )
