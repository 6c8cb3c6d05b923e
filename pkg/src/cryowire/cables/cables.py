"""
Static (conduction) heat loads of multi-layer coaxial cables.

Each layer conducts independently: q = (A / L) * integral of k(T) dT over the
segment. Radial heat transfer between layers is ignored.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

from ..fridge import FridgeModel, Segment
from ..materials import MaterialLibrary, PolyLogModel, UnitKind, integrate_property

logger = logging.getLogger(__name__)

MM2 = 1e-6  # m² per mm²


class CableError(Exception):
    """Custom exception for cable model errors."""

    pass


class StaticMode(str, Enum):
    """How a per-stage static value is reported."""

    NET = "net"  # incoming minus outgoing
    INCOMING = "incoming"  # incoming run only, for diagnosis


@dataclass(frozen=True)
class CableLayer:
    """One conducting layer of a cable."""

    name: str
    area: float  # m²
    conductivity: PolyLogModel
    material: str = ""

    def __post_init__(self):
        if not self.area > 0:
            raise CableError(f"Layer '{self.name}' needs a positive area, got {self.area}")
        if self.conductivity.unit_kind is not UnitKind.THERMAL_CONDUCTIVITY:
            raise CableError(f"Layer '{self.name}' conductivity model has the wrong unit")
        if not self.material:
            object.__setattr__(self, "material", self.conductivity.name)


@dataclass(frozen=True)
class CableSpec:
    """Layered coax with the resistivity of its signal conductor."""

    name: str
    layers: Tuple[CableLayer, ...]
    resistivity: PolyLogModel
    signal_layer: str = "inner"

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers:
            raise CableError(f"Cable '{self.name}' needs at least one layer")
        names = [layer.name for layer in layers]
        if len(set(names)) != len(names):
            raise CableError(f"Cable '{self.name}' has duplicate layer names: {names}")
        if self.signal_layer not in names:
            raise CableError(f"Cable '{self.name}' has no signal layer '{self.signal_layer}'")
        if self.resistivity.unit_kind is not UnitKind.RESISTIVITY:
            raise CableError(f"Cable '{self.name}' resistivity model has the wrong unit")

    def layer(self, name: str) -> CableLayer:
        for layer in self.layers:
            if layer.name == name:
                return layer
        raise CableError(f"Cable '{self.name}' has no layer '{name}'")

    @property
    def signal_area(self) -> float:
        return self.layer(self.signal_layer).area

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "layers": [
                {"name": layer.name, "area_m2": layer.area, "material": layer.material}
                for layer in self.layers
            ],
            "resistivity_material": self.resistivity.name,
            "signal_layer": self.signal_layer,
        }


def sc_086_50_scn_cn(library: Optional[MaterialLibrary] = None) -> CableSpec:
    """Bluefors HDW SC-086/50-SCN-CN coax built from the library's conductor models."""
    library = library or MaterialLibrary.builtin()
    return CableSpec(
        name="SC-086/50-SCN-CN",
        layers=(
            CableLayer("outer", 0.2389 * MM2, library.get("outer_k")),
            CableLayer("dielectric", 0.3098 * MM2, library.get("ptfe_k")),
            CableLayer("inner", 0.0324 * MM2, library.get("inner_k")),
        ),
        resistivity=library.get("inner_rho"),
        signal_layer="inner",
    )


def layer_static_load(layer: CableLayer, segment: Segment) -> float:
    """
    Conduction load through one layer over one segment, in W.

    Raises:
        CableError: If the segment has zero length but a temperature drop
        TemperatureOutOfRangeError: If the segment leaves the model's range
    """
    if segment.isothermal:
        return 0.0
    if segment.length == 0:
        raise CableError(
            f"Segment {segment.upper}->{segment.lower} has zero length across "
            f"{segment.t_high - segment.t_low} K"
        )
    integral = integrate_property(layer.conductivity, segment.t_low, segment.t_high)
    return layer.area / segment.length * integral


def layer_static_loads(cable: CableSpec, segment: Segment) -> Dict[str, float]:
    """Per-layer conduction loads over one segment, in W."""
    return {layer.name: layer_static_load(layer, segment) for layer in cable.layers}


def cable_static_load(cable: CableSpec, segment: Segment) -> float:
    """Total conduction load of a cable over one segment, in W."""
    return sum(layer_static_load(layer, segment) for layer in cable.layers)


def stage_net_static(
    cable: CableSpec,
    fridge: FridgeModel,
    stage: str,
    count: int = 1,
    mode: StaticMode = StaticMode.NET,
) -> float:
    """
    Static load deposited on a stage by `count` identical cables, in W.

    NET is the incoming run minus the outgoing run; the lowest stage has no outgoing
    run and the isothermal run below it carries nothing. INCOMING reports the incoming
    run alone. The room-temperature stage receives nothing.

    Raises:
        UnknownStageError: If the stage is not part of the fridge
        CableError: If count is negative
    """
    if count < 0:
        raise CableError(f"Cable count must not be negative, got {count}")
    incoming_segment = fridge.incoming_segment(stage)
    if incoming_segment is None:
        return 0.0

    incoming = cable_static_load(cable, incoming_segment)
    if StaticMode(mode) is StaticMode.INCOMING:
        return count * incoming

    outgoing_segment = fridge.outgoing_segment(stage)
    outgoing = 0.0 if outgoing_segment is None else cable_static_load(cable, outgoing_segment)
    logger.debug(f"{cable.name} at {stage}: incoming {incoming:.4e} W, outgoing {outgoing:.4e} W")
    return count * (incoming - outgoing)
