"""
Run configuration.

A run is described by one JSON file. Every physical quantity key names its unit in a
suffix (`temperature_K`, `cooling_power_W`, `length_m`, `area_mm2`, `target_current_mA`,
`pump_power_dBm`, ...); unknown keys and quantities without a recognised suffix are
rejected. Emitted configurations use SI suffixes so that reading them back gives
identical reports.

Lookup order:
    1. An explicit path (--config)
    2. The CRYOWIRE_CONFIG environment variable
    3. ./cryowire.json
    4. ~/.cryowire/cryowire.json
    5. The packaged XLD1000-SL default
"""

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from .. import get_data_path
from ..attenuators import (
    DEFAULT_Z0,
    AttenuatorError,
    FixedLoad,
    LineKind,
    LineSpec,
    LoadScale,
    dbm_to_watts,
)
from ..cables import CableError, CableLayer, CableSpec, StaticMode, sc_086_50_scn_cn
from ..fridge import DEFAULT_LINE_CAPACITY, FridgeError, FridgeModel, Stage, xld1000_sl
from ..materials import MaterialError, MaterialLibrary
from ..system import (
    DEFAULT_PRACTICAL_QUBIT_LIMIT,
    DEFAULT_READOUT_CHAIN_LIMIT,
    BudgetError,
    ProcessorModel,
    default_fixed_loads,
    default_line_templates,
)

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "CRYOWIRE_CONFIG"
CONFIG_FILENAME = "cryowire.json"
DEFAULT_CONFIG = "xld1000_sl.json"
OUTPUT_FORMATS = ("summary", "csv")

_REQUIRED = object()

# unit suffix -> factor to SI, per dimension
UNITS: Dict[str, Dict[str, Union[float, Callable[[float], float]]]] = {
    "temperature": {"K": 1.0, "mK": 1e-3},
    "power": {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "dBm": dbm_to_watts},
    "current": {"A": 1.0, "mA": 1e-3, "uA": 1e-6},
    "length": {"m": 1.0, "mm": 1e-3},
    "area": {"m2": 1.0, "mm2": 1e-6},
    "resistance": {"ohm": 1.0},
}


class ConfigError(Exception):
    """Custom exception for configuration errors."""

    pass


class _Section:
    """Keys of one JSON object, consumed as they are parsed."""

    def __init__(self, data: Any, where: str):
        if not isinstance(data, dict):
            raise ConfigError(f"{where} must be a JSON object")
        self._data = dict(data)
        self.where = where

    def take(self, key: str, default: Any = _REQUIRED, kind: Optional[type] = None) -> Any:
        if key not in self._data:
            if default is _REQUIRED:
                raise ConfigError(f"{self.where}: missing '{key}'")
            return default
        value = self._data.pop(key)
        if kind is not None and value is not None:
            if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
                raise ConfigError(f"{self.where}.{key} must be an integer, got {value!r}")
            if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
                raise ConfigError(f"{self.where}.{key} must be a number, got {value!r}")
            if kind in (str, list, dict) and not isinstance(value, kind):
                raise ConfigError(f"{self.where}.{key} must be a {kind.__name__}, got {value!r}")
        return float(value) if kind is float and value is not None else value

    def quantity(self, stem: str, dimension: str, default: Any = _REQUIRED) -> Any:
        """Take `<stem>_<unit>` for exactly one known unit and convert it to SI."""
        units = UNITS[dimension]
        present = [u for u in units if f"{stem}_{u}" in self._data]
        if len(present) > 1:
            keys = ", ".join(f"{stem}_{u}" for u in present)
            raise ConfigError(f"{self.where}: give only one of {keys}")
        if not present:
            if default is _REQUIRED:
                options = ", ".join(f"{stem}_{u}" for u in units)
                raise ConfigError(f"{self.where}: missing {stem} (one of {options})")
            return default
        unit = present[0]
        value = self.take(f"{stem}_{unit}", kind=float)
        if value is None:
            return default if default is not _REQUIRED else None
        factor = units[unit]
        return factor(value) if callable(factor) else value * factor

    def finish(self) -> None:
        if self._data:
            raise ConfigError(f"{self.where}: unknown key(s) {', '.join(sorted(self._data))}")


@dataclass
class RunConfig:
    """Everything a budget run needs."""

    fridge: FridgeModel = field(default_factory=xld1000_sl)
    library: MaterialLibrary = field(default_factory=MaterialLibrary.builtin)
    cable: CableSpec = field(default_factory=sc_086_50_scn_cn)
    processor: ProcessorModel = field(default_factory=lambda: ProcessorModel(12))
    fixed_loads: List[FixedLoad] = field(default_factory=default_fixed_loads)
    z0: float = DEFAULT_Z0
    margin: float = 1.0
    readout_chain_limit: Optional[int] = DEFAULT_READOUT_CHAIN_LIMIT
    practical_qubit_limit: Optional[int] = DEFAULT_PRACTICAL_QUBIT_LIMIT
    static_mode: StaticMode = StaticMode.NET
    output_format: str = "summary"
    library_paths: List[str] = field(default_factory=list)
    source: Optional[str] = field(default=None, compare=False)

    def budget_options(self) -> Dict[str, Any]:
        """Keyword options for system_budget and sweep_sizes."""
        return {
            "margin": self.margin,
            "static_mode": self.static_mode,
            "z0": self.z0,
            "readout_chain_limit": self.readout_chain_limit,
            "practical_qubit_limit": self.practical_qubit_limit,
        }

    def to_dict(self) -> Dict:
        lines = {}
        for kind, line in self.processor.lines.items():
            entry = line.to_dict()
            entry.pop("kind")
            lines[kind.value] = entry
        return {
            "fridge": self.fridge.to_dict(),
            "materials": {"library_paths_json": list(self.library_paths)},
            "cable": self.cable.to_dict(),
            "processor": {
                "n": self.processor.n,
                "readout_multiplex": self.processor.readout_multiplex,
            },
            "lines": lines,
            "fixed_loads": [load.to_dict() for load in self.fixed_loads],
            "analysis": {
                "z0_ohm": self.z0,
                "margin": self.margin,
                "readout_chain_limit": self.readout_chain_limit,
                "practical_qubit_limit": self.practical_qubit_limit,
                "static_mode": self.static_mode.value,
                "format": self.output_format,
            },
        }

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    @classmethod
    def from_dict(cls, data: Dict, base_dir: Optional[Union[str, Path]] = None) -> "RunConfig":
        """
        Build a RunConfig from parsed JSON.

        Missing top-level sections fall back to the built-in XLD1000-SL setup.
        Relative material file paths resolve against `base_dir`.

        Raises:
            ConfigError: On unknown keys, bad units or values that violate a model invariant
        """
        root = _Section(data, "config")
        base = Path(base_dir) if base_dir is not None else Path.cwd()
        try:
            fridge = _parse_fridge(root.take("fridge", None))

            materials = _Section(root.take("materials", {}), "materials")
            library_paths = [
                str((base / p).resolve())
                for p in materials.take("library_paths_json", [], kind=list)
            ]
            materials.finish()
            library = MaterialLibrary.builtin()
            for path in library_paths:
                library = library.merge(MaterialLibrary.load(path))

            cable = _parse_cable(root.take("cable", None), library)

            processor_data = _Section(root.take("processor", {}), "processor")
            lines = _parse_lines(root.take("lines", {}), fridge)
            processor = ProcessorModel(
                n=processor_data.take("n", 12, kind=int),
                readout_multiplex=processor_data.take("readout_multiplex", 6, kind=int),
                lines=lines,
            )
            processor_data.finish()

            fixed_data = root.take("fixed_loads", None)
            fixed = (
                default_fixed_loads() if fixed_data is None else _parse_fixed(fixed_data, fridge)
            )

            analysis = _Section(root.take("analysis", {}), "analysis")
            config = cls(
                fridge=fridge,
                library=library,
                cable=cable,
                processor=processor,
                fixed_loads=fixed,
                z0=analysis.quantity("z0", "resistance", DEFAULT_Z0),
                margin=analysis.take("margin", 1.0, kind=float),
                readout_chain_limit=analysis.take(
                    "readout_chain_limit", DEFAULT_READOUT_CHAIN_LIMIT, kind=int
                ),
                practical_qubit_limit=analysis.take(
                    "practical_qubit_limit", DEFAULT_PRACTICAL_QUBIT_LIMIT, kind=int
                ),
                static_mode=_enum(StaticMode, analysis.take("static_mode", "net"), "static_mode"),
                output_format=analysis.take("format", "summary", kind=str),
                library_paths=library_paths,
            )
            analysis.finish()
            root.finish()
        except (FridgeError, CableError, AttenuatorError, BudgetError, MaterialError) as e:
            raise ConfigError(str(e)) from e

        if config.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"analysis.format must be one of {OUTPUT_FORMATS}")
        if not config.margin > 0:
            raise ConfigError(f"analysis.margin must be positive, got {config.margin}")
        if not config.z0 > 0:
            raise ConfigError(f"analysis.z0_ohm must be positive, got {config.z0}")
        return config


def _enum(enum_cls, value, where: str):
    try:
        return enum_cls(value)
    except ValueError:
        options = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{where}: '{value}' is not one of {options}") from None


def _parse_fridge(data: Optional[Dict]) -> FridgeModel:
    if data is None:
        return xld1000_sl()
    section = _Section(data, "fridge")
    stages = []
    for i, entry in enumerate(section.take("stages", kind=list)):
        stage = _Section(entry, f"fridge.stages[{i}]")
        stages.append(
            Stage(
                id=str(stage.take("id", kind=str)),
                temperature=stage.quantity("temperature", "temperature"),
                cooling_power=stage.quantity("cooling_power", "power", None),
                length=stage.quantity("length", "length", None),
                name=stage.take("name", "", kind=str),
            )
        )
        stage.finish()
    fridge = FridgeModel(
        name=section.take("name", "fridge", kind=str),
        stages=tuple(stages),
        below_lowest_length=section.quantity("below_mxc_length", "length", 0.0),
        capacity=section.take("line_capacity", DEFAULT_LINE_CAPACITY, kind=int),
    )
    section.finish()
    return fridge


def _parse_cable(data: Optional[Dict], library: MaterialLibrary) -> CableSpec:
    if data is None:
        return sc_086_50_scn_cn(library)
    section = _Section(data, "cable")
    layers = []
    for i, entry in enumerate(section.take("layers", kind=list)):
        layer = _Section(entry, f"cable.layers[{i}]")
        material = layer.take("material", kind=str)
        layers.append(
            CableLayer(
                name=layer.take("name", kind=str),
                area=layer.quantity("area", "area"),
                conductivity=library.get(material),
                material=material,
            )
        )
        layer.finish()
    cable = CableSpec(
        name=section.take("name", "cable", kind=str),
        layers=tuple(layers),
        resistivity=library.get(section.take("resistivity_material", "inner_rho", kind=str)),
        signal_layer=section.take("signal_layer", "inner", kind=str),
    )
    section.finish()
    return cable


def _parse_lines(data: Dict, fridge: FridgeModel) -> Dict[LineKind, LineSpec]:
    """Line templates; kinds not listed keep their defaults."""
    lines = default_line_templates()
    section = _Section(data, "lines")
    for key in list(data):
        kind = _enum(LineKind, key, "lines")
        entry = _Section(section.take(key), f"lines.{key}")
        attenuation = entry.take("attenuation_dB", {}, kind=dict)
        for stage_id, db in attenuation.items():
            fridge.index(stage_id)
            if isinstance(db, bool) or not isinstance(db, (int, float)):
                raise ConfigError(f"lines.{key}.attenuation_dB.{stage_id} must be a number")
        termination = entry.take("termination_stage", None, kind=str)
        if termination is not None:
            fridge.index(termination)
        lines[kind] = LineSpec(
            kind=kind,
            attenuation=attenuation,
            target_current=entry.quantity("target_current", "current", 0.0),
            pump_power=entry.quantity("pump_power", "power", 0.0),
            termination_stage=termination,
        )
        entry.finish()
    section.finish()
    return lines


def _parse_fixed(data: List, fridge: FridgeModel) -> List[FixedLoad]:
    if not isinstance(data, list):
        raise ConfigError("fixed_loads must be a list")
    loads = []
    for i, entry in enumerate(data):
        section = _Section(entry, f"fixed_loads[{i}]")
        stage = section.take("stage", kind=str)
        fridge.index(stage)
        loads.append(
            FixedLoad(
                stage=stage,
                power=section.quantity("power", "power"),
                label=section.take("label", "", kind=str),
                scale=_enum(LoadScale, section.take("per", "readout_circuit"), "per"),
            )
        )
        section.finish()
    return loads


def find_config(explicit: Optional[str] = None) -> str:
    """
    Find the configuration file to use.

    Args:
        explicit: Path given on the command line

    Returns:
        str: Path of the first configuration found, the packaged default last

    Raises:
        ConfigError: If an explicitly requested file does not exist
    """
    requests = ((explicit, "--config"), (os.environ.get(CONFIG_ENV_VAR), CONFIG_ENV_VAR))
    for requested, origin in requests:
        if requested:
            if not os.path.isfile(requested):
                raise ConfigError(f"Config file from {origin} not found: {requested}")
            return requested

    search_paths = [
        os.path.join(os.getcwd(), CONFIG_FILENAME),
        os.path.join(os.path.expanduser("~"), ".cryowire", CONFIG_FILENAME),
    ]
    for path in search_paths:
        if os.path.isfile(path):
            return path
    return get_data_path(DEFAULT_CONFIG)


def load_config(path: Optional[str] = None) -> RunConfig:
    """Load a run configuration, searching the default locations when no path is given."""
    path = find_config(path)
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Could not read config {path}: {e}") from e
    config = RunConfig.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))
    config.source = path
    logger.info(f"Loaded config from {path}")
    return config
