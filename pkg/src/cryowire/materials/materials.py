"""
Temperature-dependent material properties for cryogenic wiring.

A property (thermal conductivity k(T) or DC resistivity rho(T)) is described by a
log-polynomial model:

    value(T) = 10 ** (a + b*log10(T) + c*log10(T)**2 + ... + i*log10(T)**8)

valid over [t_min, t_max], plus an extension policy below t_min and above t_max.
All quantities are SI: K, W/(m K), Ohm m.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

logger = logging.getLogger(__name__)

COEFFICIENT_COUNT = 9
DEFAULT_EPSREL = 1e-10
QUAD_LIMIT = 200

ArrayLike = Union[float, np.ndarray]


class MaterialError(Exception):
    """Custom exception for material model errors."""

    pass


class TemperatureOutOfRangeError(MaterialError):
    """Raised when a temperature lies outside the evaluable range of a model."""

    pass


class IntegrationFailureError(MaterialError):
    """Raised when quadrature does not reach the requested accuracy."""

    pass


class UnknownMaterialError(MaterialError):
    """Raised when a material name is not present in a library."""

    pass


class MaterialFileError(MaterialError):
    """Raised when a material definition file cannot be parsed."""

    pass


class UnitKind(str, Enum):
    """Physical quantity described by a model."""

    THERMAL_CONDUCTIVITY = "thermal_conductivity"
    RESISTIVITY = "resistivity"

    @property
    def unit(self) -> str:
        return "W/(m K)" if self is UnitKind.THERMAL_CONDUCTIVITY else "Ohm m"


class LowExtensionKind(str, Enum):
    LINEAR_TO_ORIGIN = "linear_to_origin"
    CONSTANT_BELOW = "constant_below"


class HighExtensionKind(str, Enum):
    FORBIDDEN = "forbidden"
    EVALUATE_UP_TO = "evaluate_up_to"


@dataclass(frozen=True)
class LowExtension:
    """Behaviour below t_min."""

    kind: LowExtensionKind = LowExtensionKind.LINEAR_TO_ORIGIN
    value: Optional[float] = None  # model unit, CONSTANT_BELOW only

    @classmethod
    def linear_to_origin(cls) -> "LowExtension":
        return cls(LowExtensionKind.LINEAR_TO_ORIGIN)

    @classmethod
    def constant_below(cls, value: float) -> "LowExtension":
        return cls(LowExtensionKind.CONSTANT_BELOW, float(value))

    def to_dict(self) -> Dict:
        data: Dict = {"kind": self.kind.value}
        if self.kind is LowExtensionKind.CONSTANT_BELOW:
            data["value"] = self.value
        return data


@dataclass(frozen=True)
class HighExtension:
    """Behaviour above t_max."""

    kind: HighExtensionKind = HighExtensionKind.FORBIDDEN
    limit: Optional[float] = None  # K, EVALUATE_UP_TO only

    @classmethod
    def forbidden(cls) -> "HighExtension":
        return cls(HighExtensionKind.FORBIDDEN)

    @classmethod
    def evaluate_up_to(cls, limit: float) -> "HighExtension":
        return cls(HighExtensionKind.EVALUATE_UP_TO, float(limit))

    def to_dict(self) -> Dict:
        data: Dict = {"kind": self.kind.value}
        if self.kind is HighExtensionKind.EVALUATE_UP_TO:
            data["limit_K"] = self.limit
        return data


@dataclass(frozen=True)
class PolyLogModel:
    """
    Nine-coefficient log10 polynomial property model.

    Coefficients are in ascending powers of log10(T). Instances are immutable and
    hashable so integrals over them can be cached.
    """

    name: str
    coefficients: Tuple[float, ...]
    t_min: float
    t_max: float
    unit_kind: UnitKind = UnitKind.THERMAL_CONDUCTIVITY
    low_extension: LowExtension = field(default_factory=LowExtension.linear_to_origin)
    high_extension: HighExtension = field(default_factory=HighExtension.forbidden)
    source: str = field(default="", compare=False)

    def __post_init__(self):
        coefficients = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "unit_kind", UnitKind(self.unit_kind))

        if len(coefficients) != COEFFICIENT_COUNT:
            raise MaterialError(
                f"Model '{self.name}' needs {COEFFICIENT_COUNT} coefficients, "
                f"got {len(coefficients)}"
            )
        if not all(math.isfinite(c) for c in coefficients):
            raise MaterialError(f"Model '{self.name}' has non-finite coefficients")
        if not 0 < self.t_min < self.t_max:
            raise MaterialError(
                f"Model '{self.name}' needs 0 < t_min < t_max, got [{self.t_min}, {self.t_max}]"
            )

        low = self.low_extension
        if low.kind is LowExtensionKind.LINEAR_TO_ORIGIN:
            anchor = _fit_value(coefficients, self.t_min)
            if not (math.isfinite(anchor) and anchor > 0):
                raise MaterialError(
                    f"Model '{self.name}' has no finite positive value at t_min={self.t_min} K"
                )
        elif low.value is None or not low.value > 0:
            raise MaterialError(f"Model '{self.name}' constant extension must be positive")

        high = self.high_extension
        if high.kind is HighExtensionKind.EVALUATE_UP_TO:
            if high.limit is None or high.limit < self.t_max:
                raise MaterialError(
                    f"Model '{self.name}' evaluation limit must be >= t_max={self.t_max} K"
                )

    @property
    def high_bound(self) -> float:
        """Highest temperature at which the model may be evaluated."""
        if self.high_extension.kind is HighExtensionKind.EVALUATE_UP_TO:
            return float(self.high_extension.limit)
        return self.t_max

    @property
    def anchor_value(self) -> float:
        """Model value at t_min, the anchor of the linear extension."""
        return _fit_value(self.coefficients, self.t_min)

    def to_dict(self, significant: int = 7) -> Dict:
        return {
            "unit_kind": self.unit_kind.value,
            "coefficients": serialize_coefficients(self, significant),
            "t_min_K": self.t_min,
            "t_max_K": self.t_max,
            "low_extension": self.low_extension.to_dict(),
            "high_extension": self.high_extension.to_dict(),
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, name: str, data: Dict) -> "PolyLogModel":
        try:
            low_data = data.get("low_extension", {"kind": "linear_to_origin"})
            low_kind = LowExtensionKind(low_data["kind"])
            low = (
                LowExtension.constant_below(float(low_data["value"]))
                if low_kind is LowExtensionKind.CONSTANT_BELOW
                else LowExtension.linear_to_origin()
            )
            high_data = data.get("high_extension", {"kind": "forbidden"})
            high_kind = HighExtensionKind(high_data["kind"])
            high = (
                HighExtension.evaluate_up_to(float(high_data["limit_K"]))
                if high_kind is HighExtensionKind.EVALUATE_UP_TO
                else HighExtension.forbidden()
            )
            return cls(
                name=name,
                coefficients=tuple(float(c) for c in data["coefficients"]),
                t_min=float(data["t_min_K"]),
                t_max=float(data["t_max_K"]),
                unit_kind=UnitKind(data["unit_kind"]),
                low_extension=low,
                high_extension=high,
                source=str(data.get("source", "")),
            )
        except (KeyError, TypeError, ValueError, MaterialError) as e:
            raise MaterialFileError(f"Invalid definition for material '{name}': {e}") from e


def _fit_value(coefficients: Tuple[float, ...], t: ArrayLike) -> ArrayLike:
    return np.power(10.0, P.polyval(np.log10(t), coefficients))


def serialize_coefficients(model: PolyLogModel, significant: int = 7) -> List[str]:
    """Format coefficients as strings with a fixed number of significant figures."""
    return [format(c, f"#.{significant}g") for c in model.coefficients]


def eval_property(model: PolyLogModel, t: ArrayLike) -> ArrayLike:
    """
    Evaluate a property model at one or more temperatures.

    Args:
        model: Property model
        t: Temperature in K, scalar or array

    Returns:
        Value(s) in the model's unit; a float for scalar input

    Raises:
        TemperatureOutOfRangeError: If any temperature is <= 0 or above the high bound
    """
    temps = np.asarray(t, dtype=float)
    if np.any(~(temps > 0)):
        bad = temps[~(temps > 0)].flat[0] if temps.ndim else float(temps)
        raise TemperatureOutOfRangeError(f"{model.name}: temperature must be > 0 K, got {bad}")
    if np.any(temps > model.high_bound):
        bad = temps[temps > model.high_bound].flat[0] if temps.ndim else float(temps)
        raise TemperatureOutOfRangeError(
            f"{model.name}: {bad} K is above the evaluable limit {model.high_bound} K"
        )

    below = temps < model.t_min
    values = _fit_value(model.coefficients, np.where(below, model.t_min, temps))
    if np.any(below):
        if model.low_extension.kind is LowExtensionKind.LINEAR_TO_ORIGIN:
            extended = model.anchor_value * (temps / model.t_min)
        else:
            extended = np.full_like(temps, model.low_extension.value)
        values = np.where(below, extended, values)

    if temps.ndim == 0:
        return float(values)
    return values


def _extension_integral(model: PolyLogModel, a: float, b: float) -> float:
    if model.low_extension.kind is LowExtensionKind.LINEAR_TO_ORIGIN:
        return model.anchor_value / model.t_min * (b * b - a * a) / 2.0
    return model.low_extension.value * (b - a)


@lru_cache(maxsize=4096)
def _integrate_cached(model: PolyLogModel, t_low: float, t_high: float, epsrel: float) -> float:
    total = 0.0
    if t_low < model.t_min:
        total += _extension_integral(model, t_low, min(t_high, model.t_min))

    lower = max(t_low, model.t_min)
    if t_high > lower:
        # full_output reports non-convergence as a fourth element instead of a warning
        result = integrate.quad(
            lambda x: _fit_value(model.coefficients, x),
            lower,
            t_high,
            epsabs=0.0,
            epsrel=epsrel,
            limit=QUAD_LIMIT,
            full_output=1,
        )
        value, abserr = result[0], result[1]
        if len(result) > 3:
            raise IntegrationFailureError(
                f"{model.name}: quadrature over [{lower}, {t_high}] K did not converge: {result[3]}"
            )
        logger.debug(f"{model.name}: quad [{lower}, {t_high}] K = {value:.6e} (err {abserr:.1e})")
        total += value
    return total


def integrate_property(
    model: PolyLogModel, t_low: float, t_high: float, epsrel: float = DEFAULT_EPSREL
) -> float:
    """
    Integrate a property model over a temperature interval.

    The interval is split at t_min. The extension piece is integrated analytically and
    the fitted piece by adaptive Gauss-Kronrod quadrature.

    Args:
        model: Property model
        t_low: Lower bound in K (0 is allowed, the extensions reach the origin)
        t_high: Upper bound in K
        epsrel: Relative accuracy target for the fitted piece

    Returns:
        Definite integral in (model unit) x K

    Raises:
        TemperatureOutOfRangeError: If a bound is negative, above the high bound, or reversed
        IntegrationFailureError: If quadrature does not converge within the subdivision cap
    """
    t_low = float(t_low)
    t_high = float(t_high)
    if t_low < 0:
        raise TemperatureOutOfRangeError(f"{model.name}: lower bound {t_low} K is negative")
    if t_high > model.high_bound:
        raise TemperatureOutOfRangeError(
            f"{model.name}: {t_high} K is above the evaluable limit {model.high_bound} K"
        )
    if t_low > t_high:
        raise TemperatureOutOfRangeError(
            f"{model.name}: reversed bounds [{t_low}, {t_high}] K"
        )
    if t_low == t_high:
        return 0.0
    if not 0 < epsrel <= 1e-6:
        raise MaterialError(f"epsrel must be in (0, 1e-6], got {epsrel}")
    return _integrate_cached(model, t_low, t_high, float(epsrel))


# Built-in fits for the HDW SC-086/50-SCN-CN coax (CuNi conductors, PTFE dielectric).
# Coefficient strings carry the published seven significant figures.
_OUTER_K = (
    "-3.198399", "20.49947", "-66.11415", "117.6898", "-121.4773",
    "76.21467", "-28.74949", "5.984756", "-0.5266892",
)
_PTFE_K = (
    "2.7380", "-30.677", "89.430", "-136.99", "124.69",
    "-69.556", "23.320", "-4.3135", "0.33829",
)
_INNER_K = (
    "-2.750003", "25.84512", "-74.18405", "113.5856", "-96.84387",
    "46.38328", "-11.82451", "1.321682", "-0.02456645",
)
_INNER_RHO = (
    "-8.327474", "10.01214", "-52.83315", "122.5470", "-152.7599",
    "109.0327", "-44.41614", "9.598158", "-0.8539285",
)
INNER_RHO_FLOOR = 9.928e-9  # Ohm m, below 3.8 K


def _builtin_models() -> List[PolyLogModel]:
    return [
        PolyLogModel(
            name="outer_k",
            coefficients=tuple(float(c) for c in _OUTER_K),
            t_min=2.0,
            t_max=297.6,
            unit_kind=UnitKind.THERMAL_CONDUCTIVITY,
            low_extension=LowExtension.linear_to_origin(),
            high_extension=HighExtension.evaluate_up_to(300.0),
            source="SC-086/50-SCN-CN outer conductor, CuNi, measured",
        ),
        PolyLogModel(
            name="ptfe_k",
            coefficients=tuple(float(c) for c in _PTFE_K),
            t_min=4.0,
            t_max=300.0,
            unit_kind=UnitKind.THERMAL_CONDUCTIVITY,
            low_extension=LowExtension.linear_to_origin(),
            high_extension=HighExtension.forbidden(),
            source="PTFE dielectric, NIST cryogenic material properties",
        ),
        PolyLogModel(
            name="inner_k",
            coefficients=tuple(float(c) for c in _INNER_K),
            t_min=2.3,
            t_max=292.6,
            unit_kind=UnitKind.THERMAL_CONDUCTIVITY,
            low_extension=LowExtension.linear_to_origin(),
            high_extension=HighExtension.evaluate_up_to(300.0),
            source="SC-086/50-SCN-CN inner conductor, silver-plated CuNi, measured",
        ),
        PolyLogModel(
            name="inner_rho",
            coefficients=tuple(float(c) for c in _INNER_RHO),
            t_min=3.8,
            t_max=300.0,
            unit_kind=UnitKind.RESISTIVITY,
            low_extension=LowExtension.constant_below(INNER_RHO_FLOOR),
            high_extension=HighExtension.forbidden(),
            source="SC-086/50-SCN-CN inner conductor DC resistivity, measured",
        ),
    ]


class MaterialLibrary:
    """
    Named collection of property models.

    Libraries are treated as immutable: merging returns a new library.
    """

    def __init__(self, models: Optional[Iterable[PolyLogModel]] = None):
        self._models: Dict[str, PolyLogModel] = {}
        for model in models or ():
            self._models[model.name] = model

    @classmethod
    def builtin(cls) -> "MaterialLibrary":
        """Library holding outer_k, ptfe_k, inner_k and inner_rho."""
        return cls(_builtin_models())

    def get(self, name: str) -> PolyLogModel:
        try:
            return self._models[name]
        except KeyError:
            raise UnknownMaterialError(
                f"Unknown material '{name}'. Available: {', '.join(self.names())}"
            ) from None

    def names(self) -> List[str]:
        return sorted(self._models)

    def __contains__(self, name: str) -> bool:
        return name in self._models

    def __len__(self) -> int:
        return len(self._models)

    def with_models(self, *models: PolyLogModel) -> "MaterialLibrary":
        """Return a new library with the given models added or replaced."""
        return MaterialLibrary([*self._models.values(), *models])

    def merge(self, other: "MaterialLibrary") -> "MaterialLibrary":
        return self.with_models(*(other.get(name) for name in other.names()))

    def to_dict(self, significant: int = 7) -> Dict:
        models = {name: self._models[name].to_dict(significant) for name in self.names()}
        return {"materials": models}

    @classmethod
    def from_dict(cls, data: Dict) -> "MaterialLibrary":
        materials = data.get("materials") if isinstance(data, dict) else None
        if not isinstance(materials, dict):
            raise MaterialFileError("Material file needs a top-level 'materials' object")
        return cls(PolyLogModel.from_dict(name, entry) for name, entry in materials.items())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "MaterialLibrary":
        """Load a material definition file (JSON)."""
        path = Path(path)
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise MaterialFileError(f"Cannot read material file {path}: {e}") from e
        library = cls.from_dict(data)
        logger.info(f"Loaded {len(library)} material(s) from {path}")
        return library

    def dump(self, path: Union[str, Path], significant: int = 7) -> None:
        """Write the library as a material definition file."""
        with open(path, "w") as f:
            json.dump(self.to_dict(significant), f, indent=2)
            f.write("\n")
