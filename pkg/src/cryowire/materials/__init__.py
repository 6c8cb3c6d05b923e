from .materials import (
    COEFFICIENT_COUNT,
    INNER_RHO_FLOOR,
    HighExtension,
    HighExtensionKind,
    IntegrationFailureError,
    LowExtension,
    LowExtensionKind,
    MaterialError,
    MaterialFileError,
    MaterialLibrary,
    PolyLogModel,
    TemperatureOutOfRangeError,
    UnitKind,
    UnknownMaterialError,
    eval_property,
    integrate_property,
    serialize_coefficients,
)

__all__ = [
    "COEFFICIENT_COUNT",
    "INNER_RHO_FLOOR",
    "HighExtension",
    "HighExtensionKind",
    "IntegrationFailureError",
    "LowExtension",
    "LowExtensionKind",
    "MaterialError",
    "MaterialFileError",
    "MaterialLibrary",
    "PolyLogModel",
    "TemperatureOutOfRangeError",
    "UnitKind",
    "UnknownMaterialError",
    "eval_property",
    "integrate_property",
    "serialize_coefficients",
]
