from .fitting import (
    DEFAULT_T_CAP,
    MAX_DEGREE,
    EmptyAfterFilterError,
    FitResult,
    FittingError,
    InsufficientDataError,
    MeasurementParseError,
    MeasurementSeries,
    SingularSystemError,
    filter_measurements,
    fit_polylog,
    read_measurements_csv,
    write_residuals_csv,
)

__all__ = [
    "DEFAULT_T_CAP",
    "MAX_DEGREE",
    "EmptyAfterFilterError",
    "FitResult",
    "FittingError",
    "InsufficientDataError",
    "MeasurementParseError",
    "MeasurementSeries",
    "SingularSystemError",
    "filter_measurements",
    "fit_polylog",
    "read_measurements_csv",
    "write_residuals_csv",
]
