"""
Least-squares regeneration of property models from raw measurements.

log10(value) is fitted as a polynomial in log10(T) by unweighted ordinary least
squares. The Vandermonde system is column-scaled and solved with an SVD-based solver,
since degree-8 log-Vandermonde matrices are badly conditioned.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P

from ..materials import (
    COEFFICIENT_COUNT,
    HighExtension,
    LowExtension,
    PolyLogModel,
    UnitKind,
    eval_property,
    serialize_coefficients,
)

logger = logging.getLogger(__name__)

MAX_DEGREE = COEFFICIENT_COUNT - 1
DEFAULT_T_CAP = 300.0
CSV_COLUMNS = ["temperature_K", "value"]
RESIDUAL_COLUMNS = ["temperature_K", "measured", "fitted", "log10_residual"]


class FittingError(Exception):
    """Custom exception for fitting errors."""

    pass


class EmptyAfterFilterError(FittingError):
    """Raised when filtering leaves no measurements."""

    pass


class InsufficientDataError(FittingError):
    """Raised when there are too few points for the requested degree."""

    pass


class SingularSystemError(FittingError):
    """Raised when the least-squares system is rank deficient."""

    pass


class MeasurementParseError(FittingError):
    """Raised when a measurement file cannot be parsed."""

    pass


@dataclass(frozen=True, eq=False)
class MeasurementSeries:
    """Ordered (temperature, value) measurements of one property."""

    temperatures: np.ndarray  # K
    values: np.ndarray  # model unit
    unit_kind: UnitKind = UnitKind.THERMAL_CONDUCTIVITY
    source: str = ""
    removed: int = 0  # points dropped by filtering

    def __post_init__(self):
        temperatures = np.array(self.temperatures, dtype=float).reshape(-1)
        values = np.array(self.values, dtype=float).reshape(-1)
        if temperatures.shape != values.shape:
            raise FittingError(
                f"{len(temperatures)} temperatures but {len(values)} values in '{self.source}'"
            )
        if np.any(~(temperatures > 0)) or np.any(~(values > 0)):
            raise FittingError(f"Temperatures and values must be positive in '{self.source}'")
        temperatures.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "temperatures", temperatures)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "unit_kind", UnitKind(self.unit_kind))

    def __len__(self) -> int:
        return len(self.temperatures)


@dataclass(eq=False)
class FitResult:
    """A fitted model with its residual report."""

    model: PolyLogModel
    degree: int
    residuals: np.ndarray  # log10(measured) - log10(fitted), per point
    rms: float
    points: int
    removed: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def rounded_coefficients(self) -> List[str]:
        """Coefficients at seven significant figures, as reported."""
        return serialize_coefficients(self.model, 7)


def filter_measurements(
    series: MeasurementSeries, t_cap: float = DEFAULT_T_CAP
) -> MeasurementSeries:
    """
    Drop measurements above a temperature cap, keeping order.

    Args:
        series: Input measurements
        t_cap: Highest temperature kept, K

    Returns:
        MeasurementSeries: The retained points, with the removed count accumulated

    Raises:
        EmptyAfterFilterError: If no points remain
    """
    keep = series.temperatures <= t_cap
    if not np.any(keep):
        raise EmptyAfterFilterError(
            f"No measurements at or below {t_cap} K in '{series.source}' ({len(series)} points)"
        )
    removed = int(len(series) - np.count_nonzero(keep))
    if removed:
        logger.info(f"Discarded {removed} point(s) above {t_cap} K from '{series.source}'")
    return replace(
        series,
        temperatures=series.temperatures[keep],
        values=series.values[keep],
        removed=series.removed + removed,
    )


def fit_polylog(
    series: MeasurementSeries,
    degree: int = MAX_DEGREE,
    name: str = "fitted",
    low_extension: Optional[LowExtension] = None,
    high_extension: Optional[HighExtension] = None,
) -> FitResult:
    """
    Fit log10(value) as a polynomial of log10(T).

    Args:
        series: Measurements (already filtered)
        degree: Polynomial degree, 1 to 8
        name: Name of the resulting model
        low_extension: Policy below the lowest measured temperature (default linear to origin)
        high_extension: Policy above the highest measured temperature (default forbidden)

    Returns:
        FitResult: Model with full-precision coefficients, zero-padded to nine terms

    Raises:
        FittingError: If the degree is out of range
        InsufficientDataError: If there are not more than degree + 1 points
        SingularSystemError: If the system is rank deficient
    """
    if not 1 <= degree <= MAX_DEGREE:
        raise FittingError(f"Degree must be between 1 and {MAX_DEGREE}, got {degree}")
    if len(series) <= degree + 1:
        raise InsufficientDataError(
            f"Degree {degree} needs more than {degree + 1} points, got {len(series)}"
        )

    x = np.log10(series.temperatures)
    y = np.log10(series.values)
    vander = P.polyvander(x, degree)

    scale = np.linalg.norm(vander, axis=0)
    scale[scale == 0] = 1.0
    y_mean = y.mean()
    solution, _, rank, _ = np.linalg.lstsq(vander / scale, y - y_mean, rcond=None)
    if rank < degree + 1:
        raise SingularSystemError(
            f"Rank {rank} < {degree + 1}: temperatures in '{series.source}' do not determine "
            f"a degree-{degree} fit"
        )

    coefficients = solution / scale
    coefficients[0] += y_mean
    padded = np.zeros(COEFFICIENT_COUNT)
    padded[: degree + 1] = coefficients

    model = PolyLogModel(
        name=name,
        coefficients=tuple(padded),
        t_min=float(series.temperatures.min()),
        t_max=float(series.temperatures.max()),
        unit_kind=series.unit_kind,
        low_extension=low_extension or LowExtension.linear_to_origin(),
        high_extension=high_extension or HighExtension.forbidden(),
        source=series.source,
    )

    residuals = y - P.polyval(x, padded)
    rms = float(np.sqrt(np.mean(residuals**2)))
    logger.debug(f"Fitted '{name}' degree {degree} to {len(series)} points, rms {rms:.3e}")
    return FitResult(
        model=model,
        degree=degree,
        residuals=residuals,
        rms=rms,
        points=len(series),
        removed=series.removed,
    )


def _content_line_numbers(path: Path) -> List[int]:
    """1-based file line numbers of the lines pandas reads: the header, then data rows."""
    with open(path) as f:
        return [i for i, text in enumerate(f, start=1) if text.split("#", 1)[0].strip()]


def read_measurements_csv(
    path: Union[str, Path],
    unit_kind: UnitKind = UnitKind.THERMAL_CONDUCTIVITY,
    source: Optional[str] = None,
) -> MeasurementSeries:
    """
    Read a `temperature_K,value` CSV; lines starting with '#' are ignored.

    Raises:
        MeasurementParseError: On I/O errors, a wrong header or a malformed row
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, comment="#", skipinitialspace=True, dtype=str)
    except FileNotFoundError as e:
        raise MeasurementParseError(f"Measurement file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise MeasurementParseError(f"{path}: {e}") from e

    columns = [str(c).strip() for c in frame.columns]
    if columns != CSV_COLUMNS:
        raise MeasurementParseError(
            f"{path}: expected header '{','.join(CSV_COLUMNS)}', got '{','.join(columns)}'"
        )

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().any(axis=1) | (numeric <= 0).any(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raw = ",".join("" if pd.isna(v) else str(v) for v in frame.iloc[row])
        line = _content_line_numbers(path)[row + 1]
        raise MeasurementParseError(f"{path}: malformed data on line {line}: '{raw}'")

    return MeasurementSeries(
        temperatures=numeric["temperature_K"].to_numpy(),
        values=numeric["value"].to_numpy(),
        unit_kind=unit_kind,
        source=source or path.stem,
    )


def write_residuals_csv(
    result: FitResult, series: MeasurementSeries, path: Union[str, Path]
) -> None:
    """Write the per-point residual report of a fit."""
    fitted = eval_property(result.model, series.temperatures)
    frame = pd.DataFrame(
        {
            "temperature_K": series.temperatures,
            "measured": series.values,
            "fitted": fitted,
            "log10_residual": np.log10(series.values) - np.log10(fitted),
        },
        columns=RESIDUAL_COLUMNS,
    )
    frame.to_csv(path, index=False, float_format="%.10g")
