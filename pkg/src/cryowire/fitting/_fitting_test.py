#!/usr/bin/env python3
"""Fitting unit tests."""

import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from cryowire.fitting import (
    EmptyAfterFilterError,
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
from cryowire.materials import MaterialLibrary, UnitKind, eval_property


def noisy_cubic_series(scale=1.0):
    rng = np.random.default_rng(0)
    temps = np.geomspace(1.0, 300.0, 60)
    x = np.log10(temps)
    log_values = -1.0 + 1.5 * x - 0.4 * x**2 + 0.05 * x**3 + rng.normal(0.0, 0.01, temps.size)
    return MeasurementSeries(temps, scale * 10.0**log_values, source="cubic")


def sum_squares(series, coefficients):
    x = np.log10(series.temperatures)
    fitted = sum(c * x**j for j, c in enumerate(coefficients))
    return float(np.sum((np.log10(series.values) - fitted) ** 2))


class TestFilterMeasurements(unittest.TestCase):
    """Temperature cap filtering."""

    def test_points_above_cap_removed(self):
        series = MeasurementSeries([299.0, 300.0, 301.0], [1.0, 2.0, 3.0])
        filtered = filter_measurements(series, 300.0)
        np.testing.assert_array_equal(filtered.temperatures, [299.0, 300.0])
        np.testing.assert_array_equal(filtered.values, [1.0, 2.0])
        self.assertEqual(filtered.removed, 1)

    def test_all_below_cap_unchanged(self):
        series = MeasurementSeries([3.0, 1.0, 2.0], [1.0, 2.0, 3.0])
        filtered = filter_measurements(series, 300.0)
        np.testing.assert_array_equal(filtered.temperatures, series.temperatures)
        self.assertEqual(filtered.removed, 0)

    def test_empty_series(self):
        with self.assertRaises(EmptyAfterFilterError):
            filter_measurements(MeasurementSeries([], []), 300.0)

    def test_everything_above_cap(self):
        with self.assertRaises(EmptyAfterFilterError):
            filter_measurements(MeasurementSeries([310.0, 320.0], [1.0, 1.0]), 300.0)

    def test_series_validation(self):
        with self.assertRaises(FittingError):
            MeasurementSeries([1.0, 2.0], [1.0])
        with self.assertRaises(FittingError):
            MeasurementSeries([1.0, 2.0], [1.0, -1.0])

    def test_series_read_only(self):
        series = MeasurementSeries([1.0, 2.0], [1.0, 2.0])
        with self.assertRaises(ValueError):
            series.temperatures[0] = 5.0


class TestFitPolylog(unittest.TestCase):
    """Least-squares fitting in log-log space."""

    def test_exact_log_linear(self):
        temps = np.geomspace(1.0, 100.0, 20)
        result = fit_polylog(MeasurementSeries(temps, 10.0 * temps), degree=1)
        self.assertAlmostEqual(result.model.coefficients[0], 1.0, delta=1e-9)
        self.assertAlmostEqual(result.model.coefficients[1], 1.0, delta=1e-9)
        self.assertEqual(result.model.coefficients[2:], (0.0,) * 7)
        self.assertLess(result.rms, 1e-12)

    def test_round_trip_outer_conductor(self):
        outer_k = MaterialLibrary.builtin().get("outer_k")
        temps = np.geomspace(2.0, 297.0, 50)
        values = eval_property(outer_k, temps)
        result = fit_polylog(MeasurementSeries(temps, values, source="outer"), degree=8)
        predicted = eval_property(result.model, temps)
        self.assertLess(np.max(np.abs(predicted / values - 1.0)), 1e-3)
        self.assertEqual(result.model.t_min, 2.0)
        self.assertEqual(result.model.t_max, 297.0)

    def test_insufficient_data(self):
        series = MeasurementSeries([1.0, 2.0, 3.0, 4.0, 5.0], [1.0, 2.0, 3.0, 4.0, 5.0])
        with self.assertRaises(InsufficientDataError):
            fit_polylog(series, degree=8)

    def test_degree_range(self):
        series = noisy_cubic_series()
        with self.assertRaises(FittingError):
            fit_polylog(series, degree=0)
        with self.assertRaises(FittingError):
            fit_polylog(series, degree=9)

    def test_duplicated_temperature_only(self):
        series = MeasurementSeries([10.0] * 5, [1.0, 1.1, 0.9, 1.0, 1.05])
        with self.assertRaises(SingularSystemError):
            fit_polylog(series, degree=1)

    def test_scale_equivariance(self):
        base = fit_polylog(noisy_cubic_series(), degree=3).model.coefficients
        scaled = fit_polylog(noisy_cubic_series(scale=10.0), degree=3).model.coefficients
        self.assertAlmostEqual(scaled[0] - base[0], 1.0, delta=1e-9)
        np.testing.assert_allclose(scaled[1:], base[1:], rtol=0, atol=1e-9)

    def test_residual_optimality(self):
        series = noisy_cubic_series()
        coefficients = np.array(fit_polylog(series, degree=3).model.coefficients[:4])
        best = sum_squares(series, coefficients)
        for j in range(4):
            for step in (1e-6, -1e-6):
                perturbed = coefficients.copy()
                perturbed[j] += step
                self.assertGreaterEqual(sum_squares(series, perturbed), best)

    def test_deterministic(self):
        first = fit_polylog(noisy_cubic_series(), degree=5)
        second = fit_polylog(noisy_cubic_series(), degree=5)
        self.assertEqual(first.model.coefficients, second.model.coefficients)
        np.testing.assert_array_equal(first.residuals, second.residuals)

    def test_residual_report(self):
        series = noisy_cubic_series()
        result = fit_polylog(series, degree=3)
        self.assertEqual(result.residuals.shape, (60,))
        self.assertAlmostEqual(result.rms, float(np.sqrt(np.mean(result.residuals**2))))
        self.assertEqual(len(result.rounded_coefficients), 9)
        self.assertLess(result.rms, 0.02)


class TestMeasurementFiles(unittest.TestCase):
    """CSV input and residual output."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_read_with_comments(self):
        path = self.write(
            "k.csv",
            "# outer conductor\ntemperature_K,value\n2.0,0.5\n"
            "# mid-run note\n10.0,2.5\n301.0,30.0\n",
        )
        series = read_measurements_csv(path, UnitKind.THERMAL_CONDUCTIVITY)
        np.testing.assert_array_equal(series.temperatures, [2.0, 10.0, 301.0])
        self.assertEqual(series.source, "k")
        self.assertEqual(filter_measurements(series).removed, 1)

    def test_malformed_row_named(self):
        path = self.write("bad.csv", "temperature_K,value\n2.0,0.5\n3.0,abc\n")
        with self.assertRaises(MeasurementParseError) as ctx:
            read_measurements_csv(path)
        self.assertIn("line 3: '3.0,abc'", str(ctx.exception))

    def test_malformed_line_counts_comments(self):
        path = self.write(
            "bad.csv",
            "# run 7\n# sample A\ntemperature_K,value\n# cooldown\n10,1.0\n20,abc\n",
        )
        with self.assertRaises(MeasurementParseError) as ctx:
            read_measurements_csv(path)
        self.assertIn("line 6: '20,abc'", str(ctx.exception))

    def test_non_positive_value_line(self):
        path = self.write("bad.csv", "temperature_K,value\n\n2.0,0.5\n3.0,-1.0 # sign flip\n")
        with self.assertRaises(MeasurementParseError) as ctx:
            read_measurements_csv(path)
        self.assertIn("line 4", str(ctx.exception))

    def test_wrong_header(self):
        path = self.write("bad.csv", "T,k\n2.0,0.5\n")
        with self.assertRaises(MeasurementParseError):
            read_measurements_csv(path)

    def test_missing_file(self):
        with self.assertRaises(MeasurementParseError):
            read_measurements_csv(os.path.join(self.tmp.name, "missing.csv"))

    def test_residual_csv(self):
        series = noisy_cubic_series()
        result = fit_polylog(series, degree=3)
        path = os.path.join(self.tmp.name, "residuals.csv")
        write_residuals_csv(result, series, path)
        frame = pd.read_csv(path)
        self.assertEqual(
            list(frame.columns), ["temperature_K", "measured", "fitted", "log10_residual"]
        )
        self.assertEqual(len(frame), 60)
        np.testing.assert_allclose(frame["log10_residual"], result.residuals, atol=1e-8)


if __name__ == "__main__":
    unittest.main()
