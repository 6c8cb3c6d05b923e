#!/usr/bin/env python3
"""
Run configuration unit tests.

Run with:
    python -m pytest src/cryowire/cli/_config_test.py -v
"""

import copy
import json
import os
import tempfile
import unittest
from dataclasses import replace
from unittest import mock

from cryowire import get_data_path
from cryowire.attenuators import LineKind, LoadScale
from cryowire.cables import StaticMode
from cryowire.cli.config import (
    CONFIG_ENV_VAR,
    ConfigError,
    RunConfig,
    find_config,
    load_config,
)
from cryowire.fridge import xld1000_sl
from cryowire.materials import MaterialLibrary
from cryowire.system import system_budget


def default_data():
    with open(get_data_path("xld1000_sl.json")) as f:
        return json.load(f)


class TestPackagedDefault(unittest.TestCase):
    """The shipped XLD1000-SL configuration."""

    def setUp(self):
        self.config = load_config(get_data_path("xld1000_sl.json"))

    def test_fridge_matches_builtin(self):
        builtin = xld1000_sl()
        self.assertEqual(self.config.fridge.stage_ids, builtin.stage_ids)
        self.assertEqual(self.config.fridge.capacity, 1008)
        for loaded, expected in zip(self.config.fridge.stages, builtin.stages):
            self.assertEqual(loaded.temperature, expected.temperature)
            self.assertEqual(loaded.length, expected.length)
            if expected.cooling_power is None:
                self.assertIsNone(loaded.cooling_power)
            else:
                self.assertAlmostEqual(loaded.cooling_power / expected.cooling_power, 1.0)

    def test_units_converted(self):
        lines = self.config.processor.lines
        self.assertAlmostEqual(lines[LineKind.QUBIT_FLUX].target_current, 0.4e-3, delta=1e-15)
        self.assertAlmostEqual(lines[LineKind.TWPA_PUMP].pump_power, 1e-7, delta=1e-20)
        self.assertAlmostEqual(self.config.cable.layer("inner").area, 0.0324e-6, delta=1e-20)
        self.assertAlmostEqual(self.config.fixed_loads[0].power, 7.8e-3, delta=1e-15)
        self.assertEqual(self.config.fixed_loads[0].scale, LoadScale.READOUT_CIRCUIT)

    def test_analysis_settings(self):
        self.assertEqual(self.config.processor.n, 12)
        self.assertEqual(self.config.z0, 50.0)
        self.assertEqual(self.config.static_mode, StaticMode.NET)
        self.assertEqual(self.config.readout_chain_limit, 24)
        self.assertEqual(self.config.output_format, "summary")
        self.assertEqual(self.config.source, get_data_path("xld1000_sl.json"))

    def test_reproduces_builtin_budget(self):
        loaded = system_budget(
            self.config.processor,
            self.config.fridge,
            self.config.cable,
            self.config.fixed_loads,
            **self.config.budget_options(),
        )
        builtin = RunConfig()
        expected = system_budget(
            builtin.processor, builtin.fridge, builtin.cable, builtin.fixed_loads
        )
        for a, b in zip(loaded.stages, expected.stages):
            self.assertAlmostEqual(a.fraction, b.fraction, delta=1e-12)


class TestRoundTrip(unittest.TestCase):
    """to_dict and from_dict."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_dict_round_trip(self):
        config = load_config(get_data_path("xld1000_sl.json"))
        data = config.to_dict()
        self.assertEqual(RunConfig.from_dict(data).to_dict(), data)

    def test_file_round_trip_gives_identical_budget(self):
        config = load_config(get_data_path("xld1000_sl.json"))
        config.processor = replace(config.processor, n=13)
        path = os.path.join(self.tmp.name, "emitted.json")
        config.save(path)
        reloaded = load_config(path)
        self.assertEqual(reloaded.processor.n, 13)
        first, second = (
            system_budget(c.processor, c.fridge, c.cable, c.fixed_loads, **c.budget_options())
            for c in (config, reloaded)
        )
        self.assertEqual([s.total for s in first.stages], [s.total for s in second.stages])

    def test_builtin_defaults_for_missing_sections(self):
        config = RunConfig.from_dict({"processor": {"n": 8}})
        self.assertEqual(config.processor.n, 8)
        self.assertEqual(config.fridge.stage_ids, xld1000_sl().stage_ids)
        self.assertEqual(len(config.fixed_loads), 1)
        self.assertEqual(config.cable.name, "SC-086/50-SCN-CN")

    def test_partial_lines_keep_defaults(self):
        flux_entry = {"attenuation_dB": {"4K": 20, "CP": 10}, "target_current_uA": 50}
        config = RunConfig.from_dict({"lines": {"qubit_flux": flux_entry}})
        flux = config.processor.lines[LineKind.QUBIT_FLUX]
        self.assertEqual(flux.attenuation, {"4K": 20.0, "CP": 10.0})
        self.assertAlmostEqual(flux.target_current, 5e-5)
        self.assertAlmostEqual(config.processor.lines[LineKind.COUPLER_FLUX].target_current, 4e-4)

    def test_material_files_resolved_next_to_config(self):
        alt = replace(MaterialLibrary.builtin().get("outer_k"), name="alt_k")
        MaterialLibrary([alt]).dump(os.path.join(self.tmp.name, "alt.json"))
        data = default_data()
        data["materials"]["library_paths_json"] = ["alt.json"]
        data["cable"]["layers"][0]["material"] = "alt_k"
        path = os.path.join(self.tmp.name, "run.json")
        with open(path, "w") as f:
            json.dump(data, f)
        config = load_config(path)
        self.assertIn("alt_k", config.library)
        self.assertEqual(config.cable.layer("outer").material, "alt_k")
        expected = os.path.join(os.path.realpath(self.tmp.name), "alt.json")
        self.assertEqual(config.library_paths, [expected])


class TestValidation(unittest.TestCase):
    """Rejected configurations."""

    def assertRejected(self, mutate):
        data = default_data()
        mutate(data)
        with self.assertRaises(ConfigError):
            RunConfig.from_dict(data)

    def test_unknown_top_level_key(self):
        self.assertRejected(lambda d: d.update(extra=1))

    def test_quantity_without_unit(self):
        def mutate(d):
            stage = d["fridge"]["stages"][1]
            stage["temperature"] = stage.pop("temperature_K")

        self.assertRejected(mutate)

    def test_unrecognised_unit(self):
        def mutate(d):
            stage = d["fridge"]["stages"][1]
            stage["temperature_F"] = stage.pop("temperature_K")

        self.assertRejected(mutate)

    def test_two_units_for_one_quantity(self):
        self.assertRejected(lambda d: d["fridge"]["stages"][2].update(cooling_power_mW=700))

    def test_non_numeric_quantity(self):
        self.assertRejected(lambda d: d["fridge"]["stages"][2].update(cooling_power_W="0.7"))

    def test_unknown_stage_in_attenuation(self):
        self.assertRejected(lambda d: d["lines"]["qubit_flux"]["attenuation_dB"].update(x=10))

    def test_unknown_line_kind(self):
        self.assertRejected(lambda d: d["lines"].update(drive={}))

    def test_unknown_material(self):
        self.assertRejected(lambda d: d["cable"]["layers"][0].update(material="brass_k"))

    def test_model_invariant(self):
        self.assertRejected(lambda d: d["fridge"]["stages"][3].update(temperature_K=5.0))

    def test_negative_attenuation(self):
        self.assertRejected(lambda d: d["lines"]["twpa_pump"]["attenuation_dB"].update(CP=-3))

    def test_bad_analysis_values(self):
        self.assertRejected(lambda d: d["analysis"].update(format="xml"))
        self.assertRejected(lambda d: d["analysis"].update(margin=0))
        self.assertRejected(lambda d: d["analysis"].update(static_mode="outgoing"))
        self.assertRejected(lambda d: d["processor"].update(n=0))
        self.assertRejected(lambda d: d["processor"].update(n=2.5))

    def test_fixed_load_stage(self):
        self.assertRejected(lambda d: d["fixed_loads"][0].update(stage="2K"))

    def test_missing_material_file(self):
        self.assertRejected(lambda d: d["materials"].update(library_paths_json=["/no/such.json"]))

    def test_default_left_untouched(self):
        data = default_data()
        before = copy.deepcopy(data)
        RunConfig.from_dict(data)
        self.assertEqual(data, before)


class TestFindConfig(unittest.TestCase):
    """Configuration search order."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.env = mock.patch.dict(os.environ)
        self.env.start()
        os.environ.pop(CONFIG_ENV_VAR, None)
        self.cwd = os.path.join(self.tmp.name, "work")
        self.home = os.path.join(self.tmp.name, "home")
        os.makedirs(self.cwd)
        os.makedirs(os.path.join(self.home, ".cryowire"))
        self.patches = [
            mock.patch("os.getcwd", return_value=self.cwd),
            mock.patch("os.path.expanduser", return_value=self.home),
        ]
        for patch in self.patches:
            patch.start()

    def tearDown(self):
        for patch in self.patches:
            patch.stop()
        self.env.stop()
        self.tmp.cleanup()

    def touch(self, *parts):
        path = os.path.join(*parts)
        with open(path, "w") as f:
            f.write("{}")
        return path

    def test_packaged_default_last(self):
        self.assertEqual(find_config(), get_data_path("xld1000_sl.json"))

    def test_home_before_default(self):
        home = self.touch(self.home, ".cryowire", "cryowire.json")
        self.assertEqual(find_config(), home)

    def test_working_directory_before_home(self):
        self.touch(self.home, ".cryowire", "cryowire.json")
        local = self.touch(self.cwd, "cryowire.json")
        self.assertEqual(find_config(), local)

    def test_environment_before_files(self):
        self.touch(self.cwd, "cryowire.json")
        env_path = self.touch(self.tmp.name, "env.json")
        os.environ[CONFIG_ENV_VAR] = env_path
        self.assertEqual(find_config(), env_path)

    def test_explicit_first(self):
        os.environ[CONFIG_ENV_VAR] = self.touch(self.tmp.name, "env.json")
        explicit = self.touch(self.tmp.name, "explicit.json")
        self.assertEqual(find_config(explicit), explicit)

    def test_missing_requested_file(self):
        with self.assertRaises(ConfigError):
            find_config(os.path.join(self.tmp.name, "missing.json"))
        os.environ[CONFIG_ENV_VAR] = os.path.join(self.tmp.name, "missing.json")
        with self.assertRaises(ConfigError):
            find_config()

    def test_unreadable_json(self):
        path = os.path.join(self.tmp.name, "broken.json")
        with open(path, "w") as f:
            f.write("{not json")
        with self.assertRaises(ConfigError):
            load_config(path)


if __name__ == "__main__":
    unittest.main()
