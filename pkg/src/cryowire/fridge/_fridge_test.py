#!/usr/bin/env python3
"""Fridge model unit tests."""

import unittest

from cryowire.fridge import (
    FridgeError,
    FridgeModel,
    Segment,
    Stage,
    UnknownStageError,
    xld1000_sl,
)


class TestFridgeModel(unittest.TestCase):
    """Stage ordering and segment lookup."""

    def setUp(self):
        self.fridge = xld1000_sl()

    def test_stage_table(self):
        self.assertEqual(self.fridge.stage_ids, ["300K", "50K", "4K", "Still", "CP", "MXC"])
        self.assertEqual(self.fridge.stage("Still").cooling_power, 7e-3)
        self.assertEqual(self.fridge.stage("MXC").temperature, 0.02)
        self.assertIsNone(self.fridge.top.cooling_power)
        self.assertEqual(self.fridge.capacity, 1008)

    def test_incoming_segment(self):
        segment = self.fridge.incoming_segment("4K")
        self.assertEqual(segment, Segment("50K", "4K", 0.3155, 40.0, 3.5))
        self.assertIsNone(self.fridge.incoming_segment("300K"))

    def test_outgoing_segment(self):
        self.assertEqual(self.fridge.outgoing_segment("CP"), self.fridge.incoming_segment("MXC"))
        self.assertIsNone(self.fridge.outgoing_segment("MXC"))

    def test_segments(self):
        lengths = [s.length for s in self.fridge.segments()]
        self.assertEqual(lengths, [0.3053, 0.3155, 0.2775, 0.1965, 0.1965])

    def test_below_lowest_is_isothermal(self):
        segment = self.fridge.below_lowest_segment()
        self.assertTrue(segment.isothermal)
        self.assertEqual(segment.length, 0.1965)
        self.assertEqual(segment.t_low, 0.02)

    def test_unknown_stage(self):
        with self.assertRaises(UnknownStageError):
            self.fridge.stage("1K")

    def test_temperatures_must_decrease(self):
        with self.assertRaises(FridgeError):
            FridgeModel(
                "bad",
                (Stage("top", 300.0), Stage("a", 4.0, 1.0, 0.1), Stage("b", 10.0, 1.0, 0.1)),
            )

    def test_cooling_power_required(self):
        with self.assertRaises(FridgeError):
            FridgeModel("bad", (Stage("top", 300.0), Stage("a", 4.0, None, 0.1)))

    def test_capacity_positive(self):
        with self.assertRaises(FridgeError):
            FridgeModel("bad", (Stage("top", 300.0), Stage("a", 4.0, 1.0, 0.1)), capacity=0)

    def test_segment_validation(self):
        with self.assertRaises(FridgeError):
            Segment("a", "b", -1.0, 4.0, 1.0)
        with self.assertRaises(FridgeError):
            Segment("a", "b", 1.0, 1.0, 4.0)


if __name__ == "__main__":
    unittest.main()
