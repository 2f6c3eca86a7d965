"""Tests for the shipped acceptance checks."""

import importlib
from unittest import TestCase

from min_graph.checks import SHIPPED_CHECKS
from min_graph.checks.base import BaseCheck
from min_graph.errors import ArgumentError


class TestShippedChecks(TestCase):
    """Every shipped module exposes a named Check."""

    def test_modules(self):
        for name in SHIPPED_CHECKS:
            check = importlib.import_module(f"min_graph.checks.{name}").Check(quick=True)
            self.assertIsInstance(check, BaseCheck)
            self.assertEqual(check.check_name, name)
            self.assertTrue(check.anchor)
            self.assertLessEqual(set(check.quick_defaults), set(check.defaults), name)


class TestSettings(TestCase):
    """Defaults, quick overrides and config."""

    def setUp(self):
        self.module = importlib.import_module("min_graph.checks.curvature")

    def test_quick_overrides(self):
        self.assertEqual(self.module.Check().settings["n"], 600)
        self.assertEqual(self.module.Check(quick=True).settings["n"], 120)

    def test_resolve(self):
        settings = self.module.Check(quick=True).resolve({"tol": 1e-6})
        self.assertEqual(settings["tol"], 1e-6)
        self.assertEqual(settings["fd_step"], 1e-4)

    def test_unknown_setting(self):
        with self.assertRaises(ArgumentError):
            self.module.Check().validate({"N": 10})


class TestCheapChecks(TestCase):
    """Quick runs of the inexpensive checks."""

    def run_check(self, name, config=None):
        check = importlib.import_module(f"min_graph.checks.{name}").Check(quick=True)
        check.validate(config or {})
        return check.handle(config or {})

    def test_curvature(self):
        outcome = self.run_check("curvature")
        self.assertTrue(outcome.passed)
        self.assertIn("hyperbolic_m4", outcome.outputs)

    def test_appendix_constants(self):
        outcome = self.run_check("appendix_constants")
        self.assertTrue(outcome.passed)
        self.assertLess(outcome.outputs["m=2"]["c0_error"], 1e-8)

    def test_appendix_constants_single_dimension(self):
        outcome = self.run_check("appendix_constants", {"dims": [3]})
        self.assertEqual(list(outcome.outputs), ["m=3"])

    def test_caccioppoli(self):
        outcome = self.run_check("caccioppoli")
        self.assertTrue(outcome.outputs["harmonic_log"]["holds"])
        self.assertTrue(outcome.passed)
