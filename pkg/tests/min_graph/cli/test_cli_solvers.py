"""Tests for solve-radial and compare-ode."""

from pathlib import Path
from unittest import TestCase

import click
from helpers import CliCase

from min_graph.cli.common import EXIT_OK


class TestSolveRadial(CliCase, TestCase):
    """Catenoid by flux."""

    def test_default_catenoid(self):
        result = self.invoke("solve-radial", "--n", "1025")
        self.assertEqual(result.return_value, EXIT_OK)
        report = self.report("solve-radial")
        self.assertTrue(report["passed"])
        self.assertEqual(report["anchor"], "radial minimal graphs by conserved flux")
        self.assertLess(report["outputs"]["flux_drift"], 1e-9)
        header = (Path(self.tmp.name) / "solve-radial-series.csv").read_text().splitlines()[0]
        self.assertEqual(header, "r,u,du,W")

    def test_manifold_file(self):
        spec = self.write_json("plane.json", {"kind": "rotsym", "m": 2, "eta": {"name": "euclidean"}})
        result = self.invoke("solve-radial", "--manifold", spec, "--n", "257", "--out", "plane-run")
        self.assertEqual(result.return_value, EXIT_OK)
        self.assertEqual(self.report("plane-run")["inputs"]["manifold"], spec)

    def test_invalid_manifold_spec(self):
        spec = self.write_json("bad.json", {"kind": "kw", "m": 4, "eta": {"name": "kw-eta", "params": {"alpha": 0.4}}})
        result = self.invoke("solve-radial", "--manifold", spec)
        self.assertIsInstance(result.exception, click.ClickException)
        self.assertIn("invalid manifold spec", str(result.exception))

    def test_flux_too_large(self):
        result = self.invoke("solve-radial", "--c", "3", "--r0", "1.5", "--r1", "3")
        self.assertIsInstance(result.exception, click.ClickException)


class TestCompareOde(CliCase, TestCase):
    """Comparison profiles against closed forms."""

    def test_zero_source(self):
        result = self.invoke("compare-ode", "--source", "zero", "--n", "256")
        self.assertEqual(result.return_value, EXIT_OK)
        self.assertLess(self.report("compare-ode")["outputs"]["closed_form_relative_error"], 1e-12)

    def test_sinh(self):
        result = self.invoke("compare-ode", "--source", "const-kappa", "--t-max", "3", "--n", "3000", "--rtol", "1e-9")
        self.assertEqual(result.return_value, EXIT_OK)

    def test_decaying_source_reports_power(self):
        self.invoke("compare-ode", "--source", "decay-kappa", "--kbar", "2", "--n", "1024", "--out", "decay")
        outputs = self.report("decay")["outputs"]
        self.assertIn("power_exponent", outputs)
        self.assertNotIn("closed_form_relative_error", outputs)
        self.assertGreaterEqual(outputs["power_min_defect"], -1e-9)
