"""Tests for the gradient-bound commands."""

import json
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

import click
from helpers import CliCase

from min_graph.cli.common import EXIT_FAILED, EXIT_OK
from min_graph.counterexample import KWSpec, certify

BOUND = ["--m", "3", "--kbar", "1", "--R", "10", "--R1", "1"]


class TestCanonical(CliCase, TestCase):
    def test_worked_example(self):
        result = self.invoke("gradient-bound", "canonical", "--delta", "0.5", "--gamma-star", "1", "--m", "3", "--R", "10")
        self.assertEqual(result.return_value, EXIT_OK)
        report = self.report("gradient-bound-canonical")
        self.assertIsNone(report["passed"])
        self.assertAlmostEqual(report["outputs"]["params"]["L"], 204.8)
        self.assertAlmostEqual(report["outputs"]["params"]["q"], 0.176777, places=6)

    def test_constraint_check_with_inner_radius(self):
        result = self.invoke("gradient-bound", "canonical", "--delta", "0.5", "--gamma-star", "1", "--m", "3", "--R", "10", "--R1", "1")
        self.assertEqual(result.return_value, EXIT_OK)
        self.assertTrue(self.report("gradient-bound-canonical")["outputs"]["validity"]["passed"])

    def test_delta_out_of_range(self):
        result = self.invoke("gradient-bound", "canonical", "--delta", "1.0", "--gamma-star", "1", "--m", "3", "--R", "10")
        self.assertIsInstance(result.exception, click.ClickException)


class TestEval(CliCase, TestCase):
    def test_violated_constraints_fail(self):
        result = self.invoke("gradient-bound", "eval", *BOUND, "--eps", "0.5", "--tau", "0.5", "--q", "0.1", "--a0", "1", "--L", "1")
        self.assertEqual(result.return_value, EXIT_FAILED)
        outputs = self.report("gradient-bound-eval")["outputs"]
        self.assertNotIn("log_bound", outputs)
        self.assertIn("par_1b_lower", outputs["validity"]["failed"])


class TestOptimize(CliCase, TestCase):
    def test_not_worse_than_canonical(self):
        result = self.invoke("gradient-bound", "optimize", *BOUND, "--budget", "300", "--restarts", "2")
        self.assertEqual(result.return_value, EXIT_OK)
        outputs = self.report("gradient-bound-optimize")["outputs"]
        self.assertLessEqual(outputs["log_bound"], outputs["canonical_log_bound"])


class TestVerify(CliCase, TestCase):
    def test_catenoid(self):
        result = self.invoke("gradient-bound", "verify", "--m", "2", "--R", "2", "--R1", "1", "--n", "513", "--samples", "11")
        self.assertEqual(result.return_value, EXIT_OK)
        self.assertEqual(self.report("gradient-bound-verify")["outputs"]["ell"], 1)

    def test_tgraph_needs_certificate(self):
        result = self.invoke("gradient-bound", "verify", "--m", "4", "--R", "10", "--R1", "5", "--family", "kw-tgraph")
        self.assertIn("--certificate is required", str(result.exception))

    def test_graph_from_solve_radial_series(self):
        self.invoke("solve-radial", "--n", "513", "--out", "plane-run")
        series = str(Path(self.tmp.name) / "plane-run-series.csv")
        result = self.invoke("gradient-bound", "verify", "--m", "2", "--R", "2", "--R1", "1", "--graph", series, "--samples", "11")
        self.assertEqual(result.return_value, EXIT_OK)
        report = self.report("gradient-bound-verify")
        self.assertEqual(report["inputs"]["graph"], series)
        self.assertGreater(report["outputs"]["min_log_margin"], 0.0)

    def test_graph_on_a_manifold_spec(self):
        self.invoke("solve-radial", "--n", "513", "--out", "plane-run")
        series = str(Path(self.tmp.name) / "plane-run-series.csv")
        spec = self.write_json("plane.json", {"kind": "rotsym", "m": 2, "eta": {"name": "euclidean"}})
        result = self.invoke("gradient-bound", "verify", "--m", "2", "--R", "2", "--R1", "1", "--graph", series, "--manifold", spec, "--samples", "11")
        self.assertEqual(result.return_value, EXIT_OK)
        self.assertEqual(self.report("gradient-bound-verify")["inputs"]["manifold"], spec)

    def test_graph_needs_slope_column(self):
        path = Path(self.tmp.name) / "flat.csv"
        path.write_text("r,u\n1,0\n2,0\n3,0\n")
        result = self.invoke("gradient-bound", "verify", "--m", "2", "--R", "2", "--R1", "1", "--graph", str(path))
        self.assertIsInstance(result.exception, click.ClickException)
        self.assertIn("missing columns du", str(result.exception))

    def test_graph_rejected_for_tgraph(self):
        result = self.invoke("gradient-bound", "verify", "--m", "4", "--R", "10", "--R1", "5", "--family", "kw-tgraph", "--graph", "g.csv")
        self.assertIn("apply to radial graphs", str(result.exception))

    @patch("min_graph.cli.gradient_bound.verify_solution_bound", return_value={"passed": True, "min_log_margin": 1.0})
    def test_tgraph_reads_certificate(self, mock_verify):
        path = Path(self.tmp.name) / "cert.json"
        path.write_text(certify(KWSpec(), r_max=50.0, n=64).to_json())
        result = self.invoke("gradient-bound", "verify", "--m", "4", "--R", "10", "--R1", "5", "--family", "kw-tgraph", "--certificate", str(path))
        self.assertEqual(result.return_value, EXIT_OK)
        cert = mock_verify.call_args.kwargs["certificate"]
        self.assertEqual(cert.spec, KWSpec())
        self.assertEqual(json.loads(path.read_text())["n"], 64)
