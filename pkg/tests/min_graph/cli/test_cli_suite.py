"""Tests for the suite command and check loading."""

from unittest import TestCase
from unittest.mock import MagicMock, patch

import click
from helpers import CliCase

from min_graph.checks.base import BaseCheck, CheckOutcome
from min_graph.cli.common import EXIT_FAILED, EXIT_OK
from min_graph.cli.suite import get_checks, run_check


class Exploding(BaseCheck):
    check_name = "exploding"
    defaults = {"n": 1}

    def handle(self, config):
        raise RuntimeError("boom")


class TestGetChecks(TestCase):
    """Loading checks by name."""

    def test_unknown_check(self):
        with self.assertRaises(click.ClickException) as ctx:
            get_checks(["missing"], [], quick=True)
        self.assertIn("does not exist", str(ctx.exception))

    def test_shipped_check_is_quick(self):
        checks = get_checks(["curvature"], [], quick=True)
        self.assertEqual(list(checks), ["curvature"])
        self.assertEqual(checks["curvature"].settings["n"], 120)

    @patch("min_graph.cli.suite.pkgutil.iter_modules")
    @patch("min_graph.cli.suite.importlib.import_module")
    def test_extra_checks_package(self, mock_import, mock_iter):
        info = MagicMock()
        info.name = "extra"
        mock_iter.return_value = [info]
        module = MagicMock()
        module.__path__ = ["/nonexistent"]
        mock_import.return_value = module

        checks = get_checks(["extra"], ["/nonexistent"], quick=False)
        self.assertIs(checks["extra"], module.Check.return_value)
        module.Check.assert_called_once_with(quick=False)
        mock_import.assert_called_with("checks.extra")

    @patch("min_graph.cli.suite.importlib.import_module")
    def test_module_without_check_class(self, mock_import):
        mock_import.return_value = MagicMock(spec=[])
        with self.assertRaises(click.ClickException) as ctx:
            get_checks(["curvature"], [], quick=False)
        self.assertIn("No Check class", str(ctx.exception))


class TestRunCheck(TestCase):
    def test_errors_are_returned(self):
        outcome, error, trace = run_check(Exploding(), {})
        self.assertIsNone(outcome)
        self.assertEqual(str(error), "boom")
        self.assertIn("RuntimeError", trace)

    def test_unknown_setting(self):
        outcome, error, _ = run_check(Exploding(), {"m": 2})
        self.assertIsNone(outcome)
        self.assertIn("unknown settings ['m']", str(error))


class TestSuite(CliCase, TestCase):
    """End to end in process with cheap checks."""

    def test_cheap_checks_pass(self):
        result = self.invoke("suite", "--quick", "--checks", "curvature", "--checks", "appendix_constants", "--workers", "2")
        self.assertEqual(result.return_value, EXIT_OK)
        summary = self.report("suite")
        self.assertEqual(summary["inputs"]["checks"], ["curvature", "appendix_constants"])
        self.assertTrue(all(v["passed"] for v in summary["outputs"].values()))
        check = self.report("check-curvature")
        self.assertEqual(check["command"], "check curvature")
        self.assertEqual(check["inputs"]["settings"]["n"], 120)

    def test_settings_errors_are_recorded(self):
        settings = self.write_json("settings.json", {"appendix_constants": {"bogus": 1}})
        result = self.invoke("suite", "--checks", "appendix_constants", "--settings", settings)
        self.assertEqual(result.return_value, EXIT_FAILED)
        report = self.report("check-appendix_constants")
        self.assertFalse(report["passed"])
        self.assertIn("unknown settings", report["meta"]["error_message"])
        self.assertIn("ArgumentError", report["meta"]["stack_trace"])

    def test_settings_must_be_an_object(self):
        settings = self.write_json("settings.json", [1, 2])
        result = self.invoke("suite", "--checks", "curvature", "--settings", settings)
        self.assertIn("expected an object", str(result.exception))

    @patch("min_graph.cli.suite.run_check", return_value=(CheckOutcome({"x": 1.0}, False), None, None))
    def test_failed_verdict(self, _):
        result = self.invoke("suite", "--checks", "curvature")
        self.assertEqual(result.return_value, EXIT_FAILED)
        self.assertFalse(self.report("suite")["outputs"]["curvature"]["passed"])
