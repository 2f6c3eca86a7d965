"""Tests for the command group, config defaults and exit codes."""

import tempfile
from pathlib import Path
from unittest import TestCase

import click
from click.testing import CliRunner
from helpers import CliCase

from min_graph import __version__
from min_graph.cli.common import EXIT_ERROR, EXIT_FAILED, EXIT_OK, config_default_map, read_json
from min_graph.cli.main import cli, main
from min_graph.report_model_dto import RunConfig


class TestGroup(CliCase, TestCase):
    """Group options."""

    def test_version(self):
        result = CliRunner().invoke(cli, ["--version"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn(__version__, result.output)

    def test_config_supplies_defaults(self):
        config = self.write_json("config.json", {"command": "compare-ode", "params": {"kbar": 2.0, "n": 512}})
        result = self.invoke("--config", config, "compare-ode", "--source", "zero")
        self.assertIsNone(result.exception)
        self.assertEqual(self.report("compare-ode")["inputs"]["kbar"], 2.0)

    def test_flags_win_over_config(self):
        config = self.write_json("config.json", {"command": "compare-ode", "params": {"kbar": 2.0}})
        self.invoke("--config", config, "compare-ode", "--kbar", "0.5", "--n", "512")
        self.assertEqual(self.report("compare-ode")["inputs"]["kbar"], 0.5)

    def test_config_for_nested_command(self):
        defaults = config_default_map(RunConfig(command="gradient-bound canonical", params={"delta": 0.5}))
        self.assertEqual(defaults["gradient-bound"]["canonical"]["delta"], 0.5)
        self.assertEqual(config_default_map(RunConfig()), {})

    def test_invalid_config_json(self):
        path = Path(self.tmp.name) / "broken.json"
        path.write_text('{"command": ')
        result = self.invoke("--config", str(path), "compare-ode")
        self.assertIsInstance(result.exception, click.ClickException)
        self.assertIn("invalid JSON at line 1", str(result.exception))

    def test_unknown_config_key(self):
        config = self.write_json("config.json", {"commmand": "compare-ode"})
        result = self.invoke("--config", config, "compare-ode")
        self.assertIn("invalid config", str(result.exception))

    def test_missing_file(self):
        with self.assertRaises(click.ClickException):
            read_json(str(Path(self.tmp.name) / "absent.json"))


class TestExitCodes(TestCase):
    """main() returns 0, 1 or 2."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_success(self):
        argv = ["--output-dir", self.tmp.name, "heat", "appendix-constants", "--C3p", "1", "--C4p", "0.25", "--m", "2", "--C-harnack", "1"]
        self.assertEqual(main(argv), EXIT_OK)

    def test_failed_checks(self):
        argv = ["--output-dir", self.tmp.name, "gradient-bound", "eval", "--m", "3", "--R", "10", "--R1", "1"]
        argv += ["--eps", "0.5", "--tau", "0.5", "--q", "0.1", "--a0", "1", "--L", "1"]
        self.assertEqual(main(argv), EXIT_FAILED)

    def test_library_error(self):
        argv = ["--output-dir", self.tmp.name, "heat", "appendix-constants", "--C3p", "1", "--C4p", "1e-9", "--m", "2", "--C-harnack", "1"]
        self.assertEqual(main(argv), EXIT_ERROR)

    def test_usage_error(self):
        self.assertEqual(main(["--output-dir", self.tmp.name, "no-such-command"]), EXIT_ERROR)
