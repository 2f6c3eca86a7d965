"""Tests for file-backed report persistence."""

import os
import tempfile
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

import numpy as np

from min_graph.errors import ArgumentError
from min_graph.persist_files import OUTPUT_ENV, PersistFiles, get_output_dir
from min_graph.report_model_dto import ReportDTO


class TestPersistFiles(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.repo = PersistFiles(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_write_read_list(self):
        report = ReportDTO(command="solve-radial", anchor="catenoid", inputs={"c": 1.0}, outputs={"h": [1.0, 2.0]}, passed=True)
        location = self.repo.write_report("solve-radial", report)
        self.assertTrue(location.endswith("solve-radial.json"))
        self.assertEqual(self.repo.list_reports(), ["solve-radial"])

        loaded = self.repo.read_report("solve-radial")
        self.assertEqual(loaded.deterministic_json(), report.deterministic_json())

    def test_explicit_suffix_kept(self):
        location = self.repo.write_report("nested/out.json", ReportDTO(command="x", anchor="y"))
        self.assertEqual(Path(location), Path(self.tmp.name) / "nested" / "out.json")

    def test_infinite_outputs_survive(self):
        self.repo.write_report("inf", ReportDTO(command="x", anchor="y", outputs={"bound": float("inf")}))
        self.assertEqual(self.repo.read_report("inf").outputs["bound"], float("inf"))

    def test_series_csv(self):
        location = self.repo.write_series("series", {"r": np.array([0.1, 1 / 3]), "u": np.array([1.0, 2.0])})
        lines = Path(location).read_text().splitlines()
        self.assertEqual(lines[0], "r,u")
        self.assertEqual(float(lines[2].split(",")[0]), 1 / 3)

    def test_series_read_back(self):
        self.repo.write_series("graph-series", {"r": np.linspace(1.0, 2.0, 5), "du": np.arange(5.0) / 3})
        cols = self.repo.read_series("graph-series")
        self.assertEqual(list(cols), ["r", "du"])
        np.testing.assert_array_equal(cols["du"], np.arange(5.0) / 3)

    def test_missing_series(self):
        with self.assertRaises(ArgumentError):
            self.repo.read_series("absent")

    def test_series_columns_must_match(self):
        with self.assertRaises(ArgumentError):
            self.repo.write_series("bad", {"r": np.ones(3), "u": np.ones(2)})
        with self.assertRaises(ArgumentError):
            self.repo.write_series("empty", {})


class TestOutputDir(TestCase):
    def test_env_variable(self):
        with patch.dict(os.environ, {OUTPUT_ENV: "/tmp/min-graph-out"}):
            self.assertEqual(get_output_dir(), Path("/tmp/min-graph-out"))

    def test_default(self):
        env = {k: v for k, v in os.environ.items() if k != OUTPUT_ENV}
        with patch.dict(os.environ, env, clear=True), patch("min_graph.persist_files.os.path.exists", return_value=False):
            self.assertEqual(get_output_dir("reports"), Path("reports"))
