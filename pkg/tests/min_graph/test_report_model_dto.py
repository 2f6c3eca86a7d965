"""Tests for report and configuration DTOs."""

from dataclasses import dataclass, field
from unittest import TestCase

import numpy as np
from pydantic import ValidationError

from min_graph.report_model_dto import ManifoldSpecDTO, MetaDTO, ReportDTO, RunConfig, to_jsonable


@dataclass
class Sample:
    values: np.ndarray
    flag: np.bool_
    hidden: int = field(default=0, repr=False)


class TestReportDTO(TestCase):
    """Payload and metadata split."""

    def test_deterministic_json_ignores_meta(self):
        a = ReportDTO(command="c", anchor="a", outputs={"x": 1.0}, meta=MetaDTO(wall_time_s=1.0))
        b = ReportDTO(command="c", anchor="a", outputs={"x": 1.0}, meta=MetaDTO(wall_time_s=2.0, error_message="boom"))
        self.assertEqual(a.deterministic_json(), b.deterministic_json())
        self.assertNotEqual(a.to_json(), b.to_json())
        self.assertNotIn("meta", a.deterministic_json())

    def test_keys_sorted(self):
        text = ReportDTO(command="c", anchor="a", outputs={"b": 1, "a": 2}).to_json()
        self.assertLess(text.index('"a": 2'), text.index('"b": 1'))


class TestToJsonable(TestCase):
    def test_numpy_and_dataclasses(self):
        out = to_jsonable({"s": Sample(np.arange(3, dtype=np.int64), np.bool_(True)), 1: (np.float64(0.5),)})
        self.assertEqual(out, {"s": {"values": [0, 1, 2], "flag": True}, "1": [0.5]})
        self.assertIs(type(out["s"]["flag"]), bool)


class TestManifoldSpecDTO(TestCase):
    """Kind-dependent fields."""

    def test_kw_needs_f(self):
        with self.assertRaises(ValidationError):
            ManifoldSpecDTO(kind="kw", m=4, eta={"name": "kw-eta", "params": {"alpha": 0.4}})

    def test_rotsym_rejects_f(self):
        with self.assertRaises(ValidationError):
            ManifoldSpecDTO(kind="rotsym", m=3, eta={"name": "euclidean"}, f={"name": "constant", "params": {"c": 1.0}})

    def test_nested_piecewise(self):
        spec = ManifoldSpecDTO(
            kind="rotsym",
            m=3,
            eta={"name": "custom-piecewise", "left": {"name": "euclidean"}, "right": {"name": "power", "params": {"p": 0.5}}, "bridge": [1.0, 2.0]},
        )
        self.assertEqual(spec.eta.left.name, "euclidean")
        self.assertEqual(spec.eta.bridge, (1.0, 2.0))


class TestRunConfig(TestCase):
    def test_option_defaults(self):
        cfg = RunConfig(manifold="m.json", output="out", seed=3, grid={"n-samples": 11}, tolerances={"rtol": 1e-6}, params={"r-max": 5})
        self.assertEqual(
            cfg.option_defaults(),
            {"r_max": 5, "n_samples": 11, "rtol": 1e-6, "manifold": "m.json", "out": "out", "seed": 3},
        )

    def test_extra_keys_forbidden(self):
        with self.assertRaises(ValidationError):
            RunConfig(verbose=True)
