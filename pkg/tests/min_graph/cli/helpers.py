"""Shared CliRunner plumbing for the command tests."""

import json
import tempfile
from pathlib import Path
from typing import Any

from click.testing import CliRunner, Result

from min_graph.cli.main import cli


class CliCase:
    """Mixin: a temporary output directory and report lookup."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.runner = CliRunner()

    def tearDown(self):
        self.tmp.cleanup()

    def invoke(self, *args: str) -> Result:
        return self.runner.invoke(cli, ["--output-dir", self.tmp.name, *args], standalone_mode=False)

    def report(self, name: str) -> dict[str, Any]:
        return json.loads((Path(self.tmp.name) / f"{name}.json").read_text())

    def write_json(self, name: str, payload: Any) -> str:
        path = Path(self.tmp.name) / name
        path.write_text(json.dumps(payload))
        return str(path)
