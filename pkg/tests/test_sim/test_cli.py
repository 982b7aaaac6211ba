"""Tests for the command-line entry point."""

from __future__ import annotations

import json
import pathlib
import tempfile
import unittest

from loguru import logger
from typer.testing import CliRunner

from smart_gsm_home.cli import app
from smart_gsm_home.ext.observability_loguru import PACKAGE_NAME

PASSING = 'at 0ms sms +60123456789 "L1ON"\nat 6s expect load 1 on\n'
FAILING = 'at 0ms sms +60123456789 "L1ON"\nat 6s expect load 2 on\n'


class TestCli(unittest.TestCase):
    def setUp(self) -> None:
        self.runner = CliRunner()
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = pathlib.Path(self._tmp.name)

    def tearDown(self) -> None:
        self._tmp.cleanup()
        logger.remove()
        logger.disable(PACKAGE_NAME)

    def scenario(self, text: str) -> str:
        path = self.tmp / "case.scn"
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_simulate_pass(self) -> None:
        result = self.runner.invoke(app, ["simulate", self.scenario(PASSING)])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("PASS", result.output)

    def test_simulate_failed_assertion(self) -> None:
        result = self.runner.invoke(app, ["simulate", self.scenario(FAILING)])
        self.assertEqual(result.exit_code, 1)
        self.assertIn("FAIL", result.output)

    def test_simulate_json_output_file(self) -> None:
        out = self.tmp / "report.json"
        result = self.runner.invoke(
            app,
            ["simulate", self.scenario(PASSING), "--format", "json", "-o", str(out)],
        )
        self.assertEqual(result.exit_code, 0, result.output)
        payload = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual(payload["accuracy_pct"], 100.0)

    def test_simulate_overrides(self) -> None:
        out = self.tmp / "report.json"
        args = ["simulate", self.scenario(PASSING), "--seed", "9", "--loss-rate", "0"]
        args += ["--sms-delay-min", "500ms", "--sms-delay-max", "1s"]
        result = self.runner.invoke(app, [*args, "--format", "json", "-o", str(out)])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(json.loads(out.read_text(encoding="utf-8"))["seed"], 9)

    def test_simulate_tags_log_with_scenario_and_seed(self) -> None:
        log_dir = self.tmp / "logs"
        args = ["--log-dir", str(log_dir), "simulate", self.scenario(PASSING)]
        result = self.runner.invoke(app, [*args, "--seed", "9"])
        self.assertEqual(result.exit_code, 0, result.output)
        logger.complete()
        logger.remove()
        text = (log_dir / "smart_gsm_home.log").read_text(encoding="utf-8")
        self.assertIn("[case#9]", text)
        self.assertIn("Running case with seed 9", text)

    def test_experiment_tags_log_per_seed(self) -> None:
        log_dir = self.tmp / "logs"
        args = ["--log-dir", str(log_dir), "experiment", "--commands", "5"]
        result = self.runner.invoke(app, [*args, "--seeds", "2", "--loss-rate", "0"])
        self.assertEqual(result.exit_code, 0, result.output)
        logger.complete()
        logger.remove()
        text = (log_dir / "smart_gsm_home.log").read_text(encoding="utf-8")
        self.assertIn("[experiment#0]", text)
        self.assertIn("[experiment#1]", text)

    def test_unknown_format_lists_choices(self) -> None:
        args = ["baud-table", "--format", "xml"]
        result = self.runner.invoke(app, args)
        self.assertEqual(result.exit_code, 2)
        self.assertIn("text, json", result.output)

    def test_invalid_input_exits_2(self) -> None:
        cases = [
            ["simulate", self.scenario("at 6s expect load 9 on")],
            ["simulate", str(self.tmp / "missing.scn")],
            ["simulate", self.scenario(PASSING), "--loss-rate", "often"],
            ["simulate", self.scenario(PASSING), "--format", "xml"],
            ["simulate", self.scenario(PASSING), "--sms-delay-min", "5s"],
            ["baud-table", "--fosc", "fast"],
        ]
        for args in cases:
            with self.subTest(args=args):
                self.assertEqual(self.runner.invoke(app, args).exit_code, 2)

    def test_baud_table(self) -> None:
        result = self.runner.invoke(app, ["baud-table", "--fosc", "20MHz"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("9470", result.output)
        self.assertIn("-1.36", result.output)

    def test_baud_table_json(self) -> None:
        result = self.runner.invoke(app, ["baud-table", "--format", "json"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('"spbrg": 29', result.output)

    def test_experiment(self) -> None:
        result = self.runner.invoke(
            app, ["experiment", "--commands", "20", "--seeds", "2", "--loss-rate", "0"]
        )
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("Mean accuracy over 2 seed(s): 100.00%", result.output)

    def test_experiment_below_threshold(self) -> None:
        result = self.runner.invoke(
            app,
            ["experiment", "--commands", "20", "--seeds", "1", "--loss-rate", "0.9"],
        )
        self.assertEqual(result.exit_code, 1)


if __name__ == "__main__":
    unittest.main()
