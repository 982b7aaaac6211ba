import json
import pathlib
import tempfile
import unittest

from smart_gsm_home.enums import Direction, ReportFormat
from smart_gsm_home.report import (
    AssertionResult,
    LatencyStats,
    RunReport,
    TraceEntry,
    render_report,
    save_report,
)


def sample_report(passed: bool = True) -> RunReport:
    return RunReport(
        name="demo",
        seed=3,
        passed=passed,
        accuracy_pct=99.5,
        commands_sent=200,
        commands_ok=199,
        feedback_delivered=197,
        assertions=[
            AssertionResult(
                line=2,
                time_us=6_000_000,
                description="load 1 on",
                passed=passed,
                detail="load 1 is on" if passed else "load 1 is off",
            )
        ],
        latencies={"modem_response": LatencyStats.from_samples([300, 300])},
        drops=1,
        trace=[
            TraceEntry(
                emitted_us=0,
                start_us=0.0,
                delivered_us=3168,
                direction=Direction.TO_MODEM,
                data="AT<CR>",
            )
        ],
    )


class TestLatencyStats(unittest.TestCase):
    def test_from_samples(self):
        stats = LatencyStats.from_samples([100, 200, 600])
        self.assertEqual(stats.count, 3)
        self.assertEqual(stats.min_us, 100.0)
        self.assertEqual(stats.mean_us, 300.0)
        self.assertEqual(stats.max_us, 600.0)
        self.assertEqual(stats.describe(), "min 100us / mean 300us / max 600us (n=3)")

    def test_empty(self):
        stats = LatencyStats.from_samples([])
        self.assertEqual(stats.count, 0)
        self.assertIsNone(stats.max_us)
        self.assertEqual(stats.describe(), "n/a")


class TestRenderReport(unittest.TestCase):
    def test_json_keys(self):
        payload = json.loads(render_report(sample_report(), ReportFormat.JSON))
        keys = ("accuracy_pct", "assertions", "latencies", "drops", "store_full")
        for key in (*keys, "trace"):
            self.assertIn(key, payload)
        self.assertEqual(payload["trace"][0]["direction"], "ctl->modem")

    def test_text(self):
        text = render_report(sample_report(passed=False), "text")
        self.assertIn("Scenario demo (seed 3): FAIL", text)
        self.assertIn("Accuracy: 99.50% (199/200 commands", text)
        self.assertIn("load 1 is off", text)
        self.assertIn("modem_response", text)

    def test_accuracy_bounds(self):
        with self.assertRaises(ValueError):
            RunReport(
                name="x",
                seed=0,
                passed=True,
                accuracy_pct=100.5,
                commands_sent=0,
                commands_ok=0,
                feedback_delivered=0,
            )


class TestSaveReport(unittest.TestCase):
    def test_writes_json_by_default(self):
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory) / "out" / "report.json"
            self.assertEqual(save_report(sample_report(), path), path)
            payload = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(payload["accuracy_pct"], 99.5)


if __name__ == "__main__":
    unittest.main()
