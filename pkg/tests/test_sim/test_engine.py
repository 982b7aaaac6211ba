"""End-to-end runs of the wired phone, network, modem, link and controller."""

from __future__ import annotations

import statistics
import unittest

from smart_gsm_home.config import SimConfig, apply_overrides
from smart_gsm_home.engine import Simulation, run
from smart_gsm_home.enums import Direction
from smart_gsm_home.scenario import Scenario, generate_experiment, parse_scenario

PHONE = "+60123456789"

SINGLE_COMMAND = f"""\
at 0ms sms {PHONE} "L1ON"
at 6s expect load 1 on
at 8s expect sms to {PHONE} contains "L1:ON"
at 8s expect latency load 1 <= 2s
at 20s expect store used 0
"""


class TestSingleCommand(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.report = run(parse_scenario(SINGLE_COMMAND, name="l1on"))

    def test_assertions_pass(self) -> None:
        self.assertTrue(self.report.passed)
        self.assertEqual(len(self.report.assertions), 4)
        self.assertEqual(self.report.accuracy_pct, 100.0)

    def test_timing_bounds(self) -> None:
        latencies = self.report.latencies
        self.assertLessEqual(latencies["detection_to_actuation"].max_us, 2_000_000)
        self.assertLessEqual(latencies["round_trip"].max_us, 8_000_000)
        self.assertEqual(self.report.feedback_delivered, 1)

    def test_trace_is_causal(self) -> None:
        trace = self.report.trace
        self.assertTrue(trace)
        for entry in trace:
            self.assertGreaterEqual(entry.delivered_us, entry.emitted_us)
        emitted = [entry.emitted_us for entry in trace]
        self.assertEqual(emitted, sorted(emitted))
        first_command = next(e for e in trace if e.direction is Direction.TO_MODEM)
        self.assertEqual(first_command.data, "AT<CR>")

    def test_fails_when_expectation_wrong(self) -> None:
        text = f'at 0ms sms {PHONE} "L1ON"\nat 6s expect load 2 on'
        report = run(parse_scenario(text))
        self.assertFalse(report.passed)
        self.assertEqual(report.assertions[0].detail, "load 2 is off")


class TestSimulation(unittest.TestCase):
    def test_all_on_single_cycle(self) -> None:
        sim = Simulation()
        sim.send_sms(PHONE, "ALLON")
        sim.run_until_idle()
        self.assertEqual(sim.loads.states(), (True,) * 4)
        log = sim.loads.change_log
        self.assertEqual(len(log), 4)
        self.assertEqual(len({change.provenance for change in log}), 1)
        self.assertEqual(len({change.time_us for change in log}), 1)

    def test_delete_after_process(self) -> None:
        sim = Simulation()
        for n, body in enumerate(("L1ON", "L2ON", "HELLO", "STATUS", "ALLOFF")):
            sim.send_sms(PHONE, body, at_us=n * 1_000_000)
        sim.run_until_idle()
        self.assertEqual(sim.modem.store.used, 0)
        self.assertEqual(sim.modem.store_full, 0)
        self.assertEqual(sim.report().accuracy_pct, 100.0)
        slots = [r.slot for r in sim.records.values()]
        self.assertTrue(all(slot is not None and slot <= 10 for slot in slots))

    def test_unmatched_command_gets_no_feedback(self) -> None:
        sim = Simulation()
        sim.send_sms(PHONE, "HELLO")
        sim.run_until_idle()
        self.assertEqual(sim.phone(PHONE).inbox, [])
        (record,) = sim.records.values()
        self.assertTrue(record.correct)

    def test_whitelist(self) -> None:
        config = apply_overrides(SimConfig(), {"controller.whitelist": {"+601"}})
        sim = Simulation(config)
        sim.send_sms("+602", "L1ON")
        sim.run_until_idle()
        self.assertFalse(sim.loads.is_on(1))
        self.assertEqual(sim.modem.store.used, 0)
        self.assertEqual(sim.report().accuracy_pct, 100.0)

    def test_invalid_stimulus(self) -> None:
        sim = Simulation()
        with self.assertRaises(ValueError):
            sim.send_sms("home", "L1ON")
        with self.assertRaises(ValueError):
            sim.send_sms(PHONE, "x" * 161)

    def test_small_store_overflows(self) -> None:
        config = apply_overrides(
            SimConfig(),
            {"modem.capacity": 1, "network.delay_min_us": 0, "network.delay_max_us": 0},
        )
        sim = Simulation(config)
        for _ in range(3):
            sim.send_sms(PHONE, "L1ON", at_us=0)
        sim.run_until_idle()
        report = sim.report()
        self.assertGreater(report.store_full, 0)
        self.assertLess(report.accuracy_pct, 100.0)

    def test_replies_start_promptly_when_sms_arrive_together(self) -> None:
        config = apply_overrides(
            SimConfig(),
            {"network.delay_min_us": 1_000_000, "network.delay_max_us": 1_000_000},
        )
        for offset in range(0, 200_001, 2_500):
            with self.subTest(offset=offset):
                sim = Simulation(config)
                sim.send_sms(PHONE, "L1ON", at_us=0)
                sim.send_sms(PHONE, "L2ON", at_us=offset)
                sim.run_until_idle()
                self.assertEqual(sim.loads.states()[:2], (True, True))
                report = sim.report()
                self.assertEqual(report.accuracy_pct, 100.0)
                self.assertLessEqual(report.latencies["modem_response"].max_us, 500)
                replies = [
                    e for e in sim.trace if e.direction is Direction.TO_CONTROLLER
                ]
                for command in sim.trace:
                    if command.direction is not Direction.TO_MODEM:
                        continue
                    reply = next(
                        e for e in replies if e.start_us >= command.delivered_us
                    )
                    self.assertLessEqual(reply.start_us - command.delivered_us, 500)

    def test_incompatible_link_never_actuates(self) -> None:
        config = apply_overrides(SimConfig(), {"controller.spbrg": 15})
        sim = Simulation(config)
        sim.send_sms(PHONE, "L1ON")
        sim.run_until(30_000_000)
        self.assertFalse(sim.loads.is_on(1))
        self.assertTrue(all(entry.framing_error for entry in sim.trace))


class TestAcceptance(unittest.TestCase):
    def test_empty_scenario(self) -> None:
        report = run(Scenario())
        self.assertTrue(report.passed)
        self.assertEqual(report.assertions, [])
        self.assertEqual(report.accuracy_pct, 100.0)

    def test_modem_latency_bound(self) -> None:
        report = run(generate_experiment(11, commands=200))
        stats = report.latencies["modem_response"]
        self.assertGreater(stats.count, 200)
        self.assertLessEqual(stats.max_us, 500)

    def test_zero_loss_is_perfect(self) -> None:
        report = run(generate_experiment(0, commands=200, loss_rate=0.0))
        self.assertEqual(report.accuracy_pct, 100.0)
        self.assertEqual(report.drops, 0)
        self.assertTrue(report.passed)
        self.assertLessEqual(
            report.latencies["detection_to_actuation"].max_us, 2_000_000
        )

    def test_one_percent_loss_over_thirty_seeds(self) -> None:
        accuracies = [
            run(generate_experiment(seed, commands=200, loss_rate=0.01)).accuracy_pct
            for seed in range(30)
        ]
        self.assertGreaterEqual(statistics.fmean(accuracies), 98.0)

    def test_heavy_loss_lowers_accuracy(self) -> None:
        report = run(generate_experiment(1, commands=50, loss_rate=0.5))
        self.assertLess(report.accuracy_pct, 100.0)
        self.assertGreater(report.drops, 0)

    def test_mean_accuracy_falls_with_loss(self) -> None:
        means = [
            statistics.fmean(
                run(generate_experiment(seed, commands=20, loss_rate=loss)).accuracy_pct
                for seed in range(30)
            )
            for loss in (0.0, 0.1, 0.3)
        ]
        self.assertEqual(means[0], 100.0)
        self.assertGreater(means[0], means[1])
        self.assertGreater(means[1], means[2])

    def test_reports_are_reproducible(self) -> None:
        scenario = generate_experiment(4, commands=30, loss_rate=0.05)
        first = run(scenario).model_dump_json()
        second = run(scenario).model_dump_json()
        self.assertEqual(first, second)

    def test_seed_override_changes_run(self) -> None:
        scenario = parse_scenario(SINGLE_COMMAND)
        a = run(scenario, overrides={"seed": 1})
        b = run(scenario, overrides={"seed": 2})
        self.assertEqual((a.seed, b.seed), (1, 2))
        self.assertNotEqual(a.trace, b.trace)


if __name__ == "__main__":
    unittest.main()
