"""Tests for the scenario language and the experiment generator."""

from __future__ import annotations

import unittest

from smart_gsm_home.errors import ScenarioInvalid
from smart_gsm_home.scenario import (
    ExpectLatency,
    ExpectLoad,
    ExpectSms,
    ExpectStoreUsed,
    SendSms,
    generate_experiment,
    parse_scenario,
)

EXAMPLE = """\
# single command round trip
set seed 7
set loss-rate 1%

at 0ms sms +60123456789 "L1ON"
  at 6s expect load 1 on
at 8s expect sms to +60123456789 contains "L1:ON"
at 8s expect latency load 1 <= 2s
at 20s expect store used 0
"""


class TestParseScenario(unittest.TestCase):
    def test_example(self) -> None:
        scenario = parse_scenario(EXAMPLE, name="round-trip")
        self.assertEqual(scenario.name, "round-trip")
        self.assertEqual(scenario.overrides, {"seed": 7, "network.loss_rate": 0.01})
        self.assertEqual(
            list(scenario.steps),
            [
                SendSms(time_us=0, line=5, sender="+60123456789", body="L1ON"),
                ExpectLoad(time_us=6_000_000, line=6, load_id=1, energized=True),
                ExpectSms(
                    time_us=8_000_000, line=7, number="+60123456789", contains="L1:ON"
                ),
                ExpectLatency(time_us=8_000_000, line=8, load_id=1, bound_us=2_000_000),
                ExpectStoreUsed(time_us=20_000_000, line=9, count=0),
            ],
        )
        self.assertEqual(len(scenario.stimuli), 1)
        self.assertEqual(len(scenario.assertions), 4)

    def test_body_keeps_spaces(self) -> None:
        (step,) = parse_scenario('at 1s sms +601 " l1on "').steps
        self.assertEqual(step.body, " l1on ")

    def test_empty(self) -> None:
        self.assertEqual(parse_scenario("# nothing\n\n").steps, ())

    def test_settings(self) -> None:
        scenario = parse_scenario(
            "set sms-delay-max 2s\nset whitelist +601, +602\nset fosc 18.432MHz\n"
            "set spbrg 29\nset settle 30s"
        )
        self.assertEqual(
            scenario.overrides,
            {
                "network.delay_max_us": 2_000_000,
                "controller.whitelist": frozenset({"+601", "+602"}),
                "controller.fosc_hz": 18_432_000,
                "controller.spbrg": 29,
                "settle_us": 30_000_000,
            },
        )

    def test_extra_commands(self) -> None:
        scenario = parse_scenario(
            "set command FANON load 3 on\nset command NIGHT all off"
        )
        self.assertEqual(
            scenario.overrides["controller.extra_commands"],
            {"FANON": "load 3 on", "NIGHT": "all off"},
        )

    def assertInvalid(self, text: str, line: int, column: int) -> ScenarioInvalid:
        with self.assertRaises(ScenarioInvalid) as cm:
            parse_scenario(text)
        self.assertEqual((cm.exception.line, cm.exception.column), (line, column))
        return cm.exception

    def test_load_out_of_range(self) -> None:
        exc = self.assertInvalid("at 6s expect load 9 on", 1, 19)
        self.assertIn("load id 9", exc.reason)

    def test_unknown_directive(self) -> None:
        self.assertInvalid("# ok\n  jump 5s", 2, 3)

    def test_unknown_step(self) -> None:
        self.assertInvalid("at 1s dance", 1, 7)

    def test_bad_values(self) -> None:
        self.assertInvalid('at 1s sms phone "L1ON"', 1, 11)
        self.assertInvalid("at 1s expect load 1 maybe", 1, 21)
        self.assertInvalid(f'at 1s sms +601 "{"x" * 161}"', 1, 17)
        self.assertInvalid("set loss-rate 2", 1, 15)
        self.assertInvalid("set colour blue", 1, 5)

    def test_settings_checked_against_config(self) -> None:
        self.assertInvalid("set sms-delay-min 4s", 1, 19)
        self.assertInvalid("set response-latency 1ms", 1, 22)

    def test_bad_extra_command(self) -> None:
        self.assertInvalid("set command L1ON load 2 on", 1, 13)
        self.assertInvalid("set command FANON load 8 on", 1, 13)


class TestGenerateExperiment(unittest.TestCase):
    def test_shape(self) -> None:
        scenario = generate_experiment(3, commands=200, loss_rate=0.01)
        self.assertEqual(len(scenario.stimuli), 200)
        self.assertEqual(scenario.assertions[-1].count, 0)
        self.assertEqual(scenario.overrides["network.loss_rate"], 0.01)
        self.assertEqual(scenario.overrides["seed"], 3)
        self.assertNotIn("STATUS", {step.body for step in scenario.stimuli})
        times = [step.time_us for step in scenario.stimuli]
        self.assertEqual(times, sorted(times))

    def test_deterministic(self) -> None:
        self.assertEqual(generate_experiment(5, 50), generate_experiment(5, 50))
        self.assertNotEqual(generate_experiment(5, 50), generate_experiment(6, 50))

    def test_negative_count(self) -> None:
        with self.assertRaises(ValueError):
            generate_experiment(0, -1)


if __name__ == "__main__":
    unittest.main()
