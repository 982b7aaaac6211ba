import json
import unittest

from smart_gsm_home.baud_table import (
    DEFAULT_FOSC_HZ,
    DESIRED_RATES,
    baud_table,
    render_baud_table,
)


class TestBaudTable(unittest.TestCase):
    def setUp(self):
        self.columns = baud_table()

    def test_default_columns(self):
        self.assertEqual([c.fosc_hz for c in self.columns], list(DEFAULT_FOSC_HZ))
        for column in self.columns:
            self.assertEqual(list(column.cells), list(DESIRED_RATES))

    def test_spot_cells(self):
        twenty, _, eleven, _ = self.columns
        self.assertEqual(twenty.cells[9600].spbrg, 32)
        self.assertEqual(eleven.cells[2400].spbrg, 71)
        self.assertIsNone(twenty.cells[115200])

    def test_text_render(self):
        text = render_baud_table(self.columns)
        self.assertIn("20 MHz", text)
        self.assertIn("11.0592 MHz", text)
        row = next(line for line in text.splitlines() if line.split()[:1] == ["9600"])
        self.assertEqual(row.split()[1:4], ["9470", "-1.36", "32"])
        row = next(line for line in text.splitlines() if line.split()[:1] == ["19200"])
        self.assertEqual(row.split()[1:4], ["19.53k", "1.73", "15"])
        row = next(line for line in text.splitlines() if line.split()[:1] == ["115200"])
        self.assertEqual(set(row.split()[1:]), {"-"})

    def test_json_render(self):
        payload = json.loads(render_baud_table(self.columns, "json"))
        rows = {row["desired"]: row for row in payload[0]["rows"]}
        self.assertEqual(
            rows[9600],
            {"desired": 9600, "actual": 9470, "error_pct": -1.36, "spbrg": 32},
        )
        self.assertEqual(
            rows[300],
            {"desired": 300, "actual": None, "error_pct": None, "spbrg": None},
        )

    def test_rejects_non_positive_frequency(self):
        with self.assertRaises(TypeError):
            baud_table([0])


if __name__ == "__main__":
    unittest.main()
