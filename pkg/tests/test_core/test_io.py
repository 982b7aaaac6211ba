from __future__ import annotations

import os
import pathlib
import tempfile
import unittest
from unittest.mock import patch

from smart_gsm_home.io import atomic_write


class TestAtomicWrite(unittest.TestCase):
    def test_basic_text_write(self):
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory) / "report.json"
            self.assertEqual(atomic_write(path, "{}"), path)
            self.assertEqual(path.read_text(), "{}")

    def test_overwrites_existing_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory) / "report.txt"
            path.write_text("old")
            atomic_write(path, "new")
            self.assertEqual(path.read_text(), "new")

    def test_mkdir_creates_parent_directories(self):
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory) / "runs" / "report.txt"
            atomic_write(path, "hello", mkdir=True)
            self.assertEqual(path.read_text(), "hello")

    def test_missing_parent_raises_by_default(self):
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory) / "missing" / "report.txt"
            with self.assertRaises(FileNotFoundError):
                atomic_write(path, "hello")

    def test_failed_replace_leaves_no_temp_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory) / "report.txt"
            with patch("smart_gsm_home.io.os.replace", side_effect=OSError("boom")):
                with self.assertRaises(OSError):
                    atomic_write(path, "hello")
            self.assertEqual(os.listdir(directory), [])


if __name__ == "__main__":
    unittest.main()
