"""Tests for `smart_gsm_home.models`.

Covers the defaults of :class:`SimBaseModel`: forbidden extras, frozen
instances with value equality, and untouched whitespace.
"""

import unittest

from pydantic import ValidationError

from smart_gsm_home.models import SimBaseModel


class Sample(SimBaseModel):
    name: str
    count: int = 0


class TestSimBaseModelConfig(unittest.TestCase):
    def test_extra_is_forbidden(self):
        self.assertEqual(SimBaseModel.model_config.get("extra"), "forbid")
        with self.assertRaises(ValidationError):
            Sample(name="a", unknown=1)

    def test_frozen(self):
        sample = Sample(name="a")
        with self.assertRaises(ValidationError):
            sample.count = 2

    def test_value_equality_and_hash(self):
        self.assertEqual(Sample(name="a", count=1), Sample(name="a", count=1))
        self.assertEqual(hash(Sample(name="a")), hash(Sample(name="a")))

    def test_whitespace_preserved(self):
        self.assertEqual(Sample(name=" l1on ").name, " l1on ")


if __name__ == "__main__":
    unittest.main()
