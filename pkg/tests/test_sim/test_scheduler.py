import unittest

from smart_gsm_home.errors import ClockError
from smart_gsm_home.scheduler import EventQueue


class TestEventQueue(unittest.TestCase):
    def test_time_then_insertion_order(self):
        queue = EventQueue()
        queue.schedule(10, "late")
        queue.schedule(5, "first")
        queue.schedule(5, "second")
        self.assertEqual(queue.peek_time(), 5)
        self.assertEqual([queue.pop() for _ in range(3)], [
            (5, "first"),
            (5, "second"),
            (10, "late"),
        ])
        self.assertEqual(queue.now, 10)
        self.assertFalse(queue)
        self.assertIsNone(queue.peek_time())

    def test_cannot_schedule_in_the_past(self):
        queue = EventQueue(start_us=100)
        queue.schedule(100, "now")
        with self.assertRaises(ClockError):
            queue.schedule(99, "past")

    def test_advance_to(self):
        queue = EventQueue()
        queue.advance_to(50)
        self.assertEqual(queue.now, 50)
        queue.advance_to(10)
        self.assertEqual(queue.now, 50)
        queue.schedule(60, "x")
        with self.assertRaises(ClockError):
            queue.advance_to(70)
        queue.advance_to(60)
        self.assertEqual(len(queue), 1)

    def test_clock_never_decreases(self):
        queue = EventQueue()
        for due in (3, 1, 4, 1, 5, 9, 2, 6):
            queue.schedule(due, due)
        seen = []
        while queue:
            seen.append(queue.pop()[0])
            self.assertEqual(queue.now, seen[-1])
        self.assertEqual(seen, sorted(seen))


if __name__ == "__main__":
    unittest.main()
