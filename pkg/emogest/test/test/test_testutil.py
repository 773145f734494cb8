""" Tests of the test helpers. """

import unittest

import numpy as np
import torch

from emogest.test.testutil import assert_gradients_match, assert_rel_error


class TestAssertions(unittest.TestCase):

    def test_rel_error_nan(self):
        with self.assertRaises(AssertionError) as cm:
            assert_rel_error(self, float('nan'), 6.5, 0.0001)
        self.assertEqual(str(cm.exception),
                         "actual nan, desired 6.5, rel error nan, tolerance 0.0001")

    def test_rel_error_tensor(self):
        err = assert_rel_error(self, torch.tensor(2.0), 2.0, 1e-12)
        self.assertEqual(err, 0.0)

        err = assert_rel_error(self, torch.ones(3, dtype=torch.float32), np.ones(3), 1e-12)
        self.assertEqual(err, 0.0)

        with self.assertRaises(AssertionError) as cm:
            assert_rel_error(self, 1e-2 * torch.ones(3), np.zeros(3), 1e-3)
        self.assertTrue(str(cm.exception).startswith('arrays do not match'))

    def test_gradient_report(self):
        good = {'x': {'rel error': 1e-3, 'abs error': 1e-9}}
        assert_gradients_match(self, good, 1e-6)

        bad = {'x': {'rel error': 0.5, 'abs error': 0.1}}
        with self.assertRaises(AssertionError) as cm:
            assert_gradients_match(self, bad, 1e-6)
        self.assertIn('gradient error for x', str(cm.exception))


if __name__ == "__main__":
    unittest.main()
