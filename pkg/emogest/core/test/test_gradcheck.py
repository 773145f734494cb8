""" Tests of the finite-difference gradient checker. """

import unittest

import torch
from six import StringIO

from emogest.core.gradcheck import check_partial_derivatives, max_rel_error
from emogest.test.testutil import assert_gradients_match, assert_rel_error


class TestCheckPartials(unittest.TestCase):

    def test_paraboloid(self):
        # f(x, y) = (x-3)^2 + xy + (y+4)^2 - 3
        inputs = {'x': torch.tensor([2.0], dtype=torch.float64),
                  'y': torch.tensor([-1.5], dtype=torch.float64)}

        def func(inp):
            x, y = inp['x'], inp['y']
            return ((x - 3.0)**2 + x*y + (y + 4.0)**2 - 3.0).sum()

        out = StringIO()
        data = check_partial_derivatives(func, inputs, out_stream=out)

        assert_rel_error(self, data['x']['J_fwd'][0], 2*(2.0 - 3.0) - 1.5, 1e-10)
        assert_rel_error(self, data['y']['J_fwd'][0], 2.0 + 2*(-1.5 + 4.0), 1e-10)
        assert_gradients_match(self, data, 1e-6)
        self.assertIn("'loss' wrt 'x'", out.getvalue())

    def test_subsample_and_parameters(self):
        torch.manual_seed(3)
        layer = torch.nn.Linear(5, 3).double()
        x = torch.randn(7, 5, dtype=torch.float64)

        def func(inp):
            return torch.tanh(torch.nn.functional.linear(x, inp['weight'], inp['bias'])).pow(2).mean()

        data = check_partial_derivatives(func, {'weight': layer.weight, 'bias': layer.bias},
                                         max_entries=6, out_stream=None)

        self.assertEqual(len(data['weight']['J_fd']), 6)
        self.assertEqual(len(data['bias']['J_fd']), 3)
        self.assertLess(max_rel_error(data), 1e-6)

    def test_unused_input(self):
        inputs = {'a': torch.ones(3, dtype=torch.float64),
                  'b': torch.ones(2, dtype=torch.float64)}

        data = check_partial_derivatives(lambda inp: inp['a'].sum(), inputs,
                                         out_stream=None)

        self.assertEqual(data['b']['abs error'], 0.0)
        assert_rel_error(self, data['a']['J_fd'], [1.0, 1.0, 1.0], 1e-8)


if __name__ == "__main__":
    unittest.main()
