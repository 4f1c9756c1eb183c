import math

import numpy as np
from django.test import SimpleTestCase

from engine import oracle
from engine.constants import EXTRAPOLATION_LEVELS
from engine.utils import (
    InadmissibleStencilException, RangeClampException, StepUnderflowException,
    ZeroVectorException)


class RichardsonTests(SimpleTestCase):

    def test_removes_the_leading_error_term(self):
        # estimates of 1 with an h^2 error term on h = 1, 1/2, 1/4
        value, history = oracle.richardson([1.0 + 1.0, 1.0 + 0.25, 1.0 + 0.0625])
        self.assertAlmostEqual(float(value), 1.0, places=12)
        self.assertEqual(len(history), 2)

    def test_single_estimate_has_no_history(self):
        value, history = oracle.richardson([np.array([2.0])])
        self.assertEqual(history, ())
        np.testing.assert_array_equal(value, [2.0])


class GradientTests(SimpleTestCase):

    def test_scalar_function(self):
        func = lambda p: p[0] ** 2 * math.sin(p[1])  # noqa: E731
        result = oracle.gradient(func, [1.3, 0.4])
        np.testing.assert_allclose(result.value, [2 * 1.3 * math.sin(0.4), 1.3 ** 2 * math.cos(0.4)], rtol=1e-9)
        self.assertLess(result.certificate, 1e-8)
        self.assertEqual(result.levels, EXTRAPOLATION_LEVELS)

    def test_steps_are_powers_of_two(self):
        result = oracle.gradient(lambda p: p[0] ** 3, [0.7])
        mantissa, _ = math.frexp(result.steps[0])
        self.assertEqual(mantissa, 0.5)

    def test_tensor_valued_function(self):
        func = lambda p: np.outer(p, p)  # noqa: E731
        result = oracle.gradient(func, [1.0, 2.0])
        self.assertEqual(result.value.shape, (2, 2, 2))
        np.testing.assert_allclose(result.value[0], [[2.0, 2.0], [2.0, 0.0]], atol=1e-9)

    def test_refused_stencil_point(self):
        def func(p):
            if p[0] > 1.0:
                raise ZeroVectorException()
            return p[0]

        with self.assertRaises(InadmissibleStencilException):
            oracle.gradient(func, [1.0])

    def test_certificate_failure(self):
        with self.assertRaises(StepUnderflowException):
            oracle.gradient(lambda p: math.sin(1e4 * p[0]), [0.3], base_step=1e-2)

    def test_needs_two_levels(self):
        with self.assertRaises(ValueError):
            oracle.gradient(lambda p: p[0], [1.0], levels=1)


class HessianTests(SimpleTestCase):

    def test_quadratic_form(self):
        matrix = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, -0.3], [0.0, -0.3, 4.0]])
        result = oracle.hessian(lambda p: 0.5 * p.dot(matrix).dot(p), [0.3, -1.2, 0.8], scale_floor=1.0)
        np.testing.assert_allclose(result.value, matrix, atol=1e-8)
        np.testing.assert_array_equal(result.value, result.value.T)

    def test_smooth_function(self):
        result = oracle.hessian(lambda p: math.exp(p[0]) * p[1] ** 2, [0.2, 1.5])
        expected = [[math.exp(0.2) * 2.25, math.exp(0.2) * 3.0], [math.exp(0.2) * 3.0, 2 * math.exp(0.2)]]
        np.testing.assert_allclose(result.value, expected, rtol=1e-7)


class ParameterDerivativeTests(SimpleTestCase):

    def test_derivative(self):
        result = oracle.param_derivative(lambda g: math.exp(g) * g, 0.5)
        self.assertAlmostEqual(float(result.value), math.exp(0.5) * 1.5, places=8)

    def test_stencil_leaving_the_range(self):
        with self.assertRaises(RangeClampException):
            oracle.param_derivative(lambda g: g, 1.99999)

    def test_unbounded_parameter(self):
        result = oracle.param_derivative(lambda g: g ** 2, 3.0, bounds=None)
        self.assertAlmostEqual(float(result.value), 6.0, places=8)


class ConfigureTests(SimpleTestCase):

    def tearDown(self):
        oracle.configure(levels=EXTRAPOLATION_LEVELS)

    def test_unknown_option(self):
        with self.assertRaises(ValueError):
            oracle.configure(smoothing=1)

    def test_too_few_levels(self):
        with self.assertRaises(ValueError):
            oracle.configure(levels=1)

    def test_levels_apply_to_later_calls(self):
        self.assertEqual(oracle.configure(levels=3)['levels'], 3)
        self.assertEqual(oracle.gradient(lambda p: p[0] ** 2, [1.0]).levels, 3)
