import math
import unittest

import numpy as np
from django.test import SimpleTestCase
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from engine import fields as fields_mod
from engine import kernel as kernel_mod
from engine.scenarios import s5
from engine.utils import AxisPlaneException, WrongSignatureException, ZeroVectorException


def flat(c=0.8, g=0.5):
    return fields_mod.constant_fields(np.eye(3), [c, 0.0, 0.0], g)


class ChargeTests(SimpleTestCase):

    def test_combinations(self):
        h, G, g_plus, g_minus = kernel_mod.charge_combinations(0.5)
        self.assertAlmostEqual(h, math.sqrt(1 - 0.0625))
        self.assertAlmostEqual(G, 0.5 / h)
        self.assertAlmostEqual(g_plus * g_minus, -(h * h - 0.0625))
        self.assertAlmostEqual(g_plus + g_minus, 0.5)

    def test_angle_is_continuous_across_the_axis_plane(self):
        h, G, _, _ = kernel_mod.charge_combinations(0.7)
        plus = kernel_mod.angle(1e-12, 1.0, h, G)
        minus = kernel_mod.angle(-1e-12, 1.0, h, G)
        zero = kernel_mod.angle(0.0, 1.0, h, G)
        self.assertAlmostEqual(plus, zero, places=9)
        self.assertAlmostEqual(minus, zero, places=9)


class KernelTests(SimpleTestCase):

    def test_scalars_at_a_known_point(self):
        k = kernel_mod.eval_kernel(flat(), np.zeros(3), [1.0, 1.0, 1.0])
        self.assertAlmostEqual(k.b, 0.8)
        self.assertAlmostEqual(k.S2, 3.0)
        self.assertAlmostEqual(k.q, math.sqrt(2.36))
        self.assertAlmostEqual(k.B, 3.0 + 0.4 * math.sqrt(2.36))
        self.assertAlmostEqual(k.c, 0.8)
        self.assertAlmostEqual(k.D_B, -4 * k.h * k.h)
        self.assertAlmostEqual(k.K, math.sqrt(k.B) * k.J)
        self.assertAlmostEqual(k.q, 1.536229, places=6)
        self.assertAlmostEqual(k.B, 3.614492, places=6)
        self.assertAlmostEqual(k.L, 1.736229, places=6)
        self.assertAlmostEqual(k.nu, 1.680229, places=6)
        self.assertAlmostEqual(k.inv_x, 3.504112, places=5)
        self.assertAlmostEqual(k.h, 0.968246, places=6)
        self.assertAlmostEqual(k.K, 1.5077, delta=2e-4)
        self.assertAlmostEqual(k.J, 0.7930, delta=1e-4)
        self.assertAlmostEqual(k.nu / k.q, 1.0937, delta=1e-4)
        self.assertAlmostEqual(k.w, 1.920286, places=6)

    def test_metric_function_agrees(self):
        k = kernel_mod.eval_kernel(flat(), np.zeros(3), [-0.8, 0.3, 0.1])
        self.assertAlmostEqual(kernel_mod.metric_function(k.b, k.q, k.g), k.K, places=14)

    def test_axis_direction(self):
        k = kernel_mod.eval_kernel(flat(), np.zeros(3), [0.8, 0.0, 0.0])
        self.assertAlmostEqual(k.eta * k.B, k.c2, places=12)

    def test_riemannian_reduction(self):
        y = np.array([0.3, -1.1, 0.4])
        k = kernel_mod.eval_kernel(flat(g=0.0), np.zeros(3), y)
        self.assertAlmostEqual(k.K, np.linalg.norm(y), places=14)
        self.assertAlmostEqual(k.B, y.dot(y), places=14)

    def test_zero_vector(self):
        with self.assertRaises(ZeroVectorException):
            kernel_mod.eval_kernel(flat(), np.zeros(3), np.zeros(3))

    def test_time_space_fields_refused(self):
        with self.assertRaises(WrongSignatureException):
            kernel_mod.eval_kernel(s5().fields, np.zeros(4), [1.0, 0.8, 0.0, 0.0])

    def test_finsler_norm(self):
        self.assertAlmostEqual(kernel_mod.finsler_norm(flat(), np.zeros(3), [2.0, 2.0, 2.0]),
                               2 * kernel_mod.finsler_norm(flat(), np.zeros(3), [1.0, 1.0, 1.0]), places=13)


class GeneratingFunctionTests(SimpleTestCase):

    def test_identities(self):
        k = kernel_mod.eval_kernel(flat(), np.zeros(3), [1.0, 1.0, 1.0])
        V, V1, V2 = kernel_mod.generating_V(flat(), np.zeros(3), [1.0, 1.0, 1.0], k)
        w = k.q / k.b
        self.assertAlmostEqual(V, k.K / k.b)
        self.assertAlmostEqual(V, 1.8846, delta=2e-4)
        self.assertAlmostEqual(V1, w * V / (1 + k.g * w + w * w), places=7)
        self.assertAlmostEqual(V2, V / (1 + k.g * w + w * w) ** 2, places=6)

    def test_axis_plane(self):
        with self.assertRaises(AxisPlaneException):
            kernel_mod.generating_V(flat(), np.zeros(3), [0.0, 1.0, 0.0])


class KernelPropertyTests(unittest.TestCase):

    @settings(deadline=None, max_examples=60)
    @given(st.floats(min_value=-1.9, max_value=1.9),
           st.floats(min_value=0.05, max_value=0.95),
           st.lists(st.floats(min_value=-1, max_value=1), min_size=3, max_size=3),
           st.floats(min_value=0.1, max_value=10))
    def test_positive_and_homogeneous(self, g, c, y, factor):
        y = np.array(y)
        assume(np.linalg.norm(y) > 1e-2 and np.linalg.norm(y[1:]) > 1e-3)
        space = flat(c, g)
        k = kernel_mod.eval_kernel(space, np.zeros(3), y)
        self.assertGreater(k.B, 0.0)
        self.assertGreater(k.nu, 0.0)
        scaled = kernel_mod.eval_kernel(space, np.zeros(3), factor * y)
        self.assertAlmostEqual(scaled.K / k.K, factor, delta=1e-10 * factor)
