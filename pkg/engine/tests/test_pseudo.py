import math

import numpy as np
from django.test import SimpleTestCase

from engine import pseudo
from engine.constants import DEFAULT_TOLERANCES
from engine.scenarios import draw_samples, s1, s5
from engine.utils import (
    InadmissibleVectorException, WrongSignatureException, ZeroVectorException,
    relative_residual)

ORIGIN = np.zeros(4)
P5 = np.array([1.0, 0.8, 0.0, 0.0])


class PseudoKernelTests(SimpleTestCase):

    def setUp(self):
        self.fields = s5().fields

    def test_scalars_at_a_known_point(self):
        k = pseudo.eval_pseudo_kernel(self.fields, ORIGIN, P5)
        self.assertAlmostEqual(k.b, 0.8)
        self.assertAlmostEqual(k.S2, 0.36)
        self.assertAlmostEqual(k.q, math.sqrt(0.28))
        self.assertAlmostEqual(k.B, 0.36 - 0.4 * math.sqrt(0.28))
        self.assertAlmostEqual(k.q, 0.529150, places=6)
        self.assertAlmostEqual(k.B, 0.148338, places=5)
        self.assertAlmostEqual(k.h, 1.030776, places=6)
        self.assertAlmostEqual(k.g_plus, 0.780776, places=6)
        self.assertAlmostEqual(k.g_minus, -1.280776, places=6)
        self.assertAlmostEqual(k.F, 0.50872, delta=1e-5)
        self.assertAlmostEqual(k.F_product, k.F, places=12)
        self.assertAlmostEqual(k.D_B, 0.25 + 4.0)

    def test_factorisation(self):
        k = pseudo.eval_pseudo_kernel(self.fields, ORIGIN, P5)
        self.assertAlmostEqual((k.b + k.g_plus * k.q) * (k.b + k.g_minus * k.q), k.B, places=14)
        self.assertAlmostEqual(k.L * k.L - k.h * k.h * k.q * k.q, k.B, places=14)

    def test_homogeneity(self):
        self.assertAlmostEqual(pseudo.pseudo_norm(self.fields, ORIGIN, 3 * P5),
                               3 * pseudo.pseudo_norm(self.fields, ORIGIN, P5), places=12)

    def test_riemannian_reduction(self):
        self.assertAlmostEqual(pseudo.pseudo_norm(self.fields.with_charge(0.0), ORIGIN, P5), 0.6, places=14)

    def test_outside_the_domain(self):
        # b < 0, S^2 < 0, b^2 < S^2 and B < 0 in turn
        for y in ([-1.0, 0.8, 0.0, 0.0], [0.5, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [1.0, 0.9, 0.0, 0.0]):
            with self.assertRaises(InadmissibleVectorException):
                pseudo.eval_pseudo_kernel(self.fields, ORIGIN, y)
            self.assertFalse(pseudo.admissible(self.fields, ORIGIN, y))

    def test_zero_vector(self):
        with self.assertRaises(ZeroVectorException):
            pseudo.eval_pseudo_kernel(self.fields, ORIGIN, np.zeros(4))

    def test_positive_definite_fields_refused(self):
        with self.assertRaises(WrongSignatureException):
            pseudo.eval_pseudo_kernel(s1().fields, np.zeros(3), [1.0, 1.0, 1.0])

    def test_admissible_margin(self):
        self.assertTrue(pseudo.admissible(self.fields, ORIGIN, P5))
        self.assertFalse(pseudo.admissible(self.fields, ORIGIN, P5, margin=0.5))

    def test_pseudo_scalars_checks_the_domain(self):
        with self.assertRaises(InadmissibleVectorException):
            pseudo.pseudo_scalars(0.0, 0.3, 0.5, 0.64, 4)
        # b = 0.8, q^2 = 0.45: b + g_- q < 0
        with self.assertRaises(InadmissibleVectorException):
            pseudo.pseudo_scalars(0.8, 0.19, 0.5, 0.64, 4)


class DualityTests(SimpleTestCase):

    def setUp(self):
        self.fields = s5().fields

    def test_rule(self):
        g, q = pseudo.duality_rule(0.5, 0.3)
        self.assertEqual(g, 0.5j)
        self.assertEqual(q, 0.3j)
        self.assertAlmostEqual((g * q).real, -0.15)

    def test_metric_matches_the_hessian(self):
        _, g_ij = pseudo.pseudo_metric_numeric(self.fields, ORIGIN, P5)
        metric = pseudo.duality_substitution(self.fields, ORIGIN, P5, 'metric')
        self.assertLessEqual(relative_residual(metric, g_ij), DEFAULT_TOLERANCES['duality_metric'])
        self.assertEqual(metric.dtype, np.float64)

    def test_covector(self):
        y_low, _ = pseudo.pseudo_metric_numeric(self.fields, ORIGIN, P5)
        covector = pseudo.duality_substitution(self.fields, ORIGIN, P5, 'y_lower')
        self.assertLessEqual(relative_residual(covector, y_low), DEFAULT_TOLERANCES['duality_covector'])
        self.assertAlmostEqual(covector.dot(P5), pseudo.pseudo_norm(self.fields, ORIGIN, P5) ** 2, places=10)

    def test_unknown_expression(self):
        with self.assertRaises(ValueError):
            pseudo.duality_substitution(self.fields, ORIGIN, P5, 'spray')

    def test_metric_at_a_known_point(self):
        _, g_ij = pseudo.pseudo_metric_numeric(self.fields, ORIGIN, P5)
        expected = np.array([[-2.26619, 4.55194, 0.0, 0.0],
                             [4.55194, -7.43456, 0.0, 0.0],
                             [0.0, 0.0, -1.74463, 0.0],
                             [0.0, 0.0, 0.0, -1.74463]])
        np.testing.assert_allclose(g_ij, expected, atol=1e-4)

    def test_signature_on_every_sample(self):
        scenario = s5()
        for x, y in draw_samples(scenario):
            _, g_ij = pseudo.pseudo_metric_numeric(scenario.fields, x, y)
            positive = int(np.sum(np.linalg.eigvalsh(g_ij) > 0.0))
            self.assertEqual(positive, 1, y.tolist())

    def test_identities(self):
        scenario = s5()
        for x, y in draw_samples(scenario):
            for result in pseudo.pseudo_identities(scenario.fields, x, y):
                with self.subTest(identity=result.name, y=y.tolist()):
                    self.assertLessEqual(result.residual, DEFAULT_TOLERANCES[result.category], result.note)
