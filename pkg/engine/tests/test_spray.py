import numpy as np
from django.test import SimpleTestCase

from engine import fields as fields_mod
from engine import spray
from engine.constants import DEFAULT_TOLERANCES
from engine.kernel import finsler_norm
from engine.scenarios import draw_samples, s1, s2, s3
from engine.tensors import evaluate_point
from engine.utils import ScenarioException

ORIGIN = np.zeros(3)
ONES = np.ones(3)


class SprayDecompositionTests(SimpleTestCase):

    def test_flat_space_has_no_spray(self):
        data = spray.spray_closed_form(s1().fields, ORIGIN, ONES)
        np.testing.assert_array_equal(data.G, np.zeros(3))
        self.assertIsNone(data.M)
        self.assertEqual(data.yg, 0.0)

    def test_varying_b(self):
        fields = s2().fields
        x = np.array([0.0, 1.0, 0.0])
        data = spray.spray_closed_form(fields, x, ONES)
        np.testing.assert_array_equal(data.charge, np.zeros(3))
        np.testing.assert_array_equal(data.riemann, np.zeros(3))
        self.assertGreater(np.abs(data.drift).max(), 0.0)
        self.assertGreater(np.abs(data.torsion).max(), 0.0)
        np.testing.assert_allclose(data.G, data.drift + data.torsion)
        error = spray.spray_relative_error(data.G, spray.spray_oracle(fields, x, ONES), data.K)
        self.assertLessEqual(error, DEFAULT_TOLERANCES['spray_oracle'])

    def test_varying_charge(self):
        fields = s3().fields
        data = spray.spray_closed_form(fields, ORIGIN, ONES)
        np.testing.assert_array_equal(data.drift, np.zeros(3))
        np.testing.assert_array_equal(data.torsion, np.zeros(3))
        self.assertAlmostEqual(data.yg, 0.1)
        self.assertIsNotNone(data.M)
        error = spray.spray_relative_error(data.G, spray.spray_oracle(fields, ORIGIN, ONES), data.K)
        self.assertLessEqual(error, DEFAULT_TOLERANCES['spray_oracle'])

    def test_quadratic_in_y(self):
        fields = s3().fields
        data = spray.spray_closed_form(fields, ORIGIN, ONES, spray.CHARGE_ANALYTIC)
        scaled = spray.spray_closed_form(fields, ORIGIN, 2.5 * ONES, spray.CHARGE_ANALYTIC)
        np.testing.assert_allclose(scaled.G, 6.25 * data.G, rtol=1e-10)

    def test_json(self):
        document = spray.spray_closed_form(s3().fields, ORIGIN, ONES).to_json()
        self.assertEqual(set(document), {'G', 'drift', 'torsion', 'E', 'riemann', 'M', 'yg', 'K'})


class ChargeResponseTests(SimpleTestCase):

    def test_analytic_against_numeric(self):
        fields = s1().fields
        for y in (ONES, np.array([-0.8, 0.3, 0.1]), np.array([0.05, -1.0, 0.4])):
            numeric = spray.charge_response_M(fields, ORIGIN, y, spray.CHARGE_NUMERIC)
            analytic = spray.charge_response_M(fields, ORIGIN, y, spray.CHARGE_ANALYTIC)
            self.assertAlmostEqual(analytic, numeric, delta=DEFAULT_TOLERANCES['charge_response'] * abs(numeric))

    def test_unknown_method(self):
        with self.assertRaises(ValueError):
            spray.charge_response_M(s1().fields, ORIGIN, ONES, 'symbolic')

    def test_middle_forms_agree(self):
        safe, literal = spray.charge_middle_forms(evaluate_point(s3().fields, ORIGIN, ONES), yg=0.1)
        np.testing.assert_allclose(literal, safe, rtol=1e-10)

    def test_e_coefficient_forms(self):
        fields = s3().fields
        safe = spray.e_coefficients(fields, ORIGIN, ONES, form='safe')
        literal = spray.e_coefficients(fields, ORIGIN, ONES, form='literal')
        np.testing.assert_allclose(literal, safe, rtol=1e-9)
        with self.assertRaises(ValueError):
            spray.e_coefficients(fields, ORIGIN, ONES, form='other')

    def test_constant_charge_has_no_e_terms(self):
        np.testing.assert_array_equal(spray.e_coefficients(s1().fields, ORIGIN, ONES), np.zeros(3))


class BerwaldTests(SimpleTestCase):

    def test_flat_space_is_berwald(self):
        scenario = s1()
        verdict = spray.berwald_check(scenario.fields, draw_samples(scenario)[:10])
        self.assertEqual(verdict.verdict, spray.PASS)
        self.assertTrue(verdict.criterion)
        self.assertEqual(len(verdict.residuals), 10)

    def test_varying_b_is_not_berwald(self):
        scenario = s2()
        verdict = spray.berwald_check(scenario.fields, draw_samples(scenario)[:10])
        self.assertEqual(verdict.verdict, spray.FAIL_WITH_WITNESS)
        self.assertFalse(verdict.parallel)
        self.assertTrue(verdict.charge_constant)
        self.assertGreater(verdict.residual, DEFAULT_TOLERANCES['berwald_witness'])

    def test_needs_ten_samples(self):
        scenario = s1()
        with self.assertRaises(ScenarioException):
            spray.berwald_check(scenario.fields, draw_samples(scenario)[:9])


class IndicatrixTests(SimpleTestCase):

    def test_radius_lies_on_the_indicatrix(self):
        fields = s1().fields
        for direction in (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), ONES):
            radius = spray.indicatrix_radius(fields, ORIGIN, direction)
            self.assertAlmostEqual(finsler_norm(fields, ORIGIN, radius * direction), 1.0, places=12)

    def test_riemannian_indicatrix_is_the_unit_sphere(self):
        fields = fields_mod.constant_fields(np.eye(3), [0.8, 0.0, 0.0], 0.0)
        self.assertAlmostEqual(spray.indicatrix_radius(fields, ORIGIN, [0.0, 2.0, 0.0]), 0.5)


class RegularityTests(SimpleTestCase):

    def test_grid_is_regular(self):
        cells = spray.regularity_grid([-1.5, 0.0, 1.5], [0.2, 0.9], samples=5)
        self.assertEqual([(cell.g, cell.c) for cell in cells],
                         [(-1.5, 0.2), (-1.5, 0.9), (0.0, 0.2), (0.0, 0.9), (1.5, 0.2), (1.5, 0.9)])
        for cell in cells:
            self.assertTrue(cell.regular)
            self.assertLessEqual(cell.det_residual, DEFAULT_TOLERANCES['determinant'])
