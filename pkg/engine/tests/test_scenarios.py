import dataclasses

import numpy as np
from django.test import SimpleTestCase

from engine import fields as fields_mod
from engine import scenarios
from engine.utils import ScenarioException


class BuiltinTests(SimpleTestCase):

    def test_every_builtin_draws_its_samples(self):
        for name in sorted(scenarios.BUILTIN):
            with self.subTest(scenario=name):
                scenario = scenarios.builtin(name)
                samples = scenarios.draw_samples(scenario)
                expected = len(scenario.samples) + sum(block['count'] for block in scenario.random)
                self.assertEqual(len(samples), expected)
                self.assertEqual(scenario.id, name)

    def test_names_are_case_insensitive(self):
        self.assertEqual(scenarios.builtin('s23').id, 'S23')

    def test_unknown_builtin(self):
        with self.assertRaises(ScenarioException):
            scenarios.builtin('S9')

    def test_pullback_keeps_b_parallel(self):
        fields = scenarios.s4().fields
        x = np.array([0.5, -0.3, 0.2])
        self.assertAlmostEqual(fields_mod.norm_c(fields, x), 0.8, places=12)
        self.assertFalse(fields.a.is_constant)

    def test_to_json(self):
        document = scenarios.s1().to_json()
        self.assertEqual(document['dimension'], 3)
        self.assertEqual(document['signature'], 'pd')
        self.assertEqual(len(document['samples']), 3)
        self.assertEqual(document['samples'][2]['random']['count'], 20)


class SampleDrawingTests(SimpleTestCase):

    def test_drawing_is_reproducible(self):
        first = scenarios.draw_samples(scenarios.s2())
        second = scenarios.draw_samples(scenarios.s2())
        for (x1, y1), (x2, y2) in zip(first, second):
            np.testing.assert_array_equal(x1, x2)
            np.testing.assert_array_equal(y1, y2)

    def test_seed_override(self):
        default = scenarios.draw_samples(scenarios.s1())
        overridden = scenarios.draw_samples(scenarios.s1(), seed=99)
        np.testing.assert_array_equal(default[0][1], overridden[0][1])
        self.assertFalse(np.array_equal(default[2][1], overridden[2][1]))

    def test_random_samples_stay_in_the_box(self):
        for x, y in scenarios.draw_samples(scenarios.s2())[1:]:
            self.assertTrue(np.all(np.abs(x) <= 1.5))
            self.assertTrue(np.all(np.abs(y) <= 1.0))

    def test_time_space_samples_are_admissible(self):
        scenario = scenarios.s5()
        for x, y in scenarios.draw_samples(scenario)[1:]:
            self.assertTrue(scenarios.admissible(scenario.fields, x, y))

    def test_explicit_time_space_sample_outside_the_domain(self):
        # S^2 < 0: y is space-like
        scenario = dataclasses.replace(scenarios.s5(), samples=[(np.zeros(4), np.array([0.2, 1.0, 0.0, 0.0]))],
                                       random=[])
        with self.assertRaises(ScenarioException) as raised:
            scenarios.draw_samples(scenario)
        self.assertIn('admissible domain', str(raised.exception))

    def test_norm_violation(self):
        fields = fields_mod.constant_fields(np.eye(3), [1.2, 0.0, 0.0], 0.5)
        scenario = scenarios.Scenario('broken', fields, [(np.zeros(3), np.ones(3))])
        with self.assertRaises(ScenarioException) as raised:
            scenarios.draw_samples(scenario)
        self.assertIn('samples', raised.exception.errors)
        self.assertIn('sample 0', str(raised.exception))

    def test_random_block_leaving_the_constraints(self):
        # b_0 = 0.7 + 0.05 x1^2 passes 1 for |x1| > 2.45
        scenario = dataclasses.replace(scenarios.s2(), samples=[],
                                       random=[{'count': 50, 'seed': 1, 'x_box': [-3.0, 3.0], 'y_box': [-1.0, 1.0]}])
        with self.assertRaises(ScenarioException):
            scenarios.draw_samples(scenario)

    def test_check_sample(self):
        self.assertIsNone(scenarios.check_sample(scenarios.s1().fields, 0, np.zeros(3)))
        charged = fields_mod.constant_fields(np.eye(3), [0.5, 0.0, 0.0], 2.5)
        self.assertIn('charge', scenarios.check_sample(charged, 3, np.zeros(3)))

    def test_time_space_norm_above_one_only_warns(self):
        fields = fields_mod.constant_fields(np.diag([1.0, -1.0, -1.0]), [1.5, 0.0, 0.0], 0.5,
                                            signature='sr')
        with self.assertLogs('finsleroid', level='WARNING'):
            self.assertIsNone(scenarios.check_sample(fields, 0, np.zeros(3)))


class FieldsFromJsonTests(SimpleTestCase):

    def test_polynomial_field(self):
        field = scenarios.field_from_json(
            {'kind': 'polynomial', 'terms': [{'coeff': 0.5, 'powers': [0, 0, 0]},
                                             {'coeff': 0.1, 'powers': [1, 0, 0]}]}, (), 3)
        self.assertAlmostEqual(float(field.evaluate(np.array([2.0, 0.0, 0.0]))), 0.7)

    def test_bad_descriptions(self):
        bad = [
            {'kind': 'constant', 'value': [1.0, 2.0]},
            {'kind': 'polynomial', 'terms': []},
            {'kind': 'polynomial', 'terms': [{'coeff': 1.0, 'powers': [0, 0]}]},
            {'kind': 'spline'},
        ]
        for description in bad:
            with self.subTest(description=description), self.assertRaises(ValueError):
                scenarios.field_from_json(description, (), 3)

    def test_missing_field(self):
        with self.assertRaises(ValueError):
            scenarios.fields_from_json(3, 'pd', {'a': {'kind': 'constant', 'value': np.eye(3).tolist()}})
