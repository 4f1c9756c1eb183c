import json
import os
import shutil
import tempfile

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from engine import fields as fields_mod
from engine.scenarios import draw_samples, s4
from engine.utils import ScenarioException
from schema.scenario import load_scenario, scenario_from_json


def bundled(name):
    return os.path.join(settings.FINSLEROID_SCENARIO_DIR, name)


class LoadScenarioTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, name, document):
        path = os.path.join(self.tmp, name)
        with open(path, 'w') as f:
            f.write(document if isinstance(document, str) else json.dumps(document))
        return path

    def test_bundled_scenarios_load(self):
        for name in ('S1', 'S2', 'S3', 'S23', 'S4', 'S5'):
            with self.subTest(scenario=name):
                scenario = load_scenario(bundled(name + '.json'))
                self.assertEqual(scenario.id, name)
                self.assertTrue(draw_samples(scenario))

    def test_flat_scenario(self):
        scenario = load_scenario(bundled('S1.json'))
        self.assertTrue(scenario.regularity_grid)
        self.assertEqual(len(scenario.samples), 2)
        self.assertEqual(scenario.random[0]['count'], 20)
        self.assertAlmostEqual(fields_mod.norm_c(scenario.fields, np.zeros(3)), 0.8)

    def test_file_matches_the_builtin_pullback(self):
        loaded = load_scenario(bundled('S4.json')).fields
        built = s4().fields
        for x in ([0.0, 0.0, 0.0], [0.5, -0.3, 0.2], [-0.9, 0.4, 0.7]):
            np.testing.assert_allclose(loaded.a.evaluate(np.array(x)), built.a.evaluate(np.array(x)), atol=1e-14)
            np.testing.assert_allclose(loaded.b.evaluate(np.array(x)), built.b.evaluate(np.array(x)), atol=1e-14)

    def test_id_defaults_to_the_file_name(self):
        with open(bundled('S1.json')) as f:
            document = json.load(f)
        del document['id']
        self.assertEqual(load_scenario(self.write('plain.json', document)).id, 'plain')

    def test_broken_scenario_loads_but_its_samples_fail(self):
        scenario = load_scenario(bundled('broken.json'))
        with self.assertRaises(ScenarioException) as raised:
            draw_samples(scenario)
        self.assertIn('samples', raised.exception.errors)

    def test_builtin_by_name(self):
        self.assertEqual(load_scenario('S23').id, 'S23')

    def test_missing_file(self):
        with self.assertRaises(ScenarioException):
            load_scenario(os.path.join(self.tmp, 'missing.json'))

    def test_invalid_json(self):
        with self.assertRaises(ScenarioException) as raised:
            load_scenario(self.write('bad.json', '{"dimension": 3,'))
        self.assertIn('__all__', raised.exception.errors)

    def test_schema_errors_name_the_file_key(self):
        with self.assertRaises(ScenarioException) as raised:
            scenario_from_json({'dimension': 3, 'fields': [], 'samples': [{'random': {'count': 1}}]})
        self.assertIn('fields', raised.exception.errors)

    def test_not_an_object(self):
        with self.assertRaises(ScenarioException):
            scenario_from_json([1, 2, 3])
