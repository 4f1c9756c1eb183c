import copy

from django.test import SimpleTestCase

from schema.forms import ScenarioForm

IDENTITY = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

VALID = {
    'id': 'flat',
    'dimension': 3,
    'background': {
        'a': {'kind': 'constant', 'value': IDENTITY},
        'b': {'kind': 'constant', 'value': [0.8, 0, 0]},
        'g': {'kind': 'constant', 'value': 0.5},
    },
    'samples': [
        {'x': [0, 0, 0], 'y': [1, 1, 1]},
        {'random': {'count': 5, 'seed': 2}},
    ],
    'tolerances': {'algebraic': 1e-8},
}


def with_changes(**changes):
    data = copy.deepcopy(VALID)
    data.update(changes)
    return data


class ScenarioFormTests(SimpleTestCase):

    def test_valid(self):
        form = ScenarioForm(data=VALID)
        self.assertTrue(form.is_valid(), form.errors)
        cleaned = form.cleaned_data
        self.assertEqual(cleaned['signature'], 'pd')
        self.assertEqual(cleaned['space'].dimension, 3)
        self.assertEqual(cleaned['samples']['pairs'], [([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])])
        self.assertEqual(cleaned['samples']['random'],
                         [{'count': 5, 'seed': 2, 'x_box': [-1.0, 1.0], 'y_box': [-1.0, 1.0]}])
        self.assertEqual(cleaned['tolerances'], {'algebraic': 1e-8})
        self.assertFalse(cleaned['regularity_grid'])

    def test_lone_random_block(self):
        form = ScenarioForm(data=with_changes(samples={'random': {'count': 3}}))
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['samples']['random'][0]['seed'], 0)

    def test_rejected(self):
        cases = {
            'dimension': with_changes(dimension=1),
            'signature': with_changes(signature='lorentz'),
            'background': with_changes(background={'a': VALID['background']['a']}),
            'samples': with_changes(samples=[{'x': [0, 0], 'y': [1, 1]}]),
            'tolerances': with_changes(tolerances={'algebriac': 1e-8}),
        }
        cases['zero_y'] = with_changes(samples=[{'x': [0, 0, 0], 'y': [0, 0, 0]}])
        cases['bad_box'] = with_changes(samples=[{'random': {'count': 2, 'x_box': [1, -1]}}])
        cases['bad_count'] = with_changes(samples=[{'random': {'count': 0}}])
        cases['negative_tolerance'] = with_changes(tolerances={'hessian': -1.0})
        cases['unknown_field'] = with_changes(background=dict(VALID['background'], c={'kind': 'constant'}))
        cases['bad_polynomial'] = with_changes(background=dict(
            VALID['background'], g={'kind': 'polynomial', 'terms': [{'coeff': 0.5, 'powers': [0, 0]}]}))
        for name, data in cases.items():
            with self.subTest(case=name):
                self.assertFalse(ScenarioForm(data=data).is_valid())

    def test_errors_land_on_the_field(self):
        form = ScenarioForm(data=with_changes(tolerances={'algebriac': 1e-8}))
        self.assertFalse(form.is_valid())
        self.assertIn('tolerances', form.errors)
        self.assertIn('algebriac', form.errors['tolerances'][0])
