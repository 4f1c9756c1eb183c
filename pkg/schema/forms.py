"""
Forms validating scenario files.

A scenario file is a JSON object; ``ScenarioForm`` receives it as form
data, checks every top-level key with a form field and the nested
structure in its ``clean_*`` methods. ``cleaned_data['space']`` carries the
assembled ``FieldSet`` once the form is valid.

"""
import numbers

from django import forms

from engine.constants import (
    DEFAULT_TOLERANCES, SIGNATURE_POSITIVE_DEFINITE, SIGNATURES, msg_code)
from engine.scenarios import fields_from_json

SAMPLE_KEYS = ('x', 'y')
RANDOM_KEYS = ('count', 'seed', 'x_box', 'y_box')


def _number_list(value, length, what):
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise forms.ValidationError('%s must be a list of %d numbers' % (what, length))
    if not all(isinstance(item, numbers.Real) and not isinstance(item, bool) for item in value):
        raise forms.ValidationError('%s must be a list of %d numbers' % (what, length))
    return [float(item) for item in value]


def _random_block(block):
    if not isinstance(block, dict):
        raise forms.ValidationError('a random block must be an object')
    unknown = sorted(set(block) - set(RANDOM_KEYS))
    if unknown:
        raise forms.ValidationError('unknown random block keys: %s' % ', '.join(unknown))
    count = block.get('count')
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise forms.ValidationError('random count must be a positive integer')
    seed = block.get('seed', 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise forms.ValidationError('random seed must be a non-negative integer')
    cleaned = {'count': count, 'seed': seed}
    for key in ('x_box', 'y_box'):
        lo, hi = _number_list(block.get(key, [-1.0, 1.0]), 2, key)
        if not lo < hi:
            raise forms.ValidationError('%s must read [lo, hi] with lo < hi' % key)
        cleaned[key] = [lo, hi]
    return cleaned


class ScenarioForm(forms.Form):
    """
    Form for one scenario file.

    ``samples`` holds a list whose items are either an explicit sample
    ``{"x": [...], "y": [...]}`` or ``{"random": {"count", "seed", "x_box",
    "y_box"}}``; a lone random object is accepted as well.

    """
    id = forms.CharField(required=False, max_length=64)
    description = forms.CharField(required=False)
    dimension = forms.IntegerField(min_value=2)
    signature = forms.ChoiceField(choices=[(key, label) for key, label in sorted(SIGNATURES.items())],
                                  required=False)
    # the "fields" key of the file, renamed off Form.fields
    background = forms.JSONField()
    samples = forms.JSONField()
    tolerances = forms.JSONField(required=False)
    regularity_grid = forms.BooleanField(required=False)

    def clean_signature(self):
        return self.cleaned_data.get('signature') or SIGNATURE_POSITIVE_DEFINITE

    def clean_background(self):
        value = self.cleaned_data['background']
        if not isinstance(value, dict):
            raise forms.ValidationError('fields must be an object with keys a, b and g')
        unknown = sorted(set(value) - {'a', 'b', 'g'})
        if unknown:
            raise forms.ValidationError('unknown fields: %s' % ', '.join(unknown))
        for name in ('a', 'b', 'g'):
            if not isinstance(value.get(name), dict):
                raise forms.ValidationError('field %s must be an object with a kind' % name)
        return value

    def clean_samples(self):
        value = self.cleaned_data['samples']
        if isinstance(value, dict):
            value = [value]
        if not isinstance(value, list):
            raise forms.ValidationError('samples must be a list')
        explicit, random = [], []
        for item in value:
            if not isinstance(item, dict):
                raise forms.ValidationError('every sample must be an object')
            if 'random' in item:
                if len(item) != 1:
                    raise forms.ValidationError('a random sample entry takes no other keys')
                random.append(_random_block(item['random']))
            elif set(item) == set(SAMPLE_KEYS):
                explicit.append(item)
            else:
                raise forms.ValidationError('a sample reads {"x": [...], "y": [...]} or {"random": {...}}')
        if not explicit and not random:
            raise forms.ValidationError('a scenario needs at least one sample')
        return {'explicit': explicit, 'random': random}

    def clean_tolerances(self):
        value = self.cleaned_data.get('tolerances') or {}
        if not isinstance(value, dict):
            raise forms.ValidationError('tolerances must be an object')
        cleaned = {}
        for key, tolerance in value.items():
            if key not in DEFAULT_TOLERANCES:
                raise forms.ValidationError(msg_code['UNKNOWN_TOLERANCE'] % key)
            if not isinstance(tolerance, numbers.Real) or isinstance(tolerance, bool) or not tolerance > 0:
                raise forms.ValidationError('tolerance %s must be a positive number' % key)
            cleaned[key] = float(tolerance)
        return cleaned

    def clean(self):
        """
        Build the background fields and check the explicit samples have
        the scenario dimension. Errors here land on the field they concern.

        """
        cleaned_data = super(ScenarioForm, self).clean()
        dimension = cleaned_data.get('dimension')
        signature = cleaned_data.get('signature')
        if dimension is None or signature is None:
            return cleaned_data
        if 'background' in cleaned_data:
            try:
                cleaned_data['space'] = fields_from_json(dimension, signature, cleaned_data['background'])
            except (TypeError, ValueError) as e:
                self.add_error('background', str(e))
        samples = cleaned_data.get('samples')
        if samples is not None:
            pairs = []
            for index, item in enumerate(samples['explicit']):
                try:
                    pairs.append((_number_list(item['x'], dimension, 'sample %d x' % index),
                                  _number_list(item['y'], dimension, 'sample %d y' % index)))
                except forms.ValidationError as e:
                    self.add_error('samples', e)
                    break
                if not any(pairs[-1][1]):
                    self.add_error('samples', 'sample %d: y = 0 is excluded' % index)
                    break
            samples['pairs'] = pairs
        return cleaned_data
