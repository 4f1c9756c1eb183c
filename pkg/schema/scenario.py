import json
import logging
import os
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

from engine.scenarios import Scenario, builtin
from engine.utils import ScenarioException
from schema.forms import ScenarioForm

logger = logging.getLogger('finsleroid')  # type: logging.Logger


def scenario_from_json(data, default_id='scenario'):
    # type: (t.Any, str) -> Scenario
    """Validate a decoded scenario file and build the Scenario

    Args:
        data (t.Any): the decoded JSON document
        default_id (str): id used when the document has none

    Raises:
        ScenarioException: the document does not pass ScenarioForm; the form
            errors ride on the exception

    Returns:
        Scenario: the scenario, samples not drawn yet
    """
    if not isinstance(data, dict):
        raise ScenarioException('a scenario file must hold a JSON object', errors={'__all__': ['not an object']})
    form_data = dict(data)
    if 'fields' in form_data:
        form_data['background'] = form_data.pop('fields')
    form = ScenarioForm(data=form_data)
    if not form.is_valid():
        errors = {('fields' if key == 'background' else key): [str(message) for message in messages]
                  for key, messages in form.errors.items()}
        summary = '; '.join('%s: %s' % (key, ' '.join(messages)) for key, messages in sorted(errors.items()))
        logger.error('scenario %s is not valid: %s', data.get('id', default_id), summary)
        raise ScenarioException('scenario is not valid: %s' % summary, errors=errors)
    cleaned = form.cleaned_data
    samples = cleaned['samples']
    return Scenario(
        id=cleaned['id'] or default_id,
        fields=cleaned['space'],
        samples=[(np.array(x), np.array(y)) for x, y in samples['pairs']],
        random=samples['random'],
        tolerances=cleaned['tolerances'],
        regularity_grid=cleaned['regularity_grid'],
        description=cleaned['description'])


def load_scenario(path):
    # type: (str) -> Scenario
    """Read a scenario file, or a built-in scenario by name

    A path that is not a file but names a built-in (S1, S2, S3, S23, S4,
    S5) gives that scenario.

    Raises:
        ScenarioException: unreadable file, invalid JSON or schema errors
    """
    if not os.path.isfile(path):
        stem = os.path.splitext(os.path.basename(path))[0]
        if not os.path.exists(path) and path == stem:
            return builtin(stem)
        raise ScenarioException('scenario file %s does not exist' % path, errors={'__all__': ['missing file']})
    default_id = os.path.splitext(os.path.basename(path))[0]
    try:
        with open(path) as f:
            data = json.load(f)
    except ValueError as e:
        raise ScenarioException('scenario file %s is not valid JSON: %s' % (path, e),
                                errors={'__all__': [str(e)]})
    except (IOError, OSError) as e:
        raise ScenarioException('scenario file %s could not be read: %s' % (path, e),
                                errors={'__all__': [str(e)]})
    return scenario_from_json(data, default_id)
