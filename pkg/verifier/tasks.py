import csv
import io
import logging
import os
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np
from django.conf import settings

from engine import fields as fields_mod
from engine import oracle
from engine.battery import parse_overrides, resolve_tolerances, run_battery
from engine.geodesic import geodesic_integrate
from engine.scenarios import Scenario, draw_samples  # noqa: F401 ignore unused we use it for typing
from engine.spray import (
    CHARGE_NUMERIC, indicatrix_radius, spray_closed_form, spray_oracle,
    spray_relative_error)
from engine.utils import (
    FinsleroidException, LeftAdmissibleDomainException, ScenarioException,
    WrongSignatureException, as_vector)
from schema.report import Report, load_report
from schema.scenario import load_scenario

logger = logging.getLogger('finsleroid')  # type: logging.Logger

REPORT_FORMATS = ('table', 'csv', 'json')


def configure_oracle():
    # type: () -> t.Dict[str, t.Any]
    return oracle.configure(**getattr(settings, 'FINSLEROID_ORACLE', {}))


def find_scenario(name):
    # type: (str) -> Scenario
    """Load a scenario by path, by bundled file name or by built-in name
    """
    if not os.path.exists(name):
        bundled = os.path.join(settings.FINSLEROID_SCENARIO_DIR, name)
        for candidate in (bundled, bundled + '.json'):
            if os.path.isfile(candidate):
                logger.debug('scenario %s found at %s', name, candidate)
                return load_scenario(candidate)
    return load_scenario(name)


def prepare(name, seed=None, overrides=None):
    # type: (str, t.Optional[int], t.Optional[t.Iterable[str]]) -> t.Tuple[Scenario, t.List[t.Tuple[np.ndarray, np.ndarray]], t.Dict[str, t.Any], t.Optional[int]]
    """Load a scenario, draw its samples and resolve the tolerances

    Raises:
        ScenarioException: invalid scenario, samples or overrides

    Returns:
        t.Tuple: the scenario, its samples, the tolerances and the seed in force
    """
    configure_oracle()
    scenario = find_scenario(name)
    if seed is None:
        seed = settings.FINSLEROID_SEED
    tolerances = resolve_tolerances(settings.FINSLEROID_TOLERANCES, scenario.tolerances, parse_overrides(overrides))
    samples = draw_samples(scenario, seed)
    return scenario, samples, tolerances, seed


def run_check(name, seed=None, overrides=None, jobs=1, timestamp=True, out=None, csv_path=None,
              method=CHARGE_NUMERIC):
    # type: (str, t.Optional[int], t.Optional[t.Iterable[str]], int, bool, t.Optional[str], t.Optional[str], str) -> Report
    """Run every check suite of a scenario and write the report

    Args:
        name (str): scenario path or name
        seed (int): replaces the scenario seeds
        overrides (t.Iterable[str]): key=value tolerance overrides
        jobs (int): worker threads for the per-sample suites
        timestamp (bool): stamp the report with the current time
        out (str): JSON report path
        csv_path (str): CSV report path

    Raises:
        ScenarioException: invalid scenario

    Returns:
        Report: the report, failures included
    """
    scenario, samples, tolerances, seed = prepare(name, seed, overrides)
    logger.info('checking scenario %s on %d samples', scenario.id, len(samples))
    checks = run_battery(scenario, samples, tolerances, jobs=jobs, method=method)
    report = Report(scenario=scenario.id, seed=seed, checks=checks)
    if timestamp:
        report.stamp()
    if out:
        with open(out, 'w') as f:
            f.write(report.dumps())
    if csv_path:
        with open(csv_path, 'w') as f:
            f.write(report.to_csv())
    summary = report.summary
    logger.info('scenario %s: %d of %d checks passed', scenario.id, summary['passed'], summary['total'])
    return report


def _orthogonal(a, b_up):
    # type: (np.ndarray, np.ndarray) -> np.ndarray
    """A direction a-orthogonal to b^i"""
    basis = np.eye(a.shape[0])
    start = basis[int(np.argmin(np.abs(b_up)))]
    return start - (start.dot(a).dot(b_up) / b_up.dot(a).dot(b_up)) * b_up


def run_spray(name, x=None, y=None, seed=None, method=CHARGE_NUMERIC):
    # type: (str, t.Optional[t.Sequence[float]], t.Optional[t.Sequence[float]], t.Optional[int], str) -> str
    """Spray decomposition of a scenario at one sample, as printable text

    The first sample of the scenario is used for a missing x or y.

    Raises:
        ScenarioException: invalid scenario or sample
        WrongSignatureException: the scenario is time-space
    """
    configure_oracle()
    scenario = find_scenario(name)
    fields = scenario.fields
    if not fields.positive_definite:
        raise WrongSignatureException('spray coefficients are only defined for positive-definite scenarios')
    if x is None or y is None:
        first_x, first_y = draw_samples(scenario, seed)[0]
        x = first_x if x is None else x
        y = first_y if y is None else y
    try:
        x = as_vector(x, fields.dimension)
        y = as_vector(y, fields.dimension)
    except ValueError as e:
        raise ScenarioException(str(e), errors={'samples': [str(e)]})
    data = spray_closed_form(fields, x, y, method)
    lines = [
        'scenario %s' % scenario.id,
        'x        %s' % _vector(x),
        'y        %s' % _vector(y),
        'K        %.12g' % data.K,
        'drift    %s' % _vector(data.drift),
        'torsion  %s' % _vector(data.torsion),
        'E        %s' % _vector(data.charge),
        'riemann  %s' % _vector(data.riemann),
        'G        %s' % _vector(data.G),
    ]
    if data.M is not None:
        lines.append('M        %.12g' % data.M)
    try:
        reference = spray_oracle(fields, x, y)
    except FinsleroidException as e:
        logger.warning('spray oracle unavailable at x = %s: %s', x, e)
        lines.append('oracle   unavailable: %s' % e)
    else:
        lines.append('oracle   %s' % _vector(reference))
        lines.append('rel err  %.3e' % spray_relative_error(data.G, reference, data.K))
    a, a_inv, _ = fields_mod.metric_at(fields, x)
    b_up = a_inv.dot(fields.b.evaluate(x))
    lines.append('radius along b          %.12g' % indicatrix_radius(fields, x, b_up))
    lines.append('radius orthogonal to b  %.12g' % indicatrix_radius(fields, x, _orthogonal(a, b_up)))
    return '\n'.join(lines) + '\n'


def _vector(value):
    # type: (np.ndarray) -> str
    return '[' + ', '.join('%.12g' % item for item in value) + ']'


def trajectory_csv(trajectory):
    # type: (t.Any) -> str
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(trajectory.header())
    for row in trajectory.rows():
        writer.writerow([repr(float(value)) for value in row])
    return out.getvalue()


def run_geodesic(name, x0, y0, t_end=1.0, step=1e-3, out=None, overrides=None, method=CHARGE_NUMERIC):
    # type: (str, t.Sequence[float], t.Sequence[float], float, float, t.Optional[str], t.Optional[t.Iterable[str]], str) -> t.Tuple[t.Any, str, float]
    """Integrate a geodesic of a scenario and write the trajectory as CSV

    A geodesic which leaves the admissible domain still has its partial
    trajectory written before the error propagates.

    Raises:
        LeftAdmissibleDomainException: the path left the admissible domain
        ScenarioException: invalid scenario or initial data

    Returns:
        t.Tuple: the trajectory, its CSV text and the drift tolerance
    """
    configure_oracle()
    scenario = find_scenario(name)
    tolerances = resolve_tolerances(settings.FINSLEROID_TOLERANCES, scenario.tolerances, parse_overrides(overrides))
    fields = scenario.fields
    if not fields.positive_definite:
        raise WrongSignatureException('geodesics are only integrated for positive-definite scenarios')
    try:
        x0 = as_vector(x0, fields.dimension)
        y0 = as_vector(y0, fields.dimension)
    except ValueError as e:
        raise ScenarioException(str(e), errors={'samples': [str(e)]})
    try:
        trajectory = geodesic_integrate(fields, x0, y0, t_end, step, method)
    except LeftAdmissibleDomainException as e:
        if e.trajectory is not None and out:
            with open(out, 'w') as f:
                f.write(trajectory_csv(e.trajectory))
        raise
    text = trajectory_csv(trajectory)
    if out:
        with open(out, 'w') as f:
            f.write(text)
    logger.info('geodesic of %s: %d states, K drift %.3g', scenario.id, len(trajectory.states), trajectory.drift)
    return trajectory, text, tolerances['geodesic_drift'].value


def run_report(path, fmt='table'):
    # type: (str, str) -> t.Tuple[Report, str]
    """Render a stored JSON report

    Raises:
        MalformedReportException: the file is not a report
    """
    if fmt not in REPORT_FORMATS:
        raise ValueError('format must be one of %s' % ', '.join(REPORT_FORMATS))
    report = load_report(path)
    if fmt == 'csv':
        return report, report.to_csv()
    if fmt == 'json':
        return report, report.dumps()
    return report, report.to_table()
