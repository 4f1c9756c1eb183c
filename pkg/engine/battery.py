"""Check suites run by the verifier.

Every suite turns residuals into CheckRecords: one record per check name,
carrying the worst sample, the tolerance applied and where that tolerance
came from.
"""
import dataclasses
import logging
import math
import typing as t  # noqa: F401 ignore unused we use it for typing
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from engine import fields as fields_mod
from engine.constants import (
    DEFAULT_TOLERANCES, HOMOGENEITY_FACTORS, LITERAL_CHARGE, Z_FORM_PLANE,
    msg_code)
from engine.kernel import angle, charge_combinations, eval_kernel
from engine.pseudo import pseudo_identities
from engine.spray import (
    CHARGE_ANALYTIC, CHARGE_NUMERIC, PASS, berwald_check, charge_middle_forms,
    charge_response_M, regularity_grid, spray_closed_form, spray_oracle,
    spray_relative_error)
from engine.tensors import IdentityResult, evaluate_point, identity_battery
from engine.utils import (
    FinsleroidException, ScenarioException, relative_residual, sup_norm)

logger = logging.getLogger('finsleroid')  # type: logging.Logger
check_logger = logging.getLogger('finsleroid.check')  # type: logging.Logger

SOURCE_DEFAULT = 'default'
SOURCE_SETTINGS = 'settings'
SOURCE_SCENARIO = 'scenario'
SOURCE_OVERRIDE = 'override'

REGULARITY_CHARGES = tuple(round(-1.9 + 0.475 * i, 4) for i in range(9))
REGULARITY_NORMS = tuple(round(0.1 * i, 4) for i in range(1, 10))
REGULARITY_SAMPLES = 20

# half width around b = 0 for the continuity of the angle branches
_BRANCH_EPSILON = 1e-8


@dataclasses.dataclass(frozen=True)
class Tolerance(object):
    value: float
    source: str


@dataclasses.dataclass(frozen=True)
class CheckRecord(object):
    """Outcome of one check over every sample of a scenario

    sample is the index of the worst sample, None for checks on the whole
    scenario.
    """
    name: str
    reference: str
    sample: t.Optional[int]
    residual: float
    tolerance: float
    tolerance_key: str
    tolerance_source: str
    passed: bool
    note: str = ''

    def to_json(self):
        # type: () -> t.Dict[str, t.Any]
        residual = self.residual if math.isfinite(self.residual) else str(self.residual)
        return {
            'name': self.name,
            'reference': self.reference,
            'sample': self.sample,
            'residual': residual,
            'tolerance': self.tolerance,
            'tolerance_key': self.tolerance_key,
            'tolerance_source': self.tolerance_source,
            'passed': self.passed,
            'note': self.note,
        }


def parse_overrides(items):
    # type: (t.Optional[t.Iterable[str]]) -> t.Dict[str, float]
    """Parse repeated key=value tolerance overrides

    Raises:
        ScenarioException: an item is not key=value with a float value
    """
    overrides = {}
    for item in items or ():
        key, sep, value = item.partition('=')
        try:
            if not sep or not key.strip():
                raise ValueError(item)
            overrides[key.strip()] = float(value)
        except ValueError:
            raise ScenarioException(msg_code['BAD_OVERRIDE'] % item)
    return overrides


def resolve_tolerances(settings_tolerances=None, scenario_tolerances=None, overrides=None):
    # type: (t.Optional[t.Dict[str, float]], t.Optional[t.Dict[str, float]], t.Optional[t.Dict[str, float]]) -> t.Dict[str, Tolerance]
    """Merge the tolerance layers, later layers winning

    defaults, then the settings module, then the scenario, then the
    command-line overrides.

    Raises:
        ScenarioException: a layer names a key without a default
    """
    resolved = {key: Tolerance(value, SOURCE_DEFAULT) for key, value in DEFAULT_TOLERANCES.items()}
    for source, layer in ((SOURCE_SETTINGS, settings_tolerances), (SOURCE_SCENARIO, scenario_tolerances),
                          (SOURCE_OVERRIDE, overrides)):
        for key, value in (layer or {}).items():
            if key not in DEFAULT_TOLERANCES:
                raise ScenarioException(msg_code['UNKNOWN_TOLERANCE'] % key, errors={'tolerances': [key]})
            if value == DEFAULT_TOLERANCES[key] and source == SOURCE_SETTINGS:
                continue
            resolved[key] = Tolerance(float(value), source)
    return resolved


def _guarded(results, name, reference, category, func):
    # type: (t.List[IdentityResult], str, str, str, t.Callable[[], float]) -> None
    try:
        residual = func()
    except FinsleroidException as e:
        logger.warning('check %s could not be evaluated: %s', name, e)
        results.append(IdentityResult(name, reference, category, float('inf'), str(e)))
    else:
        results.append(IdentityResult(name, reference, category, residual))


def kernel_checks(fields, x, y):
    # type: (fields_mod.FieldSet, np.ndarray, np.ndarray) -> t.List[IdentityResult]
    """Invariants of the kernel scalars at one sample

    Returns:
        t.List[IdentityResult]: one result per invariant
    """
    k = eval_kernel(fields, x, y)
    results = []  # type: t.List[IdentityResult]

    def holds(name, reference, condition):
        results.append(IdentityResult(name, reference, 'algebraic', 0.0 if condition else 1.0))

    bound = k.q * k.q - (1.0 - k.c2) / k.c2 * k.b * k.b
    results.append(IdentityResult('norm_bound', 'q^2 >= ((1-c^2)/c^2) b^2', 'algebraic',
                                  max(0.0, -bound) / k.S2))
    holds('characteristic_positive', 'B > 0', k.B > 0.0)
    holds('nu_positive', 'nu > 0', k.nu > 0.0)
    holds('eta_positive', 'eta > 0', k.eta > 0.0)
    a_inv = fields_mod.metric_at(fields, x)[1]
    axis = a_inv.dot(fields.b.evaluate(x))
    on_axis = eval_kernel(fields, x, axis)
    results.append(IdentityResult('eta_axis', 'eta B = c^2 at y = b^i', 'algebraic',
                                  relative_residual(on_axis.eta * on_axis.B, on_axis.c2)))
    h, G, _, _ = charge_combinations(k.g)
    plus = angle(_BRANCH_EPSILON, 1.0 + 0.5 * k.g * _BRANCH_EPSILON, h, G)
    minus = angle(-_BRANCH_EPSILON, 1.0 - 0.5 * k.g * _BRANCH_EPSILON, h, G)
    results.append(IdentityResult('angle_branches', 'f continuous across b = 0', 'derivative', abs(plus - minus)))
    point = evaluate_point(fields, x, y)
    for factor in HOMOGENEITY_FACTORS:
        scaled = evaluate_point(fields, x, factor * y)
        results.append(IdentityResult('norm_homogeneity', 'K(x, l y) = l K(x, y)', 'homogeneity',
                                      relative_residual(scaled.kernel.K, factor * k.K)))
        results.append(IdentityResult('metric_homogeneity', 'g_ij(x, l y) = g_ij(x, y)', 'homogeneity',
                                      relative_residual(scaled.bundle.metric, point.bundle.metric)))
    riemann = evaluate_point(fields.with_charge(0.0), x, y)
    results.append(IdentityResult('riemann_norm', 'K = S and B = S^2 at g = 0', 'riemann_norm',
                                  max(relative_residual(riemann.kernel.K, k.S),
                                      relative_residual(riemann.kernel.B, k.S2))))
    results.append(IdentityResult('riemann_metric', 'g_ij = a_ij at g = 0', 'reduction',
                                  relative_residual(riemann.bundle.metric, riemann.aux.a)))
    return results


def tensor_checks(fields, x, y):
    # type: (fields_mod.FieldSet, np.ndarray, np.ndarray) -> t.List[IdentityResult]
    point = evaluate_point(fields, x, y)
    return identity_battery(point.kernel, point.aux, point.bundle, point.cartan, fields)


def spray_checks(fields, x, y, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, np.ndarray, np.ndarray, str) -> t.List[IdentityResult]
    """Closed-form spray against its oracle and its structural properties
    """
    results = []  # type: t.List[IdentityResult]
    closed = spray_closed_form(fields, x, y, method)

    def oracle_error():
        return spray_relative_error(closed.G, spray_oracle(fields, x, y), closed.K)

    _guarded(results, 'spray_oracle', 'G^i closed form = g^ij gamma_j,nm y^n y^m', 'spray_oracle', oracle_error)
    # analytic M keeps the comparison free of difference noise
    exact = spray_closed_form(fields, x, y, CHARGE_ANALYTIC)
    for factor in HOMOGENEITY_FACTORS:
        scaled = spray_closed_form(fields, x, factor * y, CHARGE_ANALYTIC)
        floor = factor * factor * max(sup_norm(exact.G), 1e-4 * exact.K ** 2)
        results.append(IdentityResult('spray_homogeneity', 'G^i(x, l y) = l^2 G^i(x, y)', 'homogeneity',
                                      relative_residual(scaled.G, factor * factor * exact.G, floor)))
    point = evaluate_point(fields, x, y)
    k = point.kernel

    def response():
        numeric = charge_response_M(fields, x, y, CHARGE_NUMERIC, kernel=k)
        return relative_residual(charge_response_M(fields, x, y, CHARGE_ANALYTIC, kernel=k), numeric)

    _guarded(results, 'charge_response', 'dK/dg = (1/2) M K, analytic M', 'charge_response', response)
    if abs(k.g) >= LITERAL_CHARGE and abs(k.b) > Z_FORM_PLANE * k.S:
        safe, literal = charge_middle_forms(point)
        results.append(IdentityResult('charge_middle', 'K (2 b^2 w^2/(g B)) X A^i = (q^2/(B nu)) [B b^i - (b + g q c^2) y^i]',
                                      'charge_middle', relative_residual(literal, safe)))
    grad, _ = fields_mod.charge_gradient(fields, x, y)
    if not np.any(grad):
        results.append(IdentityResult('charge_terms_vanish', 'E^i = 0 for constant g', 'algebraic',
                                      sup_norm(closed.charge)))
    if sup_norm(fields_mod.covariant_derivative_b(fields, x)) == 0.0 and not np.any(fields.b.derivative(x)):
        results.append(IdentityResult('b_terms_vanish', 'drift and torsion vanish for parallel b',
                                      'algebraic', sup_norm(closed.drift) + sup_norm(closed.torsion)))
    return results


def sample_checks(fields, x, y, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, np.ndarray, np.ndarray, str) -> t.List[IdentityResult]
    """Every per-sample check that applies to the signature of the fields
    """
    if not fields.positive_definite:
        return pseudo_identities(fields, x, y)
    return kernel_checks(fields, x, y) + tensor_checks(fields, x, y) + spray_checks(fields, x, y, method)


def aggregate(per_sample, tolerances):
    # type: (t.Sequence[t.Sequence[IdentityResult]], t.Dict[str, Tolerance]) -> t.List[CheckRecord]
    """Reduce per-sample results to one record per check name

    The worst residual wins; ties keep the lowest sample index, so the
    reduction does not depend on evaluation order.
    """
    worst = {}  # type: t.Dict[str, t.Tuple[int, IdentityResult]]
    order = []  # type: t.List[str]
    for index, results in enumerate(per_sample):
        for result in results:
            if result.name not in worst:
                worst[result.name] = (index, result)
                order.append(result.name)
                continue
            _, current = worst[result.name]
            if _worse(result.residual, current.residual):
                worst[result.name] = (index, result)
    records = []
    for name in order:
        index, result = worst[name]
        tolerance = tolerances[result.category]
        records.append(CheckRecord(
            name=name, reference=result.reference, sample=index, residual=float(result.residual),
            tolerance=tolerance.value, tolerance_key=result.category, tolerance_source=tolerance.source,
            passed=bool(result.residual <= tolerance.value), note=result.note))
    return records


def _worse(candidate, current):
    # type: (float, float) -> bool
    if math.isnan(current):
        return False
    return math.isnan(candidate) or candidate > current


def berwald_record(fields, samples, tolerances, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, t.Sequence[t.Tuple[np.ndarray, np.ndarray]], t.Dict[str, Tolerance], str) -> CheckRecord
    """The Berwald criterion as a record

    On fields with g constant and b parallel the spray must be Riemannian on
    every sample; otherwise some sample must witness a residual above the
    berwald_witness tolerance.
    """
    tolerance = tolerances['berwald']
    verdict = berwald_check(fields, samples, tolerance.value, method)
    if verdict.criterion:
        return CheckRecord(
            name='berwald', reference='G^i = a^i_nm y^n y^m when g is constant and nabla b = 0',
            sample=verdict.witness, residual=max(verdict.residuals), tolerance=tolerance.value,
            tolerance_key='berwald', tolerance_source=tolerance.source, passed=verdict.verdict == PASS,
            note=verdict.verdict)
    witness = tolerances['berwald_witness']
    residual = max(verdict.residuals)
    return CheckRecord(
        name='berwald_witness', reference='some sample has G^i != a^i_nm y^n y^m when g varies or nabla b != 0',
        sample=verdict.witness, residual=residual, tolerance=witness.value, tolerance_key='berwald_witness',
        tolerance_source=witness.source, passed=residual > witness.value,
        note='%s, g constant: %s, b parallel: %s' % (verdict.verdict, verdict.charge_constant, verdict.parallel))


def regularity_records(tolerances, dimension=3, seed=0):
    # type: (t.Dict[str, Tolerance], int, int) -> t.List[CheckRecord]
    """Positive-definiteness of g_ij over the (g, c) grid
    """
    cells = regularity_grid(REGULARITY_CHARGES, REGULARITY_NORMS, REGULARITY_SAMPLES, dimension, seed)
    irregular = [cell for cell in cells if not cell.regular]
    algebraic = tolerances['algebraic']
    determinant = tolerances['determinant']
    note = ', '.join('g = %g, c = %g' % (cell.g, cell.c) for cell in irregular)
    return [
        CheckRecord(name='regularity', reference='g_ij positive-definite over the (g, c) grid', sample=None,
                    residual=float(len(irregular)), tolerance=algebraic.value, tolerance_key='algebraic',
                    tolerance_source=algebraic.source, passed=not irregular, note=note),
        CheckRecord(name='regularity_determinant', reference='det g = (nu/q)(K^2/B)^N det a over the (g, c) grid',
                    sample=None, residual=max(cell.det_residual for cell in cells), tolerance=determinant.value,
                    tolerance_key='determinant', tolerance_source=determinant.source,
                    passed=all(cell.det_residual <= determinant.value for cell in cells)),
    ]


def run_battery(scenario, samples, tolerances, jobs=1, method=CHARGE_NUMERIC):
    # type: (t.Any, t.Sequence[t.Tuple[np.ndarray, np.ndarray]], t.Dict[str, Tolerance], int, str) -> t.List[CheckRecord]
    """Run every suite of a scenario

    Args:
        scenario (Scenario): the scenario
        samples (t.Sequence): validated (x, y) pairs
        tolerances (t.Dict[str, Tolerance]): resolved tolerances
        jobs (int): worker threads for the per-sample checks

    Returns:
        t.List[CheckRecord]: one record per check, in first-seen order
    """
    fields = scenario.fields

    def run(sample):
        x, y = sample
        try:
            return sample_checks(fields, x, y, method)
        except FinsleroidException as e:
            logger.warning('sample at x = %s, y = %s could not be evaluated: %s', x, y, e)
            return [IdentityResult('sample_evaluation', 'every check evaluates at the sample', 'algebraic',
                                   float('inf'), str(e))]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            per_sample = list(executor.map(run, samples))
    else:
        per_sample = [run(sample) for sample in samples]
    records = aggregate(per_sample, tolerances)
    if fields.positive_definite:
        records.append(berwald_record(fields, samples, tolerances, method))
        if scenario.regularity_grid:
            records.extend(regularity_records(tolerances, fields.dimension))
    for record in records:
        if record.passed:
            check_logger.debug('%s passed: %.3g <= %.3g', record.name, record.residual, record.tolerance)
        else:
            check_logger.info('%s failed at sample %s: %.3g, tolerance %.3g (%s)', record.name, record.sample,
                              record.residual, record.tolerance, record.tolerance_source)
    return records
