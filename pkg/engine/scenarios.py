"""Scenarios: a space together with the sample points to check it on.

The built-in scenarios are

    S1   flat a, constant b = (0.8, 0, 0), g = 0.5            Berwald
    S2   b_0 = 0.7 + 0.05 x1^2                                 b not parallel
    S3   g = 0.5 + 0.1 x0                                      g not constant
    S23  S2 and S3 together
    S4   S1 pulled back by x -> x + 0.05 |x|^2 e_0             Berwald, curvilinear
    S5   time-space, a = diag(1, -1, -1, -1), b = (0.8, 0, 0, 0), g = 0.5
"""
import dataclasses
import logging
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

from engine import fields as fields_mod
from engine.constants import (
    AXIS_PLANE, SIGNATURE_POSITIVE_DEFINITE, SIGNATURE_TIME_SPACE, msg_code)
from engine.fields import ConstantField, FieldSet, PolynomialField
from engine.polynomial import Polynomial
from engine.pseudo import admissible
from engine.utils import (
    ChargeOutOfRangeException, FinsleroidException, NormOutOfRangeException,
    ScenarioException, as_vector)

logger = logging.getLogger('finsleroid')  # type: logging.Logger

# random y shorter than this fraction of the box are redrawn
_SMALL_Y = 0.25
_ATTEMPTS_PER_SAMPLE = 1000


@dataclasses.dataclass(frozen=True, eq=False)
class Scenario(object):
    """A space and the samples to check it on

    samples holds the explicit (x, y) pairs, random the blocks of
    {count, seed, x_box, y_box} to draw more from.
    """
    id: str
    fields: FieldSet
    samples: t.List[t.Tuple[np.ndarray, np.ndarray]] = dataclasses.field(default_factory=list)
    random: t.List[t.Dict[str, t.Any]] = dataclasses.field(default_factory=list)
    tolerances: t.Dict[str, float] = dataclasses.field(default_factory=dict)
    regularity_grid: bool = False
    description: str = ''

    @property
    def dimension(self):
        # type: () -> int
        return self.fields.dimension

    @property
    def signature(self):
        # type: () -> str
        return self.fields.signature

    def to_json(self):
        # type: () -> t.Dict[str, t.Any]
        return {
            'id': self.id,
            'description': self.description,
            'dimension': self.dimension,
            'signature': self.signature,
            'fields': self.fields.to_json(),
            'samples': ([{'x': x.tolist(), 'y': y.tolist()} for x, y in self.samples]
                        + [{'random': dict(block)} for block in self.random]),
            'tolerances': dict(self.tolerances),
            'regularity_grid': self.regularity_grid,
        }


def field_from_json(description, shape, dimension):
    # type: (t.Dict[str, t.Any], t.Tuple[int, ...], int) -> t.Any
    """Build a constant or polynomial field from its scenario description

    Args:
        description (t.Dict[str, t.Any]): {"kind": "constant", "value": ...} or
            {"kind": "polynomial", "terms": [{"coeff": ..., "powers": [...]}, ...]}
        shape (t.Tuple[int, ...]): the field value shape
        dimension (int): number of coordinates

    Raises:
        ValueError: malformed description

    Returns:
        t.Any: ConstantField or PolynomialField
    """
    kind = description.get('kind')
    if kind == ConstantField.kind:
        value = np.array(description.get('value'), dtype=float)
        if value.shape != shape:
            raise ValueError('constant value has shape %r, expected %r' % (value.shape, shape))
        return ConstantField(value, dimension)
    if kind == PolynomialField.kind:
        terms = description.get('terms') or []
        if not terms:
            raise ValueError('a polynomial field needs at least one term')
        powers, coeffs = [], []
        for term in terms:
            exponent = list(term.get('powers', []))
            if len(exponent) != dimension:
                raise ValueError('powers %r must have %d entries' % (exponent, dimension))
            powers.append(exponent)
            coeffs.append(term.get('coeff'))
        return PolynomialField(powers, coeffs, shape=shape)
    raise ValueError('unknown field kind %r' % kind)


def fields_from_json(dimension, signature, description):
    # type: (int, str, t.Dict[str, t.Dict[str, t.Any]]) -> FieldSet
    """Build the FieldSet of a scenario from its "fields" object
    """
    shapes = {'a': (dimension, dimension), 'b': (dimension,), 'g': ()}
    built = {}
    for name, shape in shapes.items():
        if name not in description:
            raise ValueError('field %s is missing' % name)
        try:
            built[name] = field_from_json(description[name], shape, dimension)
        except (TypeError, ValueError) as e:
            raise ValueError('field %s: %s' % (name, e))
    return FieldSet(dimension, signature, built['a'], built['b'], built['g'])


def pullback(a, b, g, phi):
    # type: (t.Sequence[t.Sequence[Polynomial]], t.Sequence[Polynomial], Polynomial, t.Sequence[Polynomial]) -> FieldSet
    """Pull polynomial fields back along the polynomial map phi

    a'_ij = J^k_i J^l_j a_kl(phi), b'_i = J^k_i b_k(phi) and g' = g(phi) with
    J^k_i = d phi^k / dx^i; composition is exact.

    Returns:
        FieldSet: positive-definite fields in the new coordinates
    """
    n = len(phi)
    jacobian = [[phi[k].derivative(i) for i in range(n)] for k in range(n)]
    a_phi = [[a[k][l].compose(phi) for l in range(n)] for k in range(n)]
    b_phi = [b[k].compose(phi) for k in range(n)]
    zero = Polynomial(n)
    a_new = [[sum((jacobian[k][i] * jacobian[l][j] * a_phi[k][l] for k in range(n) for l in range(n)), zero)
              for j in range(n)] for i in range(n)]
    b_new = [sum((jacobian[k][i] * b_phi[k] for k in range(n)), zero) for i in range(n)]
    return FieldSet(n, SIGNATURE_POSITIVE_DEFINITE,
                    PolynomialField.from_polynomials(a_new, n),
                    PolynomialField.from_polynomials(b_new, n),
                    PolynomialField.from_polynomials(g.compose(phi), n))


def _box(lo, hi):
    # type: (float, float) -> t.List[float]
    return [float(lo), float(hi)]


def s1():
    # type: () -> Scenario
    fields = fields_mod.constant_fields(np.eye(3), [0.8, 0.0, 0.0], 0.5)
    explicit = [
        (np.zeros(3), np.array([1.0, 1.0, 1.0])),
        (np.zeros(3), np.array([-0.8, 0.3, 0.1])),
    ]
    return Scenario('S1', fields, explicit,
                    [{'count': 20, 'seed': 1, 'x_box': _box(-1, 1), 'y_box': _box(-1, 1)}],
                    regularity_grid=True, description='flat metric, constant b and g')


def _s2_b():
    # type: () -> PolynomialField
    return PolynomialField([[0, 0, 0], [0, 2, 0]], [[0.7, 0.0, 0.0], [0.05, 0.0, 0.0]], shape=(3,))


def _s3_g():
    # type: () -> PolynomialField
    return PolynomialField([[0, 0, 0], [1, 0, 0]], [0.5, 0.1], shape=())


def s2():
    # type: () -> Scenario
    fields = FieldSet(3, SIGNATURE_POSITIVE_DEFINITE, ConstantField(np.eye(3), 3), _s2_b(),
                      ConstantField(0.5, 3))
    explicit = [(np.array([0.0, 1.0, 0.0]), np.array([1.0, 1.0, 1.0]))]
    return Scenario('S2', fields, explicit,
                    [{'count': 50, 'seed': 2, 'x_box': _box(-1.5, 1.5), 'y_box': _box(-1, 1)}],
                    description='b_0 = 0.7 + 0.05 x1^2, not parallel')


def s3():
    # type: () -> Scenario
    fields = FieldSet(3, SIGNATURE_POSITIVE_DEFINITE, ConstantField(np.eye(3), 3),
                      ConstantField([0.8, 0.0, 0.0], 3), _s3_g())
    explicit = [(np.zeros(3), np.array([1.0, 1.0, 1.0]))]
    return Scenario('S3', fields, explicit,
                    [{'count': 50, 'seed': 3, 'x_box': _box(-1, 1), 'y_box': _box(-1, 1)}],
                    description='g = 0.5 + 0.1 x0, not constant')


def s23():
    # type: () -> Scenario
    fields = FieldSet(3, SIGNATURE_POSITIVE_DEFINITE, ConstantField(np.eye(3), 3), _s2_b(), _s3_g())
    explicit = [(np.array([0.0, 1.0, 0.0]), np.array([1.0, 1.0, 1.0]))]
    return Scenario('S23', fields, explicit,
                    [{'count': 50, 'seed': 23, 'x_box': _box(-1, 1), 'y_box': _box(-1, 1)}],
                    description='varying b and g together')


def s4():
    # type: () -> Scenario
    n = 3
    x = [Polynomial.variable(n, i) for i in range(n)]
    phi = [x[0] + 0.05 * (x[0] ** 2 + x[1] ** 2 + x[2] ** 2), x[1], x[2]]
    identity = [[Polynomial.constant(n, 1.0 if i == j else 0.0) for j in range(n)] for i in range(n)]
    b = [Polynomial.constant(n, value) for value in (0.8, 0.0, 0.0)]
    fields = pullback(identity, b, Polynomial.constant(n, 0.5), phi)
    explicit = [(np.array([0.5, -0.3, 0.2]), np.array([1.0, 1.0, 1.0]))]
    return Scenario('S4', fields, explicit,
                    [{'count': 20, 'seed': 4, 'x_box': _box(-1, 1), 'y_box': _box(-1, 1)}],
                    description='S1 in curvilinear coordinates')


def s5():
    # type: () -> Scenario
    fields = fields_mod.constant_fields(np.diag([1.0, -1.0, -1.0, -1.0]), [0.8, 0.0, 0.0, 0.0], 0.5,
                                        signature=SIGNATURE_TIME_SPACE)
    explicit = [(np.zeros(4), np.array([1.0, 0.8, 0.0, 0.0]))]
    return Scenario('S5', fields, explicit,
                    [{'count': 50, 'seed': 5, 'x_box': _box(-1, 1), 'y_box': _box(-1, 1)}],
                    description='time-space signature')


BUILTIN = {
    'S1': s1,
    'S2': s2,
    'S3': s3,
    'S23': s23,
    'S4': s4,
    'S5': s5,
}


def builtin(name):
    # type: (str) -> Scenario
    try:
        return BUILTIN[name.upper()]()
    except KeyError:
        raise ScenarioException('unknown built-in scenario %s, expected one of %s'
                                % (name, ', '.join(sorted(BUILTIN))))


def check_sample(fields, index, x):
    # type: (FieldSet, int, t.Any) -> t.Optional[str]
    """The reason why x is not admissible for the fields, None if it is
    """
    try:
        a_inv = fields_mod.metric_at(fields, x)[1]
        c2 = fields_mod.norm_squared(fields, x, a_inv)
        c = float(np.sqrt(max(c2, 0.0)))
        if c2 <= 0.0 or (fields.positive_definite and c >= 1.0):
            return msg_code['NORM_OUT_OF_RANGE'] % (index, c)
        if not fields.positive_definite and c >= 1.0:
            logger.warning(msg_code['NORM_SR_WARNING'], index, c)
        fields_mod.charge_at(fields, x)
    except ChargeOutOfRangeException:
        return msg_code['CHARGE_OUT_OF_RANGE'] % (index, float(fields.g.evaluate(as_vector(x))))
    except NormOutOfRangeException as e:
        return 'sample %d: %s' % (index, e)
    except FinsleroidException as e:
        return 'sample %d: %s' % (index, e)
    return None


def _on_axis_plane(fields, x, y):
    # type: (FieldSet, np.ndarray, np.ndarray) -> bool
    a = fields.a.evaluate(x)
    b = float(fields.b.evaluate(x).dot(y))
    return abs(b) <= AXIS_PLANE * float(np.sqrt(y.dot(a).dot(y)))


def _draw_block(fields, block, seed, offset):
    # type: (FieldSet, t.Dict[str, t.Any], int, int) -> t.List[t.Tuple[np.ndarray, np.ndarray]]
    count = int(block['count'])
    x_lo, x_hi = block['x_box']
    y_lo, y_hi = block['y_box']
    shortest = _SMALL_Y * max(abs(y_lo), abs(y_hi))
    n = fields.dimension
    rng = np.random.default_rng(seed)
    drawn = []  # type: t.List[t.Tuple[np.ndarray, np.ndarray]]
    attempts = 0
    while len(drawn) < count:
        attempts += 1
        if attempts > _ATTEMPTS_PER_SAMPLE * count:
            raise ScenarioException('could not draw %d admissible samples in %d attempts'
                                    % (count, attempts - 1))
        x = rng.uniform(x_lo, x_hi, size=n)
        y = rng.uniform(y_lo, y_hi, size=n)
        if np.linalg.norm(y) < shortest:
            continue
        reason = check_sample(fields, offset + len(drawn), x)
        if reason is not None:
            raise ScenarioException(reason, errors={'samples': [reason]})
        if not fields.positive_definite and not admissible(fields, x, y):
            continue
        if fields.positive_definite and _on_axis_plane(fields, x, y):
            continue
        drawn.append((x, y))
    return drawn


def draw_samples(scenario, seed=None):
    # type: (Scenario, t.Optional[int]) -> t.List[t.Tuple[np.ndarray, np.ndarray]]
    """Explicit samples followed by the random ones, validated

    Random blocks draw x uniformly in x_box and y uniformly in y_box per
    coordinate; too short y and, in the time-space case, y outside the
    admissible domain with its margin are redrawn.

    Args:
        scenario (Scenario): the scenario
        seed (int): replaces the seed of every random block when given; the
            block index is added so blocks stay independent

    Raises:
        ScenarioException: a sample violates the field constraints, or an
            explicit time-space y lies outside the admissible domain

    Returns:
        t.List[t.Tuple[np.ndarray, np.ndarray]]: (x, y) pairs in sample order
    """
    fields = scenario.fields
    samples = []
    errors = []
    for index, (x, y) in enumerate(scenario.samples):
        reason = check_sample(fields, index, x)
        if reason is None and not fields.positive_definite and not admissible(fields, x, y, margin=0.0):
            reason = 'sample %d: y = %s lies outside the admissible domain' % (index, list(y))
        if reason is not None:
            errors.append(reason)
        samples.append((as_vector(x, fields.dimension), as_vector(y, fields.dimension)))
    if errors:
        raise ScenarioException(errors[0], errors={'samples': errors})
    for number, block in enumerate(scenario.random):
        block_seed = block.get('seed', 0) if seed is None else seed + number
        samples.extend(_draw_block(fields, block, block_seed, len(samples)))
    logger.debug('scenario %s: %d samples', scenario.id, len(samples))
    return samples

