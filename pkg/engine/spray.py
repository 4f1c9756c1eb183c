"""Spray coefficients of the Finsleroid-regular space.

The closed form is

    G^i = (g/nu)(y^j y^h nabla_j b_h + g q b^j f_j) v^i - g q f^i + E^i + a^i_nm y^n y^m

with G^i = gamma^i_nm y^n y^m, so geodesics obey x'' + G(x, x') = 0. The
oracle rebuilds gamma from x-differences of the closed-form g_ij.
"""
import dataclasses
import logging
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np
import scipy.linalg

from engine import fields as fields_mod
from engine.constants import (
    BERWALD_MIN_SAMPLES, DEFAULT_TOLERANCES, PARALLEL_FLOOR, SPRAY_FLOOR)
from engine.kernel import ScalarKernel, eval_kernel, metric_function
from engine.oracle import gradient, param_derivative
from engine.tensors import (
    PointTensors, auxiliary_vectors, evaluate_point, metric_determinant,
    metric_tensor)
from engine.utils import ScenarioException, as_vector, sup_norm

logger = logging.getLogger('finsleroid')  # type: logging.Logger

CHARGE_NUMERIC = 'numeric'
CHARGE_ANALYTIC = 'analytic'

PASS = 'PASS'
FAIL_WITH_WITNESS = 'FAIL_WITH_WITNESS'


@dataclasses.dataclass(frozen=True, eq=False)
class SprayData(object):
    """G^i with the terms it is made of
    """
    G: np.ndarray
    drift: np.ndarray
    torsion: np.ndarray
    charge: np.ndarray
    riemann: np.ndarray
    # None when the charge is constant and E^i is skipped
    M: t.Optional[float]
    yg: float
    K: float

    def to_json(self):
        # type: () -> t.Dict[str, t.Any]
        return {
            'G': self.G.tolist(), 'drift': self.drift.tolist(), 'torsion': self.torsion.tolist(),
            'E': self.charge.tolist(), 'riemann': self.riemann.tolist(), 'M': self.M, 'yg': self.yg,
            'K': self.K,
        }


@dataclasses.dataclass(frozen=True)
class BerwaldVerdict(object):
    """Outcome of the Berwald criterion on a set of samples

    verdict is PASS when the spray is the Riemannian one on every sample and
    the fields report g constant and b parallel; FAIL_WITH_WITNESS otherwise,
    with the worst sample as witness.
    """
    verdict: str
    residual: float
    witness: int
    charge_constant: bool
    parallel: bool
    residuals: t.Tuple[float, ...] = ()

    @property
    def criterion(self):
        # type: () -> bool
        return self.charge_constant and self.parallel


@dataclasses.dataclass(frozen=True)
class RegularityCell(object):
    g: float
    c: float
    min_eigenvalue: float
    min_det: float
    # largest relative gap between the closed-form and the LU determinant
    det_residual: float

    @property
    def regular(self):
        # type: () -> bool
        return self.min_eigenvalue > 0.0 and self.min_det > 0.0


def _analytic_M(kernel):
    # type: (ScalarKernel) -> float
    k = kernel
    return (k.q * k.b / k.B - k.f / k.h ** 3
            + k.g * k.q * k.L / (2.0 * k.h * k.h * k.B))


def charge_response_M(fields, x, y, method=CHARGE_NUMERIC, kernel=None):
    # type: (fields_mod.FieldSet, t.Any, t.Any, str, t.Optional[ScalarKernel]) -> float
    """The scalar M defined by dK/dg = (1/2) M K at fixed (x, y, a, b)

    Args:
        method (str): 'numeric' for certified central differences in g,
            'analytic' for M = qb/B - f/h^3 + g q L/(2 h^2 B)

    Raises:
        RangeClampException: the g-stencil leaves (-2, 2)

    Returns:
        float: M
    """
    if kernel is None:
        kernel = evaluate_point(fields, x, y).kernel
    if method == CHARGE_ANALYTIC:
        return _analytic_M(kernel)
    if method != CHARGE_NUMERIC:
        raise ValueError('unknown method %r' % method)
    b, q = kernel.b, kernel.q
    result = param_derivative(lambda g: metric_function(b, q, g), kernel.g, scale_floor=kernel.K)
    return 2.0 * float(result.value) / kernel.K


def _middle_safe(kernel, aux, yg):
    # type: (ScalarKernel, t.Any, float) -> np.ndarray
    k = kernel
    return k.q * k.q / (k.B * k.nu) * yg * (k.B * aux.b_up - (k.b + k.g * k.q * k.c2) * aux.y)


def _middle_literal(kernel, cartan, yg):
    # type: (ScalarKernel, t.Any, float) -> np.ndarray
    k = kernel
    w = k.q / k.b
    return k.K * 2.0 * k.b * k.b * w * w / (k.g * k.B) * yg * k.X * cartan.A_up


def charge_middle_forms(point, yg=1.0):
    # type: (PointTensors, float) -> t.Tuple[np.ndarray, np.ndarray]
    """The middle E term in its cancellation-safe and literal forms, in that order
    """
    return _middle_safe(point.kernel, point.aux, yg), _middle_literal(point.kernel, point.cartan, yg)


def e_coefficients(fields, x, y, method=CHARGE_NUMERIC, point=None, form='safe'):
    # type: (fields_mod.FieldSet, t.Any, t.Any, str, t.Optional[PointTensors], str) -> np.ndarray
    """The charge-gradient terms E^i

    E^i = M (yg) y^i + K (2 b^2 w^2/(g B)) (yg) X A^i - (1/2) M K^2 g_h g^ih

    Args:
        form (str): 'safe' writes the middle term as
            (q^2/(B nu)) (yg) [B b^i - (b + g q c^2) y^i], finite at g = 0;
            'literal' keeps the 1/g and 1/b factors

    Returns:
        np.ndarray: E^i, zero when the charge is constant
    """
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    grad, yg = fields_mod.charge_gradient(fields, x, y)
    if not np.any(grad):
        return np.zeros(fields.dimension)
    if point is None:
        point = evaluate_point(fields, x, y)
    k = point.kernel
    M = charge_response_M(fields, x, y, method, kernel=k)
    if form == 'safe':
        middle = _middle_safe(k, point.aux, yg)
    elif form == 'literal':
        middle = _middle_literal(k, point.cartan, yg)
    else:
        raise ValueError('unknown form %r' % form)
    return M * yg * y + middle - 0.5 * M * k.K * k.K * point.bundle.inverse.dot(grad)


def spray_closed_form(fields, x, y, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, t.Any, t.Any, str) -> SprayData
    """Closed-form spray coefficients and their decomposition

    Raises:
        ZeroVectorException: y = 0
        ConstraintViolationException: c or g out of range at x

    Returns:
        SprayData: G^i, the drift, torsion, charge and Riemannian terms
    """
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    point = evaluate_point(fields, x, y)
    k, aux = point.kernel, point.aux
    christoffel = fields_mod.riemann_christoffel(fields, x, aux.a_inv)
    nabla_b = fields.b.derivative(x) - np.einsum('k,kij->ij', aux.b_low, christoffel)
    _, f_low, f_up = fields_mod.f_tensors(fields, x, y, aux.a_inv)
    drift = k.g / k.nu * (y.dot(nabla_b).dot(y) + k.g * k.q * aux.b_up.dot(f_low)) * aux.v_up
    torsion = -k.g * k.q * f_up
    riemann = np.einsum('inm,n,m->i', christoffel, y, y)
    grad, yg = fields_mod.charge_gradient(fields, x, y)
    M = None
    charge = np.zeros(fields.dimension)
    if np.any(grad):
        M = charge_response_M(fields, x, y, method, kernel=k)
        charge = (M * yg * y + _middle_safe(k, aux, yg)
                  - 0.5 * M * k.K * k.K * point.bundle.inverse.dot(grad))
    return SprayData(G=drift + torsion + charge + riemann, drift=drift, torsion=torsion, charge=charge,
                     riemann=riemann, M=M, yg=yg, K=k.K)


def spray_oracle(fields, x, y, base_step=None, levels=None):
    # type: (fields_mod.FieldSet, t.Any, t.Any, t.Optional[float], t.Optional[int]) -> np.ndarray
    """G^i = g^ij gamma_j,nm y^n y^m from x-differences of the closed-form g_ij

    Raises:
        StepUnderflowException: the x-derivative of g_ij did not converge
        InadmissibleStencilException: a stencil point left the admissible domain

    Returns:
        np.ndarray: G^i
    """
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    point = evaluate_point(fields, x, y)

    def metric_of(xx):
        metric = fields_mod.metric_at(fields, xx)
        kk = eval_kernel(fields, xx, y, metric=metric)
        return metric_tensor(kk, auxiliary_vectors(kk, fields, xx, y, metric=metric))

    options = {}  # type: t.Dict[str, t.Any]
    if base_step is not None:
        options['base_step'] = base_step
    if levels is not None:
        options['levels'] = levels
    # D[k, i, j] = d_k g_ij at fixed y
    D = gradient(metric_of, x, scale_floor=sup_norm(point.bundle.metric), **options).value
    lowered = np.einsum('mjn,n,m->j', D, y, y) - 0.5 * np.einsum('jnm,n,m->j', D, y, y)
    return np.linalg.solve(point.bundle.metric, lowered)


def spray_relative_error(closed, oracle, K):
    # type: (np.ndarray, np.ndarray, float) -> float
    """|closed - oracle| relative to |oracle|, floored at SPRAY_FLOOR K^2
    """
    return sup_norm(np.asarray(closed) - np.asarray(oracle)) / max(sup_norm(oracle), SPRAY_FLOOR * K * K)


def berwald_residual(fields, x, y, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, t.Any, t.Any, str) -> t.Tuple[float, float]
    """|G^i - a^i_nm y^n y^m| and the size of the Riemannian term
    """
    data = spray_closed_form(fields, x, y, method)
    return sup_norm(data.G - data.riemann), sup_norm(data.riemann)


def berwald_check(fields, samples, tolerance=None, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, t.Sequence[t.Tuple[t.Any, t.Any]], t.Optional[float], str) -> BerwaldVerdict
    """Berwald criterion: G^i = a^i_nm y^n y^m iff g is constant and nabla b = 0

    Args:
        fields (FieldSet): the space
        samples (t.Sequence): (x, y) pairs, at least ten
        tolerance (float): allowed |G - a y y| relative to 1 + |a y y|

    Raises:
        ScenarioException: fewer than ten samples

    Returns:
        BerwaldVerdict: PASS, or FAIL_WITH_WITNESS with the worst sample
    """
    if len(samples) < BERWALD_MIN_SAMPLES:
        raise ScenarioException('the Berwald check needs at least %d samples, got %d'
                                % (BERWALD_MIN_SAMPLES, len(samples)))
    if tolerance is None:
        tolerance = DEFAULT_TOLERANCES['berwald']
    residuals = []
    worst, witness = -1.0, 0
    charge_constant, parallel = True, True
    for index, (x, y) in enumerate(samples):
        grad, _ = fields_mod.charge_gradient(fields, x, y)
        if np.any(grad):
            charge_constant = False
        if sup_norm(fields_mod.covariant_derivative_b(fields, x)) > PARALLEL_FLOOR:
            parallel = False
        residual, riemann = berwald_residual(fields, x, y, method)
        residuals.append(residual)
        scaled = residual / (1.0 + riemann)
        if scaled > worst:
            worst, witness = scaled, index
    verdict = PASS if (worst <= tolerance and charge_constant and parallel) else FAIL_WITH_WITNESS
    logger.debug('berwald verdict %s, worst residual %.3g at sample %d', verdict, worst, witness)
    return BerwaldVerdict(verdict=verdict, residual=residuals[witness], witness=witness,
                          charge_constant=charge_constant, parallel=parallel, residuals=tuple(residuals))


def indicatrix_radius(fields, x, direction):
    # type: (fields_mod.FieldSet, t.Any, t.Any) -> float
    """The multiple t of direction lying on the indicatrix K(x, t direction) = 1

    Raises:
        ZeroVectorException: direction = 0
    """
    return 1.0 / eval_kernel(fields, x, direction).K


def regularity_grid(g_values, c_values, samples, dimension=3, seed=0):
    # type: (t.Sequence[float], t.Sequence[float], int, int, int) -> t.List[RegularityCell]
    """Certify a positive-definite g_ij over a grid of constant (g, c)

    Each cell uses a flat a_ij with b = (c, 0, ..., 0) and draws `samples`
    random directions y.

    Returns:
        t.List[RegularityCell]: one cell per (g, c) pair, g-major
    """
    rng = np.random.default_rng(seed)
    cells = []
    for g in g_values:
        for c in c_values:
            b = np.zeros(dimension)
            b[0] = c
            space = fields_mod.constant_fields(np.eye(dimension), b, g)
            x = np.zeros(dimension)
            metric = fields_mod.metric_at(space, x)
            least, smallest_det, det_residual = np.inf, np.inf, 0.0
            for _ in range(samples):
                y = rng.normal(size=dimension)
                kernel = eval_kernel(space, x, y, metric=metric)
                aux = auxiliary_vectors(kernel, space, x, y, metric=metric)
                g_ij = metric_tensor(kernel, aux)
                eigenvalues = scipy.linalg.eigh(g_ij, eigvals_only=True, check_finite=False)
                det = metric_determinant(kernel, aux)
                lu_det = fields_mod.lu_determinant(g_ij)
                least = min(least, float(eigenvalues[0]))
                smallest_det = min(smallest_det, float(det))
                det_residual = max(det_residual, abs(det - lu_det) / abs(lu_det))
            cell = RegularityCell(g=float(g), c=float(c), min_eigenvalue=least, min_det=smallest_det,
                                  det_residual=det_residual)
            if not cell.regular:
                logger.warning('g_ij fails to be positive-definite at g = %g, c = %g', g, c)
            cells.append(cell)
    return cells
