"""The pseudo-Finsleroid-regular metric of time-space signature.

With b = b_i y^i > 0, S^2 = a_ij y^i y^j > 0 and q = sqrt(b^2 - S^2) the
characteristic form B = b^2 - g q b - q^2 factorises as (b + g_+ q)(b + g_- q).
The admissible domain also asks B > 0, where g_ij keeps the signature
(+,-,...,-), and there the metric function reads

    F = sqrt(B) J = (b + g_- q)^(G_+/2) (b + g_+ q)^(-G_-/2)

The positive-definite closed forms of y_i, g_ij, g^ij, A_i and A_ijk turn
into their pseudo counterparts under g -> i g, q -> i q.
"""
import dataclasses
import logging
import math
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np
import scipy.linalg

from engine import fields as fields_mod
from engine.constants import HOMOGENEITY_FACTORS, PSEUDO_HESSIAN_STEP, PSEUDO_MARGIN
from engine.kernel import ScalarKernel
from engine.oracle import gradient, hessian
from engine.tensors import (
    IdentityResult, auxiliary_from_metric, cartan, covariant_y, inverse_metric,
    metric_tensor, tensor_bundle)
from engine.utils import (
    FinsleroidException, InadmissibleVectorException,
    OddDegreeMonomialException, WrongSignatureException, ZeroVectorException,
    as_vector, relative_residual, sup_norm)

logger = logging.getLogger('finsleroid')  # type: logging.Logger

# closed forms the substitution g -> i g, q -> i q applies to
DUALITY_EXPRESSIONS = ('y_lower', 'metric', 'inverse_metric', 'cartan_trace', 'cartan')

# relative size of an imaginary part which still counts as round-off
_IMAGINARY_NOISE = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class PseudoKernel(object):
    """Every pointwise scalar of the pseudo metric at (x, y)
    """
    dimension: int
    b: float
    S2: float
    q: float
    g: float
    c2: float
    B: float
    h: float
    G: float
    g_plus: float
    g_minus: float
    G_plus: float
    G_minus: float
    # L = b - (g/2) q, so that L^2 - h^2 q^2 = B
    L: float
    J: float
    # sqrt(|B|) J
    F: float
    # |b + g_- q|^(G_+/2) |b + g_+ q|^(-G_-/2)
    F_product: float
    D_B: float
    nu: float
    inv_x: t.Optional[float] = None
    x: t.Optional[np.ndarray] = None
    y: t.Optional[np.ndarray] = None

    @property
    def S(self):
        # type: () -> float
        return math.sqrt(self.S2)


def pseudo_scalars(b, S2, g, c2, dimension):
    # type: (float, float, float, float, int) -> PseudoKernel
    """Assemble the PseudoKernel out of (b, S^2, g, c^2)

    Raises:
        InadmissibleVectorException: b <= 0, S^2 <= 0, b^2 - S^2 <= 0 or B <= 0
    """
    if not (b > 0.0 and S2 > 0.0 and b * b - S2 > 0.0):
        raise InadmissibleVectorException(
            'b = %.6g, S^2 = %.6g is outside b > 0, S^2 > 0, b^2 - S^2 > 0' % (b, S2))
    q = math.sqrt(b * b - S2)
    h = math.sqrt(1.0 + 0.25 * g * g)
    G = g / h
    g_plus, g_minus = -0.5 * g + h, -0.5 * g - h
    G_plus, G_minus = g_plus / h, g_minus / h
    P = b + g_minus * q
    Q = b + g_plus * q
    B = b * b - g * q * b - q * q
    if P <= 0.0 or B <= 0.0:
        raise InadmissibleVectorException('B = %.6g is not positive at b = %.6g, q = %.6g' % (B, b, q))
    log_p, log_q = math.log(P), math.log(Q)
    J = math.exp(-0.25 * G * (log_p - log_q))
    F_product = math.exp(0.5 * G_plus * log_p - 0.5 * G_minus * log_q)
    nu = q + (1.0 - c2) * g * b
    inv_x = dimension - (1.0 - c2) * B / (q * nu) if nu != 0.0 else None
    return PseudoKernel(
        dimension=dimension, b=b, S2=S2, q=q, g=g, c2=c2, B=B, h=h, G=G, g_plus=g_plus,
        g_minus=g_minus, G_plus=G_plus, G_minus=G_minus, L=b - 0.5 * g * q, J=J,
        F=math.sqrt(B) * J, F_product=F_product, D_B=4.0 * h * h, nu=nu, inv_x=inv_x)


def eval_pseudo_kernel(fields, x, y, metric=None):
    # type: (fields_mod.FieldSet, t.Any, t.Any, t.Optional[t.Tuple[np.ndarray, np.ndarray, float]]) -> PseudoKernel
    """Compute the pseudo kernel scalars at (x, y)

    Args:
        fields (FieldSet): a time-space space
        metric (t.Tuple): a_ij, a^ij, det(a) at x if already known

    Raises:
        WrongSignatureException: the space is positive-definite or a_ij
            lost the signature (+,-,...,-)
        ZeroVectorException: y = 0
        InadmissibleVectorException: y outside the admissible domain

    Returns:
        PseudoKernel: the scalars
    """
    if fields.positive_definite:
        raise WrongSignatureException('the pseudo kernel needs a time-space space')
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    if not np.any(y):
        raise ZeroVectorException()
    a, a_inv, _ = metric if metric is not None else fields_mod.metric_at(fields, x)
    c = fields_mod.norm_c(fields, x, a_inv)
    g = fields_mod.charge_at(fields, x)
    b = float(fields.b.evaluate(x).dot(y))
    S2 = float(y.dot(a).dot(y))
    kernel = pseudo_scalars(b, S2, g, c * c, fields.dimension)
    return dataclasses.replace(kernel, x=x, y=y)


def pseudo_norm(fields, x, y):
    # type: (fields_mod.FieldSet, t.Any, t.Any) -> float
    """The pseudo-Finsleroid-regular metric function F(x, y)
    """
    return eval_pseudo_kernel(fields, x, y).F


def admissible(fields, x, y, margin=PSEUDO_MARGIN):
    # type: (fields_mod.FieldSet, t.Any, t.Any, float) -> bool
    """Whether y lies inside the admissible domain with a relative margin

    Every defining quantity must exceed margin times the matching power of
    the Euclidean |y|.
    """
    try:
        kernel = eval_pseudo_kernel(fields, x, y)
    except (InadmissibleVectorException, ZeroVectorException):
        return False
    size = float(np.dot(kernel.y, kernel.y))
    scale = math.sqrt(size)
    P = kernel.b + kernel.g_minus * kernel.q
    Q = kernel.b + kernel.g_plus * kernel.q
    return (kernel.b > margin * scale and kernel.S2 > margin * size and kernel.q * kernel.q > margin * size
            and P > margin * scale and Q > margin * scale)


def pseudo_metric_numeric(fields, x, y, base_step=PSEUDO_HESSIAN_STEP):
    # type: (fields_mod.FieldSet, t.Any, t.Any, float) -> t.Tuple[np.ndarray, np.ndarray]
    """y_i and g_ij as certified derivatives of F^2/2

    Args:
        base_step (float): Hessian base step; the gradient keeps the oracle default

    Raises:
        InadmissibleStencilException: a stencil point left the admissible domain
        StepUnderflowException: the differences did not converge

    Returns:
        t.Tuple[np.ndarray, np.ndarray]: y_i and g_ij
    """
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    metric = fields_mod.metric_at(fields, x)

    def energy(yy):
        return 0.5 * eval_pseudo_kernel(fields, x, yy, metric=metric).F ** 2

    scale = 2.0 * energy(y)
    y_low = gradient(energy, y, scale_floor=scale).value
    g_ij = hessian(energy, y, base_step=base_step, scale_floor=scale).value
    return y_low, g_ij


def duality_rule(g, q):
    # type: (t.Any, t.Any) -> t.Tuple[complex, complex]
    """The formal change g -> i g, q -> i q

    g/q is left unchanged and g q changes sign.
    """
    return 1j * g, 1j * q


def substituted_kernel(kernel):
    # type: (PseudoKernel) -> ScalarKernel
    """A positive-definite ScalarKernel carrying the substituted (g, q)

    B, nu and 1/X are recomputed from the substituted values and K is
    replaced by F.
    """
    g, q = duality_rule(kernel.g, kernel.q)
    b = kernel.b
    B = b * b + g * q * b + q * q
    nu = q + (1.0 - kernel.c2) * g * b
    inv_x = kernel.dimension + (1.0 - kernel.c2) * B / (q * nu)
    return ScalarKernel(dimension=kernel.dimension, b=b, S2=b * b + q * q, q=q, g=g, c2=kernel.c2, B=B,
                        K=kernel.F, nu=nu, inv_x=inv_x, x=kernel.x, y=kernel.y)


def _real(value, expression):
    # type: (t.Any, str) -> np.ndarray
    value = np.asarray(value, dtype=complex)
    imaginary = sup_norm(value.imag)
    if imaginary > _IMAGINARY_NOISE * max(sup_norm(value.real), 1.0):
        raise OddDegreeMonomialException(
            'substituted %s keeps an imaginary part of size %.3g' % (expression, imaginary))
    return value.real


def duality_substitution(fields, x, y, expression, kernel=None):
    # type: (fields_mod.FieldSet, t.Any, t.Any, str, t.Optional[PseudoKernel]) -> np.ndarray
    """Evaluate a positive-definite closed form under g -> i g, q -> i q

    Args:
        fields (FieldSet): a time-space space
        expression (str): one of y_lower, metric, inverse_metric, cartan_trace, cartan

    Raises:
        OddDegreeMonomialException: the result is not real
        InadmissibleVectorException: y outside the admissible domain

    Returns:
        np.ndarray: the pseudo components
    """
    if expression not in DUALITY_EXPRESSIONS:
        raise ValueError('unknown expression %r, expected one of %s' % (expression, ', '.join(DUALITY_EXPRESSIONS)))
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    a, a_inv, det_a = fields_mod.metric_at(fields, x)
    if kernel is None:
        kernel = eval_pseudo_kernel(fields, x, y, metric=(a, a_inv, det_a))
    complex_kernel = substituted_kernel(kernel)
    aux = auxiliary_from_metric(complex_kernel, a, a_inv, det_a, fields.b.evaluate(x), y)
    if expression == 'y_lower':
        value = covariant_y(complex_kernel, aux)
    elif expression == 'metric':
        value = metric_tensor(complex_kernel, aux)
    elif expression == 'inverse_metric':
        value = inverse_metric(complex_kernel, aux)
    else:
        data = cartan(complex_kernel, aux, tensor_bundle(complex_kernel, aux))
        value = data.A_low if expression == 'cartan_trace' else data.A_ijk
    return _real(value, expression)


def _result(name, reference, category, lhs, rhs, scale=None):
    # type: (str, str, str, t.Any, t.Any, t.Optional[float]) -> IdentityResult
    return IdentityResult(name, reference, category, relative_residual(lhs, rhs, scale))


def pseudo_identities(fields, x, y):
    # type: (fields_mod.FieldSet, t.Any, t.Any) -> t.List[IdentityResult]
    """Identities of the pseudo kernel and the duality check at one point

    Failures come back as residuals, numeric oracles that refuse to converge
    as an infinite residual with the reason in the note.

    Returns:
        t.List[IdentityResult]: one result per identity
    """
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    k = eval_pseudo_kernel(fields, x, y)
    P = k.b + k.g_minus * k.q
    Q = k.b + k.g_plus * k.q
    results = [
        _result('pseudo_factorisation', 'B = b^2 - g q b - q^2 = (b + g_+ q)(b + g_- q)', 'pseudo_forms',
                P * Q, k.B),
        _result('pseudo_L_identity', 'L^2 - h^2 q^2 = B with L = b - (g/2) q', 'pseudo_forms',
                k.L * k.L - k.h * k.h * k.q * k.q, k.B, scale=k.b * k.b),
        _result('pseudo_F_forms', 'sqrt(|B|) J = |b + g_- q|^(G_+/2) |b + g_+ q|^(-G_-/2)', 'pseudo_forms',
                k.F, k.F_product),
        _result('pseudo_exponents', 'G_+/2 - G_-/2 = 1 and G_+ + G_- = -G', 'pseudo_forms',
                [0.5 * k.G_plus - 0.5 * k.G_minus, k.G_plus + k.G_minus], [1.0, -k.G], scale=1.0),
        _result('pseudo_discriminant', 'D_B = 4 h^2 = g^2 + 4', 'pseudo_forms', k.D_B, k.g * k.g + 4.0),
    ]
    for factor in HOMOGENEITY_FACTORS:
        results.append(_result('pseudo_homogeneity', 'F(x, l y) = l F(x, y)', 'homogeneity',
                               pseudo_norm(fields, x, factor * y), factor * k.F))
    riemann = fields.with_charge(0.0)
    results.append(_result('pseudo_norm_reduction', 'F = S at g = 0', 'reduction',
                           pseudo_norm(riemann, x, y), k.S))
    a = fields_mod.metric_at(fields, x)[0]
    try:
        y_low, g_ij = pseudo_metric_numeric(fields, x, y)
        _, g_zero = pseudo_metric_numeric(riemann, x, y)
    except FinsleroidException as e:
        for name, category in (('pseudo_metric_reduction', 'pseudo_reduction'),
                               ('pseudo_euler', 'pseudo_euler'),
                               ('duality_metric', 'duality_metric'),
                               ('duality_covector', 'duality_covector')):
            results.append(IdentityResult(name, 'numeric derivatives of F^2/2', category, float('inf'), str(e)))
        return results
    results.append(_result('pseudo_metric_reduction', 'g_ij = a_ij at g = 0', 'pseudo_reduction', g_zero, a))
    results.append(_result('pseudo_euler', 'g_ij y^i y^j = F^2', 'pseudo_euler', y.dot(g_ij).dot(y), k.F * k.F))
    eigenvalues = scipy.linalg.eigh(g_ij, eigvals_only=True, check_finite=False)
    wrong = abs(int(np.sum(eigenvalues > 0.0)) - 1)
    results.append(IdentityResult('pseudo_signature', 'g_ij has signature (+,-,...,-)', 'pseudo_forms',
                                  float(wrong), '%d eigenvalues out of place' % wrong if wrong else ''))
    metric = duality_substitution(fields, x, y, 'metric', kernel=k)
    inverse = duality_substitution(fields, x, y, 'inverse_metric', kernel=k)
    covector = duality_substitution(fields, x, y, 'y_lower', kernel=k)
    results.extend([
        _result('duality_metric', 'g_ij(g -> ig, q -> iq) = (1/2) d^2 F^2/dy^i dy^j', 'duality_metric',
                metric, g_ij),
        _result('duality_inverse', 'g^ij(g -> ig, q -> iq) g_jk = delta^i_k', 'duality_metric',
                inverse.dot(g_ij), np.eye(fields.dimension)),
        _result('duality_covector', 'y_i(g -> ig, q -> iq) = (1/2) dF^2/dy^i', 'duality_covector',
                covector, y_low),
    ])
    A_low = duality_substitution(fields, x, y, 'cartan_trace', kernel=k)
    A_ijk = duality_substitution(fields, x, y, 'cartan', kernel=k)
    results.append(_result('duality_cartan_trace', 'g^jk A_ijk = A_i under g -> ig, q -> iq', 'cartan_trace',
                           np.einsum('jk,ijk->i', inverse, A_ijk), A_low, scale=sup_norm(A_ijk)))
    gc, qc = duality_rule(k.g, k.q)
    results.append(_result('duality_rule', 'g/q -> g/q and g q -> -g q', 'pseudo_forms',
                           [(gc / qc).real, (gc * qc).real], [k.g / k.q, -k.g * k.q], scale=1.0))
    return results

