"""Pointwise scalars of the positive-definite Finsleroid-regular metric.

With b = b_i y^i, S^2 = a_ij y^i y^j and q = sqrt(S^2 - b^2) the metric
function is K = sqrt(B) J where B = b^2 + g q b + q^2 is the characteristic
quadratic form and J = exp(-G f / 2) carries the angle f of (b, q).
"""
import dataclasses
import logging
import math
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

from engine import fields as fields_mod
from engine.constants import (
    AXIS_PLANE, GENERATING_FIRST_STEP, GENERATING_LEVELS,
    GENERATING_SECOND_STEP)
from engine.oracle import gradient, hessian
from engine.utils import (
    AxisPlaneException, WrongSignatureException, ZeroVectorException,
    as_vector)

logger = logging.getLogger('finsleroid')  # type: logging.Logger


@dataclasses.dataclass(frozen=True, eq=False)
class ScalarKernel(object):
    """Every pointwise scalar at (x, y)

    The tensor formulas only read b, S2, q, g, c2, B, K, nu, inv_x and
    dimension, so a kernel built from substituted values of those is enough
    to evaluate them.
    """
    dimension: int
    b: t.Any
    S2: t.Any
    q: t.Any
    g: t.Any
    c2: float
    B: t.Any
    K: t.Any
    nu: t.Any
    # 1/X = N + (1 - c^2) B / (q nu)
    inv_x: t.Any
    S: t.Optional[float] = None
    # w = q / b, None on the axis plane
    w: t.Optional[float] = None
    L: t.Optional[float] = None
    f: t.Optional[float] = None
    J: t.Optional[float] = None
    h: t.Optional[float] = None
    G: t.Optional[float] = None
    g_plus: t.Optional[float] = None
    g_minus: t.Optional[float] = None
    eta: t.Optional[float] = None
    D_B: t.Optional[float] = None
    x: t.Optional[np.ndarray] = None
    y: t.Optional[np.ndarray] = None

    @property
    def c(self):
        # type: () -> float
        return math.sqrt(self.c2)

    @property
    def X(self):
        # type: () -> t.Any
        return 1.0 / self.inv_x


def charge_combinations(g):
    # type: (float) -> t.Tuple[float, float, float, float]
    """h = sqrt(1 - g^2/4), G = g/h, g_+ = g/2 + h and g_- = g/2 - h
    """
    h = math.sqrt(1.0 - 0.25 * g * g)
    return h, g / h, 0.5 * g + h, 0.5 * g - h


def angle(b, L, h, G):
    # type: (float, float, float, float) -> float
    """The angle scalar f, principal arctan on both sides of b = 0
    """
    if b > 0.0:
        return -math.atan(0.5 * G) + math.atan(L / (h * b))
    if b < 0.0:
        return math.pi - math.atan(0.5 * G) + math.atan(L / (h * b))
    # common limit of both branches
    return 0.5 * math.pi - math.atan(0.5 * G)


def metric_function(b, q, g):
    # type: (float, float, float) -> float
    """K as a function of (b, q) at a fixed charge
    """
    h, G, _, _ = charge_combinations(g)
    B = b * b + g * q * b + q * q
    return math.sqrt(B) * math.exp(-0.5 * G * angle(b, q + 0.5 * g * b, h, G))


def kernel_scalars(b, q, g, c2, dimension, S2=None):
    # type: (float, float, float, float, int, t.Optional[float]) -> ScalarKernel
    """Assemble the ScalarKernel out of (b, q, g, c^2)
    """
    if S2 is None:
        S2 = b * b + q * q
    h, G, g_plus, g_minus = charge_combinations(g)
    B = b * b + g * q * b + q * q
    L = q + 0.5 * g * b
    f = angle(b, L, h, G)
    J = math.exp(-0.5 * G * f)
    K = math.sqrt(B) * J
    nu = q + (1.0 - c2) * g * b
    inv_x = dimension + (1.0 - c2) * B / (q * nu)
    c = math.sqrt(c2)
    eta = 1.0 / (1.0 + g * c * math.sqrt(1.0 - c2))
    w = q / b if b != 0.0 else None
    return ScalarKernel(
        dimension=dimension, b=b, S2=S2, q=q, g=g, c2=c2, B=B, K=K, nu=nu, inv_x=inv_x,
        S=math.sqrt(S2), w=w, L=L, f=f, J=J, h=h, G=G, g_plus=g_plus, g_minus=g_minus,
        eta=eta, D_B=-4.0 * h * h)


def eval_kernel(fields, x, y, metric=None):
    # type: (fields_mod.FieldSet, t.Any, t.Any, t.Optional[t.Tuple[np.ndarray, np.ndarray, float]]) -> ScalarKernel
    """Compute every kernel scalar at (x, y)

    Args:
        fields (FieldSet): a positive-definite space
        x (t.Any): the point
        y (t.Any): the tangent vector
        metric (t.Tuple): a_ij, a^ij, det(a) at x if already known

    Raises:
        ZeroVectorException: y = 0
        ConstraintViolationException: c or g out of range at x
        WrongSignatureException: the space is not positive-definite

    Returns:
        ScalarKernel: the scalars
    """
    if not fields.positive_definite:
        raise WrongSignatureException('eval_kernel needs a positive-definite space, use the pseudo kernel')
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    if not np.any(y):
        raise ZeroVectorException()
    a, a_inv, _ = metric if metric is not None else fields_mod.metric_at(fields, x)
    c = fields_mod.norm_c(fields, x, a_inv)
    g = fields_mod.charge_at(fields, x)
    b = float(fields.b.evaluate(x).dot(y))
    S2 = float(y.dot(a).dot(y))
    q = math.sqrt(max(S2 - b * b, 0.0))
    if q <= 0.0:
        raise ZeroVectorException('q vanishes at y = %s' % y.tolist())
    kernel = kernel_scalars(b, q, g, c * c, fields.dimension, S2)
    return dataclasses.replace(kernel, x=x, y=y)


def finsler_norm(fields, x, y):
    # type: (fields_mod.FieldSet, t.Any, t.Any) -> float
    """The Finsleroid-regular metric function K(x, y)
    """
    return eval_kernel(fields, x, y).K


def _generating(b, g):
    # type: (float, float) -> t.Callable[[np.ndarray], float]
    def generating(w):
        return metric_function(b, float(w[0]) * b, g) / b
    return generating


def generating_V(fields, x, y, kernel=None):
    # type: (fields_mod.FieldSet, t.Any, t.Any, t.Optional[ScalarKernel]) -> t.Tuple[float, float, float]
    """The generating function V(w) with K = b V and its w-derivatives

    The derivatives are certified central differences in w; the steps scale
    with the distance from w to the complex zeros w = -g/2 +- ih of
    1 + g w + w^2.

    Raises:
        AxisPlaneException: b = 0, where w = q/b is undefined

    Returns:
        t.Tuple[float, float, float]: V, V' and V''
    """
    if kernel is None:
        kernel = eval_kernel(fields, x, y)
    if abs(kernel.b) <= AXIS_PLANE * kernel.S:
        raise AxisPlaneException('b = %.3g is on the axis plane' % kernel.b)
    w = kernel.q / kernel.b
    func = _generating(kernel.b, kernel.g)
    distance = math.hypot(w + 0.5 * kernel.g, kernel.h)
    first = gradient(func, [w], levels=GENERATING_LEVELS, steps=[GENERATING_FIRST_STEP * distance])
    second = hessian(func, [w], levels=GENERATING_LEVELS, steps=[GENERATING_SECOND_STEP * distance])
    return kernel.K / kernel.b, float(first.value[0]), float(second.value[0, 0])
