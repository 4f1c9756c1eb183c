"""Background fields of a Finsleroid-regular space.

A space is defined by a symmetric metric a_ij(x), a covector b_i(x) and a
scalar charge g(x). Every field is either constant or a polynomial in x, so
first x-derivatives are exact. Derivative arrays carry the derivative index
first: ``derivative(x)[k, ...]`` is the partial derivative along x^k.
"""
import dataclasses
import logging
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np
import scipy.linalg

from engine.constants import (
    EIGENVALUE_FLOOR, SIGNATURE_POSITIVE_DEFINITE, SIGNATURE_TIME_SPACE,
    SIGNATURES, SINGULAR_DETERMINANT)
from engine.polynomial import Polynomial
from engine.utils import (
    ChargeOutOfRangeException, NormOutOfRangeException,
    NotPositiveDefiniteException, SingularMetricException,
    WrongSignatureException, as_vector)

logger = logging.getLogger('finsleroid')  # type: logging.Logger


class ConstantField(object):
    """Field whose value does not depend on x
    """

    kind = 'constant'

    def __init__(self, value, dimension):
        # type: (t.Any, int) -> None
        self.value = np.array(value, dtype=float)
        self.value.setflags(write=False)
        self.dimension = dimension

    @property
    def shape(self):
        # type: () -> t.Tuple[int, ...]
        return self.value.shape

    @property
    def is_constant(self):
        # type: () -> bool
        return True

    def evaluate(self, x):
        # type: (np.ndarray) -> np.ndarray
        return self.value.copy()

    def derivative(self, x):
        # type: (np.ndarray) -> np.ndarray
        return np.zeros((self.dimension,) + self.shape)

    def to_json(self):
        # type: () -> t.Dict[str, t.Any]
        return {'kind': self.kind, 'value': self.value.tolist()}


class PolynomialField(object):
    """Field whose components are polynomials in x

    Stored as an exponent matrix ``powers`` of shape (T, N) and a coefficient
    tensor ``coeffs`` of shape (T,) + field shape: the value is
    sum_t coeffs[t] * prod_k x_k ** powers[t, k].
    """

    kind = 'polynomial'

    def __init__(self, powers, coeffs, shape=None):
        # type: (t.Any, t.Any, t.Optional[t.Tuple[int, ...]]) -> None
        self.powers = np.array(powers, dtype=int)
        if self.powers.ndim != 2:
            raise ValueError('powers must be a (terms, dimension) matrix')
        if np.any(self.powers < 0):
            raise ValueError('polynomial exponents must be non-negative')
        self.coeffs = np.array(coeffs, dtype=float)
        if self.coeffs.shape[:1] != self.powers.shape[:1]:
            raise ValueError('need one coefficient per term')
        if shape is not None and self.coeffs.shape[1:] != tuple(shape):
            raise ValueError('coefficients have shape %r, expected %r' % (self.coeffs.shape[1:], tuple(shape)))
        self.powers.setflags(write=False)
        self.coeffs.setflags(write=False)
        self.dimension = self.powers.shape[1]

    @classmethod
    def from_polynomials(cls, polynomials, dimension):
        # type: (t.Any, int) -> PolynomialField
        """Collect an array of Polynomial components into one field

        Args:
            polynomials (t.Any): nested lists (or a single Polynomial) with the
                field shape
            dimension (int): number of variables

        Returns:
            PolynomialField: the field
        """
        components = np.empty(np.shape(polynomials) if not isinstance(polynomials, Polynomial) else (),
                              dtype=object)
        if isinstance(polynomials, Polynomial):
            components[()] = polynomials
        else:
            for index in np.ndindex(components.shape):
                value = polynomials
                for i in index:
                    value = value[i]
                components[index] = value
        exponents = sorted({powers for poly in components.flat for powers in poly.terms})
        if not exponents:
            exponents = [(0,) * dimension]
        coeffs = np.zeros((len(exponents),) + components.shape)
        for row, powers in enumerate(exponents):
            for index in np.ndindex(components.shape):
                coeffs[(row,) + index] = components[index].terms.get(powers, 0.0)
        return cls(exponents, coeffs)

    @property
    def shape(self):
        # type: () -> t.Tuple[int, ...]
        return self.coeffs.shape[1:]

    @property
    def is_constant(self):
        # type: () -> bool
        moving = np.any(self.powers > 0, axis=1)
        return not np.any(self.coeffs[moving] != 0)

    def _monomials(self, x, powers):
        # type: (np.ndarray, np.ndarray) -> np.ndarray
        return np.prod(np.asarray(x, dtype=float)[np.newaxis, :] ** powers, axis=1)

    def evaluate(self, x):
        # type: (np.ndarray) -> np.ndarray
        return np.tensordot(self._monomials(x, self.powers), self.coeffs, axes=(0, 0))

    def derivative(self, x):
        # type: (np.ndarray) -> np.ndarray
        result = np.zeros((self.dimension,) + self.shape)
        for k in range(self.dimension):
            factor = self.powers[:, k].astype(float)
            if not np.any(factor):
                continue
            lowered = self.powers.copy()
            lowered[:, k] = np.maximum(lowered[:, k] - 1, 0)
            weights = factor * self._monomials(x, lowered)
            result[k] = np.tensordot(weights, self.coeffs, axes=(0, 0))
        return result

    def to_json(self):
        # type: () -> t.Dict[str, t.Any]
        return {
            'kind': self.kind,
            'terms': [{'coeff': coeff.tolist(), 'powers': powers.tolist()}
                      for powers, coeff in zip(self.powers, self.coeffs)],
        }


@dataclasses.dataclass(frozen=True, eq=False)
class FieldSet(object):
    """The background data (a_ij(x), b_i(x), g(x)) defining the space
    """
    dimension: int
    signature: str
    a: t.Any
    b: t.Any
    g: t.Any

    def __post_init__(self):
        if self.signature not in SIGNATURES:
            raise ValueError('signature must be one of %s' % ', '.join(sorted(SIGNATURES)))
        if self.dimension < 2:
            raise ValueError('dimension must be at least 2')
        for name, shape in (('a', (self.dimension, self.dimension)), ('b', (self.dimension,)), ('g', ())):
            field = getattr(self, name)
            if tuple(field.shape) != shape:
                raise ValueError('field %s has shape %r, expected %r' % (name, tuple(field.shape), shape))
            if field.dimension != self.dimension:
                raise ValueError('field %s is defined in %d variables' % (name, field.dimension))

    @property
    def positive_definite(self):
        # type: () -> bool
        return self.signature == SIGNATURE_POSITIVE_DEFINITE

    def with_charge(self, value):
        # type: (float) -> FieldSet
        """The same space with the charge replaced by a constant
        """
        return dataclasses.replace(self, g=ConstantField(value, self.dimension))

    def to_json(self):
        # type: () -> t.Dict[str, t.Any]
        return {'a': self.a.to_json(), 'b': self.b.to_json(), 'g': self.g.to_json()}


def constant_fields(a, b, g, signature=SIGNATURE_POSITIVE_DEFINITE):
    # type: (t.Any, t.Any, float, str) -> FieldSet
    """Build a FieldSet out of constant a_ij, b_i and g
    """
    b = as_vector(b)
    dimension = b.shape[0]
    return FieldSet(dimension, signature,
                    ConstantField(a, dimension), ConstantField(b, dimension), ConstantField(g, dimension))


def lu_determinant(matrix):
    # type: (np.ndarray) -> float
    """Determinant from an LU factorization with partial pivoting
    """
    lu, piv = scipy.linalg.lu_factor(matrix, check_finite=False)
    swaps = np.count_nonzero(piv != np.arange(piv.shape[0]))
    return float((-1.0) ** swaps * np.prod(np.diag(lu)))


def metric_at(fields, x):
    # type: (FieldSet, np.ndarray) -> t.Tuple[np.ndarray, np.ndarray, float]
    """Evaluate the metric, its inverse and its determinant at x

    Args:
        fields (FieldSet): the space
        x (np.ndarray): the point

    Raises:
        NotPositiveDefiniteException: positive-definite case with a non-positive eigenvalue
        WrongSignatureException: time-space case whose signature is not (+,-,...,-)
        SingularMetricException: vanishing determinant

    Returns:
        t.Tuple[np.ndarray, np.ndarray, float]: a_ij, a^ij and det(a)
    """
    x = as_vector(x, fields.dimension)
    a = fields.a.evaluate(x)
    a = 0.5 * (a + a.T)
    eigenvalues = scipy.linalg.eigh(a, eigvals_only=True, check_finite=False)
    floor = EIGENVALUE_FLOOR * max(float(np.sum(np.abs(eigenvalues))), 1.0)
    if fields.positive_definite:
        if eigenvalues[0] <= floor:
            raise NotPositiveDefiniteException(
                'a_ij has eigenvalue %.6g at x = %s' % (eigenvalues[0], x.tolist()))
    else:
        positive = int(np.sum(eigenvalues > floor))
        negative = int(np.sum(eigenvalues < -floor))
        if positive != 1 or negative != fields.dimension - 1:
            raise WrongSignatureException(
                'a_ij has %d positive and %d negative eigenvalues at x = %s' % (positive, negative, x.tolist()))
    lu_piv = scipy.linalg.lu_factor(a, check_finite=False)
    det = lu_determinant(a)
    if abs(det) <= SINGULAR_DETERMINANT:
        raise SingularMetricException('det(a) = %.6g at x = %s' % (det, x.tolist()))
    a_inv = scipy.linalg.lu_solve(lu_piv, np.eye(fields.dimension), check_finite=False)
    a_inv = 0.5 * (a_inv + a_inv.T)
    return a, a_inv, det


def norm_squared(fields, x, a_inv=None):
    # type: (FieldSet, np.ndarray, t.Optional[np.ndarray]) -> float
    """c(x)^2 = a^ij b_i b_j, without any range check
    """
    if a_inv is None:
        a_inv = metric_at(fields, x)[1]
    b = fields.b.evaluate(as_vector(x, fields.dimension))
    return float(b.dot(a_inv).dot(b))


def norm_c(fields, x, a_inv=None):
    # type: (FieldSet, np.ndarray, t.Optional[np.ndarray]) -> float
    """The Riemannian norm c of the 1-form b at x

    Raises:
        NormOutOfRangeException: if 0 < c < 1 fails; in the time-space case
            only c^2 <= 0 raises, c >= 1 logs a warning

    Returns:
        float: c
    """
    c2 = norm_squared(fields, x, a_inv)
    if c2 <= 0.0:
        raise NormOutOfRangeException('c^2 = %.6g <= 0: the 1-form b must not vanish' % c2)
    c = float(np.sqrt(c2))
    if c >= 1.0:
        if fields.positive_definite:
            raise NormOutOfRangeException('c = %.6g violates 0 < c < 1' % c)
        logger.warning('c = %.6g >= 1 in the time-space case at x = %s', c, np.asarray(x).tolist())
    return c


def charge_at(fields, x):
    # type: (FieldSet, np.ndarray) -> float
    """The Finsleroid charge g(x)

    Raises:
        ChargeOutOfRangeException: positive-definite case with |g| >= 2
    """
    g = float(fields.g.evaluate(as_vector(x, fields.dimension)))
    if fields.positive_definite and not -2.0 < g < 2.0:
        raise ChargeOutOfRangeException('g = %.6g violates -2 < g < 2' % g)
    return g


def validate_point(fields, x):
    # type: (FieldSet, np.ndarray) -> t.Tuple[float, float]
    """Check every field constraint at x

    Returns:
        t.Tuple[float, float]: c and g at x
    """
    a_inv = metric_at(fields, x)[1]
    return norm_c(fields, x, a_inv), charge_at(fields, x)


def riemann_christoffel(fields, x, a_inv=None):
    # type: (FieldSet, np.ndarray, t.Optional[np.ndarray]) -> np.ndarray
    """Christoffel symbols a^k_ij of the associated Riemannian metric

    Returns:
        np.ndarray: array indexed [k, i, j], symmetric in (i, j)
    """
    x = as_vector(x, fields.dimension)
    if a_inv is None:
        a_inv = metric_at(fields, x)[1]
    # da[k, i, j] = d_k a_ij
    da = fields.a.derivative(x)
    # lowered[n, i, j] = d_j a_ni + d_i a_nj - d_n a_ji
    lowered = np.einsum('jni->nij', da) + np.einsum('inj->nij', da) - da
    symbols = 0.5 * np.einsum('kn,nij->kij', a_inv, lowered)
    return 0.5 * (symbols + np.swapaxes(symbols, 1, 2))


def covariant_derivative_b(fields, x, a_inv=None):
    # type: (FieldSet, np.ndarray, t.Optional[np.ndarray]) -> np.ndarray
    """Riemannian covariant derivative nabla_i b_j = d_i b_j - b_k a^k_ij
    """
    x = as_vector(x, fields.dimension)
    christoffel = riemann_christoffel(fields, x, a_inv)
    return fields.b.derivative(x) - np.einsum('k,kij->ij', fields.b.evaluate(x), christoffel)


def f_tensors(fields, x, y, a_inv=None):
    # type: (FieldSet, np.ndarray, np.ndarray, t.Optional[np.ndarray]) -> t.Tuple[np.ndarray, np.ndarray, np.ndarray]
    """The curl of b and its contractions with y

    Returns:
        t.Tuple[np.ndarray, np.ndarray, np.ndarray]: f_mn = d_m b_n - d_n b_m,
            f_j = f_jn y^n and f^i = a^ik f_kn y^n
    """
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    if a_inv is None:
        a_inv = metric_at(fields, x)[1]
    db = fields.b.derivative(x)
    f_mn = db - db.T
    f_low = f_mn.dot(y)
    return f_mn, f_low, a_inv.dot(f_low)


def charge_gradient(fields, x, y):
    # type: (FieldSet, np.ndarray, np.ndarray) -> t.Tuple[np.ndarray, float]
    """Gradient g_h of the charge and its contraction (yg) = g_h y^h
    """
    grad = fields.g.derivative(as_vector(x, fields.dimension)).reshape(fields.dimension)
    return grad, float(grad.dot(as_vector(y, fields.dimension)))
