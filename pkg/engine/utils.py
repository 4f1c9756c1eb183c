# Store utilities for use in the engine so that it can exist by itself
# without the django layer on top of it
import logging
import math
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

logger = logging.getLogger('finsleroid')  # type: logging.Logger


class FinsleroidException(Exception):
    """Base Exception for custom FinsleroidExceptions
    """
    def __init__(self, *args, **kwargs):
        super(FinsleroidException, self).__init__(*args, **kwargs)


class _DefaultMessageException(FinsleroidException):
    """Exception which falls back to a class level default message
    """
    default_message = 'Finsleroid error'

    def __init__(self, *args, **kwargs):
        if not (args or kwargs):
            args = (self.default_message,)
        # Call super constructor
        super(_DefaultMessageException, self).__init__(*args, **kwargs)


class NotPositiveDefiniteException(_DefaultMessageException):
    """Exception for a Riemannian metric a_ij which is not positive-definite
    """
    default_message = 'The metric a_ij is not positive-definite'


class WrongSignatureException(_DefaultMessageException):
    """Exception for a metric whose signature is not the requested one
    """
    default_message = 'The metric a_ij does not have the time-space signature (+,-,...,-)'


class SingularMetricException(_DefaultMessageException):
    """Exception for a metric with vanishing determinant
    """
    default_message = 'The metric a_ij is singular'


class ConstraintViolationException(_DefaultMessageException):
    """Exception for background fields leaving their admissible range
    """
    default_message = 'The background fields violate their constraints'


class NormOutOfRangeException(ConstraintViolationException):
    """Exception for a 1-form whose norm c does not satisfy 0 < c < 1
    """
    default_message = 'The norm c of the 1-form b must satisfy 0 < c < 1'


class ChargeOutOfRangeException(ConstraintViolationException):
    """Exception for a Finsleroid charge outside -2 < g < 2
    """
    default_message = 'The Finsleroid charge must satisfy -2 < g < 2'


class ZeroVectorException(_DefaultMessageException):
    """Exception for the excluded zero tangent vector
    """
    default_message = 'The zero tangent vector y = 0 is excluded'


class AxisPlaneException(_DefaultMessageException):
    """Exception for vectors on the plane b = 0 where w = q/b is undefined
    """
    default_message = 'The generating function V(w) is undefined on the plane b = 0'


class StepUnderflowException(_DefaultMessageException):
    """Exception for a finite difference estimate which did not converge
    """
    default_message = 'Richardson extrapolation did not converge'


class InadmissibleStencilException(_DefaultMessageException):
    """Exception for a finite difference stencil leaving the admissible domain
    """
    default_message = 'A finite difference stencil point is not admissible'


class RangeClampException(_DefaultMessageException):
    """Exception for a parameter stencil crossing the end of its range
    """
    default_message = 'The parameter stencil crosses the end of the admissible range'


class InadmissibleVectorException(_DefaultMessageException):
    """Exception for tangent vectors outside the pseudo-Finsleroid domain
    """
    default_message = 'The vector is outside the domain b > 0, S^2 > 0, b^2 - S^2 > 0, B != 0'


class OddDegreeMonomialException(_DefaultMessageException):
    """Exception for a duality substitution which left an imaginary part
    """
    default_message = 'The substituted expression carries an odd degree monomial in (g, q)'


class LeftAdmissibleDomainException(_DefaultMessageException):
    """Exception for a geodesic which left the admissible domain

    The trajectory integrated so far is kept on the exception so that
    callers can still flush it.
    """
    default_message = 'The geodesic left the admissible domain'

    def __init__(self, *args, **kwargs):
        self.trajectory = kwargs.pop('trajectory', None)
        super(LeftAdmissibleDomainException, self).__init__(*args, **kwargs)


class StepRejectedException(_DefaultMessageException):
    """Exception for an integrator step which produced an unusable state
    """
    default_message = 'The integrator step was rejected'


class ScenarioException(_DefaultMessageException):
    """Exception for a scenario which does not pass schema validation
    """
    default_message = 'The scenario is not valid'

    def __init__(self, *args, **kwargs):
        self.errors = kwargs.pop('errors', None) or {}
        super(ScenarioException, self).__init__(*args, **kwargs)


class MalformedReportException(_DefaultMessageException):
    """Exception for a report file which cannot be rendered
    """
    default_message = 'The report is malformed'


def as_vector(values, dimension=None):
    # type: (t.Iterable[float], t.Optional[int]) -> np.ndarray
    """Convert a sequence into a float vector

    Args:
        values (t.Iterable[float]): the components
        dimension (int): the expected number of components, if known

    Raises:
        ValueError: if the number of components does not match

    Returns:
        np.ndarray: 1-d float array
    """
    vector = np.asarray(values, dtype=float).reshape(-1)
    if dimension is not None and vector.shape[0] != dimension:
        raise ValueError('expected %d components, got %d' % (dimension, vector.shape[0]))
    return vector


def sup_norm(value):
    # type: (t.Any) -> float
    """Max absolute entry of a scalar or an array
    """
    value = np.asarray(value)
    if value.size == 0:
        return 0.0
    return float(np.max(np.abs(value)))


def relative_residual(lhs, rhs, scale=None):
    # type: (t.Any, t.Any, t.Optional[float]) -> float
    """Relative sup-norm distance between two sides of an identity

    The denominator is the largest of |lhs|, |rhs| and the optional scale,
    so identities whose both sides vanish can pass a natural magnitude in.

    Args:
        lhs (t.Any): left hand side
        rhs (t.Any): right hand side
        scale (float): natural magnitude of the identity

    Returns:
        float: the relative residual
    """
    denominator = max(sup_norm(lhs), sup_norm(rhs), scale or 0.0)
    difference = sup_norm(np.asarray(lhs) - np.asarray(rhs))
    if denominator == 0.0:
        return difference
    return difference / denominator


def power_of_two_step(step):
    # type: (float) -> float
    """Round a finite difference step up to the next power of two

    Stencil points x +- h are then exact in binary floating point.
    """
    if step <= 0.0 or not math.isfinite(step):
        raise ValueError('step must be positive and finite, got %r' % step)
    return 2.0 ** math.ceil(math.log2(step))
