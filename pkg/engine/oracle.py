"""Certified numerical differentiation.

Central differences on power-of-two steps, refined by Richardson
extrapolation in even powers of the step. Every estimate carries a
certificate: the difference between the last two extrapolation levels.
"""
import dataclasses
import logging
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

from engine.constants import (
    CERTIFICATE_RTOL, EXTRAPOLATION_LEVELS, GRADIENT_STEP, HESSIAN_STEP,
    PARAMETER_STEP)
from engine.utils import (
    ConstraintViolationException, InadmissibleStencilException,
    InadmissibleVectorException, RangeClampException, StepUnderflowException,
    ZeroVectorException, as_vector, power_of_two_step, sup_norm)

logger = logging.getLogger('finsleroid')  # type: logging.Logger

# a certificate below this multiple of the scale is round-off
_NOISE = 1e-13

_options = {
    'gradient_step': GRADIENT_STEP,
    'hessian_step': HESSIAN_STEP,
    'parameter_step': PARAMETER_STEP,
    'levels': EXTRAPOLATION_LEVELS,
}  # type: t.Dict[str, t.Any]


def configure(**options):
    # type: (**t.Any) -> t.Dict[str, t.Any]
    """Replace the default steps and extrapolation levels

    Raises:
        ValueError: an unknown option or fewer than two levels

    Returns:
        t.Dict[str, t.Any]: the options now in force
    """
    unknown = set(options) - set(_options)
    if unknown:
        raise ValueError('unknown oracle options: %s' % ', '.join(sorted(unknown)))
    if options.get('levels', 2) < 2:
        raise ValueError('need at least two extrapolation levels')
    _options.update(options)
    logger.debug('oracle options %s', _options)
    return dict(_options)


@dataclasses.dataclass(frozen=True, eq=False)
class DiffResult(object):
    """A derivative estimate with its error certificate
    """
    value: np.ndarray
    certificate: float
    steps: np.ndarray
    levels: int
    # certificate of every extrapolation level, coarse to fine
    history: t.Tuple[float, ...] = ()


def _evaluate(func, point):
    # type: (t.Callable[[np.ndarray], t.Any], np.ndarray) -> np.ndarray
    try:
        return np.asarray(func(point), dtype=float)
    except (ConstraintViolationException, InadmissibleVectorException, ZeroVectorException) as e:
        raise InadmissibleStencilException('stencil point %s is not admissible: %s' % (point.tolist(), e))


def richardson(estimates):
    # type: (t.Sequence[np.ndarray]) -> t.Tuple[np.ndarray, t.Tuple[float, ...]]
    """Extrapolate estimates made with steps h, h/2, h/4, ...

    The error expansion is assumed to run in even powers of the step, as for
    central differences.

    Args:
        estimates (t.Sequence[np.ndarray]): one estimate per step, coarse to fine

    Returns:
        t.Tuple[np.ndarray, t.Tuple[float, ...]]: the extrapolated value and the
            certificate of each level
    """
    table = [[np.asarray(estimate, dtype=float)] for estimate in estimates]
    history = []
    for i in range(1, len(table)):
        for j in range(1, i + 1):
            factor = 4.0 ** j
            table[i].append(table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0))
        history.append(sup_norm(table[i][i] - table[i][i - 1]))
    return table[-1][-1], tuple(history)


def _certify(value, history, rtol, scale_floor, what):
    # type: (np.ndarray, t.Tuple[float, ...], float, float, str) -> float
    certificate = history[-1] if history else float('inf')
    scale = max(sup_norm(value), scale_floor)
    if certificate > rtol * scale:
        raise StepUnderflowException(
            '%s: certificate %.3g exceeds %.3g' % (what, certificate, rtol * scale))
    for coarse, fine in zip(history, history[1:]):
        if fine > coarse and fine > _NOISE * scale:
            raise StepUnderflowException(
                '%s: certificate grew from %.3g to %.3g' % (what, coarse, fine))
    return certificate


def _steps(x, base_step, steps):
    # type: (np.ndarray, float, t.Optional[t.Any]) -> np.ndarray
    if steps is None:
        steps = base_step * (1.0 + np.abs(x))
    steps = np.broadcast_to(np.asarray(steps, dtype=float), x.shape)
    return np.array([power_of_two_step(h) for h in steps])


def gradient(func, x, base_step=None, levels=None,
             rtol=CERTIFICATE_RTOL, steps=None, scale_floor=0.0):
    # type: (t.Callable[[np.ndarray], t.Any], t.Any, float, int, float, t.Optional[t.Any], float) -> DiffResult
    """Gradient of a scalar or tensor valued function

    Args:
        func (t.Callable): pure function of a coordinate vector
        x (t.Any): evaluation point
        base_step (float): step is base_step * (1 + |x_k|), rounded up to a power of two
        levels (int): number of step sizes, at least 2
        rtol (float): certificate tolerance relative to the result
        steps (t.Any): explicit per-coordinate steps, overriding base_step
        scale_floor (float): least magnitude the certificate is measured against

    Raises:
        StepUnderflowException: the certificate is too large
        InadmissibleStencilException: func refused a stencil point

    Returns:
        DiffResult: value[k, ...] is the derivative along coordinate k
    """
    base_step = _options['gradient_step'] if base_step is None else base_step
    levels = _options['levels'] if levels is None else levels
    if levels < 2:
        raise ValueError('need at least two extrapolation levels')
    x = as_vector(x)
    hs = _steps(x, base_step, steps)
    estimates = []
    for level in range(levels):
        columns = []
        for k in range(x.shape[0]):
            h = hs[k] / 2.0 ** level
            shift = np.zeros_like(x)
            shift[k] = h
            columns.append((_evaluate(func, x + shift) - _evaluate(func, x - shift)) / (2.0 * h))
        estimates.append(np.array(columns))
    value, history = richardson(estimates)
    certificate = _certify(value, history, rtol, scale_floor, 'gradient')
    return DiffResult(value, certificate, hs, levels, history)


def hessian(func, x, base_step=None, levels=None,
            rtol=CERTIFICATE_RTOL, steps=None, scale_floor=0.0):
    # type: (t.Callable[[np.ndarray], t.Any], t.Any, float, int, float, t.Optional[t.Any], float) -> DiffResult
    """Symmetric Hessian of a scalar function

    Arguments and errors as for gradient.

    Returns:
        DiffResult: symmetrized matrix of second derivatives
    """
    base_step = _options['hessian_step'] if base_step is None else base_step
    levels = _options['levels'] if levels is None else levels
    if levels < 2:
        raise ValueError('need at least two extrapolation levels')
    x = as_vector(x)
    n = x.shape[0]
    hs = _steps(x, base_step, steps)
    center = float(_evaluate(func, x))
    estimates = []
    for level in range(levels):
        h = hs / 2.0 ** level
        matrix = np.zeros((n, n))
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = h[i]
            plus = float(_evaluate(func, x + ei))
            minus = float(_evaluate(func, x - ei))
            matrix[i, i] = (plus - 2.0 * center + minus) / h[i] ** 2
            for j in range(i + 1, n):
                ej = np.zeros(n)
                ej[j] = h[j]
                value = (float(_evaluate(func, x + ei + ej)) - float(_evaluate(func, x + ei - ej))
                         - float(_evaluate(func, x - ei + ej)) + float(_evaluate(func, x - ei - ej)))
                matrix[i, j] = matrix[j, i] = value / (4.0 * h[i] * h[j])
        estimates.append(matrix)
    value, history = richardson(estimates)
    value = 0.5 * (value + value.T)
    certificate = _certify(value, history, rtol, scale_floor, 'hessian')
    return DiffResult(value, certificate, hs, levels, history)


def param_derivative(func, value, base_step=None, levels=None,
                     rtol=CERTIFICATE_RTOL, bounds=(-2.0, 2.0), scale_floor=0.0):
    # type: (t.Callable[[float], t.Any], float, float, int, float, t.Optional[t.Tuple[float, float]], float) -> DiffResult
    """Two-sided derivative in a scalar parameter such as the charge g

    Args:
        func (t.Callable[[float], t.Any]): function of the parameter
        value (float): the parameter value
        bounds (t.Tuple[float, float]): open range the stencil must stay in,
            None for an unbounded parameter

    Raises:
        RangeClampException: value +- step leaves the open range
        StepUnderflowException: the certificate is too large

    Returns:
        DiffResult: the derivative
    """
    base_step = _options['parameter_step'] if base_step is None else base_step
    levels = _options['levels'] if levels is None else levels
    h = power_of_two_step(base_step * (1.0 + abs(value)))
    if bounds is not None:
        lower, upper = bounds
        if not (lower < value - h and value + h < upper):
            raise RangeClampException(
                'stencil %.8g +- %.3g leaves (%g, %g)' % (value, h, lower, upper))
    result = gradient(lambda p: func(float(p[0])), [value], levels=levels, rtol=rtol,
                      steps=[h], scale_floor=scale_floor)
    return DiffResult(result.value[0], result.certificate, result.steps, levels, result.history)
