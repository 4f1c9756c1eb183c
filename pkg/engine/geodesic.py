"""Geodesic flow x'' + G(x, x') = 0 of the Finsleroid-regular spray.

Fixed-step classical Runge-Kutta on the first order system (x, y) with
y = dx/dt. K(x(t), y(t)) is a first integral and is tracked on every state.
"""
import dataclasses
import logging
import math
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

from engine import fields as fields_mod
from engine.kernel import finsler_norm
from engine.spray import CHARGE_NUMERIC, spray_closed_form
from engine.utils import (
    ConstraintViolationException, LeftAdmissibleDomainException,
    NotPositiveDefiniteException, SingularMetricException,
    StepRejectedException, as_vector, sup_norm)

logger = logging.getLogger('finsleroid')  # type: logging.Logger

# classical fourth order tableau
_RK4_NODES = (0.0, 0.5, 0.5, 1.0)
_RK4_WEIGHTS = (1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0)

_LEAVING = (ConstraintViolationException, NotPositiveDefiniteException, SingularMetricException)


@dataclasses.dataclass(frozen=True, eq=False)
class GeodesicState(object):
    t: float
    x: np.ndarray
    y: np.ndarray
    K: float
    # |K - K(0)| / K(0)
    residual: float

    def row(self):
        # type: () -> t.List[float]
        return [self.t] + self.x.tolist() + self.y.tolist() + [self.K, self.residual]


@dataclasses.dataclass(eq=False)
class Trajectory(object):
    """States of one integrated geodesic, in parameter order
    """
    dimension: int
    step: float
    states: t.List[GeodesicState] = dataclasses.field(default_factory=list)
    complete: bool = False

    @property
    def end(self):
        # type: () -> GeodesicState
        return self.states[-1]

    @property
    def drift(self):
        # type: () -> float
        """Largest relative K drift along the trajectory"""
        return max(state.residual for state in self.states) if self.states else 0.0

    def header(self):
        # type: () -> t.List[str]
        return (['t'] + ['x%d' % i for i in range(self.dimension)]
                + ['y%d' % i for i in range(self.dimension)] + ['K', 'residual'])

    def rows(self):
        # type: () -> t.List[t.List[float]]
        return [state.row() for state in self.states]


def _rhs(fields, x, y, method):
    # type: (fields_mod.FieldSet, np.ndarray, np.ndarray, str) -> t.Tuple[np.ndarray, np.ndarray]
    return y, -spray_closed_form(fields, x, y, method).G


def rk4_step(fields, x, y, h, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, np.ndarray, np.ndarray, float, str) -> t.Tuple[np.ndarray, np.ndarray]
    """One classical Runge-Kutta step of length h
    """
    dx, dy = [], []  # type: t.List[np.ndarray], t.List[np.ndarray]
    for node in _RK4_NODES:
        if dx:
            xs, ys = x + node * h * dx[-1], y + node * h * dy[-1]
        else:
            xs, ys = x, y
        kx, ky = _rhs(fields, xs, ys, method)
        dx.append(kx)
        dy.append(ky)
    x_new = x + h * sum(w * k for w, k in zip(_RK4_WEIGHTS, dx))
    y_new = y + h * sum(w * k for w, k in zip(_RK4_WEIGHTS, dy))
    return x_new, y_new


def geodesic_integrate(fields, x0, y0, t_end, step, method=CHARGE_NUMERIC):
    # type: (fields_mod.FieldSet, t.Any, t.Any, float, float, str) -> Trajectory
    """Integrate the geodesic through (x0, y0) over [0, t_end]

    The step is shrunk uniformly so that a whole number of steps lands on t_end.

    Args:
        fields (FieldSet): a positive-definite space
        x0 (t.Any): initial point
        y0 (t.Any): initial velocity
        t_end (float): final parameter
        step (float): requested step size

    Raises:
        StepRejectedException: non-positive step or a non-finite state
        LeftAdmissibleDomainException: c or g left their range along the
            path; the partial trajectory rides on the exception

    Returns:
        Trajectory: every state from t = 0 to t = t_end
    """
    if not step > 0.0 or not math.isfinite(step):
        raise StepRejectedException('step must be positive, got %r' % step)
    if not t_end > 0.0 or not math.isfinite(t_end):
        raise StepRejectedException('t_end must be positive, got %r' % t_end)
    x = as_vector(x0, fields.dimension)
    y = as_vector(y0, fields.dimension)
    count = max(1, int(math.ceil(t_end / step - 1e-9)))
    h = t_end / count
    trajectory = Trajectory(dimension=fields.dimension, step=h)
    fields_mod.validate_point(fields, x)
    K0 = finsler_norm(fields, x, y)
    trajectory.states.append(GeodesicState(0.0, x, y, K0, 0.0))
    for index in range(1, count + 1):
        try:
            x, y = rk4_step(fields, x, y, h, method)
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
                raise StepRejectedException('non-finite state at t = %.6g' % (index * h))
            fields_mod.validate_point(fields, x)
            K = finsler_norm(fields, x, y)
        except _LEAVING as e:
            logger.warning('geodesic left the admissible domain near t = %.6g: %s', index * h, e)
            raise LeftAdmissibleDomainException(
                'geodesic left the admissible domain near t = %.6g: %s' % (index * h, e),
                trajectory=trajectory)
        trajectory.states.append(GeodesicState(index * h, x, y, K, abs(K - K0) / K0))
    trajectory.complete = True
    logger.debug('geodesic integrated with %d steps, K drift %.3g', count, trajectory.drift)
    return trajectory


def convergence_ratio(fields, x0, y0, t_end, step, method=CHARGE_NUMERIC, refinement=16):
    # type: (fields_mod.FieldSet, t.Any, t.Any, float, float, str, int) -> float
    """Endpoint error at step over endpoint error at step/2

    The reference endpoint comes from a run with step/refinement; a fourth
    order integrator gives a ratio close to 16.
    """
    coarse = geodesic_integrate(fields, x0, y0, t_end, step, method).end
    fine = geodesic_integrate(fields, x0, y0, t_end, 0.5 * step, method).end
    reference = geodesic_integrate(fields, x0, y0, t_end, step / refinement, method).end
    coarse_error = sup_norm(np.concatenate([coarse.x - reference.x, coarse.y - reference.y]))
    fine_error = sup_norm(np.concatenate([fine.x - reference.x, fine.y - reference.y]))
    if fine_error == 0.0:
        return float('inf')
    return coarse_error / fine_error
