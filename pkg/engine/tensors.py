"""Closed-form Finslerian tensors of the positive-definite space.

Three representation families are implemented: the z-form (through
z_i = b v_i - q^2 b_i, singular on b = 0), the v-form (through
v_i = u_i - b b_i, used in production) and the u-form (through u_i = a_ij y^j).
The formulas only touch the kernel scalars b, S2, q, g, c2, B, K, nu and
inv_x, so they also evaluate under complex substituted kernels.
"""
import dataclasses
import logging
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

from engine import fields as fields_mod
from engine.constants import SMALL_CHARGE, ZERO_CHARGE, Z_FORM_PLANE
from engine.kernel import ScalarKernel, eval_kernel, generating_V
from engine.oracle import gradient, hessian
from engine.utils import FinsleroidException, as_vector, relative_residual, sup_norm

logger = logging.getLogger('finsleroid')  # type: logging.Logger

REPRESENTATIONS = ('z', 'v', 'u')


@dataclasses.dataclass(frozen=True, eq=False)
class EtaTensors(object):
    """eta_ij = r_ij - v_i v_j / q^2 in its three index placements
    """
    lower: np.ndarray
    mixed: np.ndarray
    upper: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class AuxiliaryVectors(object):
    """The auxiliary vectors together with the Riemannian data they came from
    """
    y: np.ndarray
    a: np.ndarray
    a_inv: np.ndarray
    det_a: float
    b_low: np.ndarray
    b_up: np.ndarray
    u: np.ndarray
    v_up: np.ndarray
    v_low: np.ndarray
    z: np.ndarray
    e: np.ndarray
    r: np.ndarray
    r_up: np.ndarray
    r_mixed: np.ndarray
    eta: EtaTensors

    @property
    def z_up(self):
        # type: () -> np.ndarray
        return self.a_inv.dot(self.z)


@dataclasses.dataclass(frozen=True, eq=False)
class TensorBundle(object):
    y_low: np.ndarray
    metric: np.ndarray
    inverse: np.ndarray
    angular: np.ndarray
    det: t.Any


@dataclasses.dataclass(frozen=True, eq=False)
class CartanData(object):
    """Cartan tensor, its trace in both index placements and A^i A_i

    zero_charge marks g = 0 where every entry vanishes; small_charge marks
    the charges for which the reducible representation is ill conditioned.
    """
    A_low: np.ndarray
    A_up: np.ndarray
    A_ijk: np.ndarray
    normsq: t.Any
    zero_charge: bool
    small_charge: bool


@dataclasses.dataclass(frozen=True, eq=False)
class PointTensors(object):
    kernel: ScalarKernel
    aux: AuxiliaryVectors
    bundle: TensorBundle
    cartan: CartanData


@dataclasses.dataclass(frozen=True)
class IdentityResult(object):
    """Relative residual of one identity at one point
    """
    name: str
    reference: str
    category: str
    residual: float
    note: str = ''


def auxiliary_from_metric(kernel, a, a_inv, det_a, b_low, y):
    # type: (ScalarKernel, np.ndarray, np.ndarray, float, np.ndarray, np.ndarray) -> AuxiliaryVectors
    """Auxiliary vectors from already evaluated Riemannian data
    """
    n = y.shape[0]
    q2 = kernel.q * kernel.q
    b = kernel.b
    b_up = a_inv.dot(b_low)
    u = a.dot(y)
    v_up = y - b * b_up
    v_low = u - b * b_low
    z = b * v_low - q2 * b_low
    e = -b_low + b * v_low / q2
    r = a - np.outer(b_low, b_low)
    r_up = a_inv - np.outer(b_up, b_up)
    r_mixed = np.eye(n) - np.outer(b_up, b_low)
    eta = EtaTensors(
        lower=r - np.outer(v_low, v_low) / q2,
        mixed=r_mixed - np.outer(v_up, v_low) / q2,
        upper=r_up - np.outer(v_up, v_up) / q2)
    return AuxiliaryVectors(
        y=y, a=a, a_inv=a_inv, det_a=det_a, b_low=b_low, b_up=b_up, u=u, v_up=v_up,
        v_low=v_low, z=z, e=e, r=r, r_up=r_up, r_mixed=r_mixed, eta=eta)


def auxiliary_vectors(kernel, fields, x, y, metric=None):
    # type: (ScalarKernel, fields_mod.FieldSet, t.Any, t.Any, t.Optional[t.Tuple[np.ndarray, np.ndarray, float]]) -> AuxiliaryVectors
    """u_i, v^i, v_i, z_i, e_i, r_ij and the eta-tensors at (x, y)
    """
    x = as_vector(x, fields.dimension)
    y = as_vector(y, fields.dimension)
    a, a_inv, det_a = metric if metric is not None else fields_mod.metric_at(fields, x)
    return auxiliary_from_metric(kernel, a, a_inv, det_a, fields.b.evaluate(x), y)


def covariant_y(kernel, aux, form='v'):
    # type: (ScalarKernel, AuxiliaryVectors, str) -> np.ndarray
    """The covariant tangent vector y_i = (1/2) dK^2/dy^i
    """
    k = kernel
    factor = k.K * k.K / k.B
    if form == 'z':
        return (k.B * aux.b_low + aux.z) * factor / k.b
    if form == 'v':
        return (aux.v_low + (k.b + k.g * k.q) * aux.b_low) * factor
    if form == 'u':
        return (aux.u + k.g * k.q * aux.b_low) * factor
    raise ValueError('unknown representation %r' % form)


def _sym(left, right):
    # type: (np.ndarray, np.ndarray) -> np.ndarray
    return np.outer(left, right) + np.outer(right, left)


def metric_tensor(kernel, aux, form='v'):
    # type: (ScalarKernel, AuxiliaryVectors, str) -> np.ndarray
    """The Finslerian metric tensor g_ij = (1/2) d^2 K^2 / dy^i dy^j
    """
    k = kernel
    K2 = k.K * k.K
    bb = np.outer(aux.b_low, aux.b_low)
    if form == 'z':
        return (K2 / k.B * aux.eta.lower
                + K2 / (k.b * k.b) * bb
                + K2 / (k.b * k.b * k.B) * _sym(aux.b_low, aux.z)
                + (k.B - k.g * k.b * k.q) / (k.b * k.b * k.q * k.q) * K2 / (k.B * k.B) * np.outer(aux.z, aux.z))
    if form == 'v':
        inner = (k.q * (k.b + k.g * k.q) * bb + k.q * _sym(aux.b_low, aux.v_low)
                 - k.b * np.outer(aux.v_low, aux.v_low) / k.q)
        return (aux.a + k.g / k.B * inner) * K2 / k.B
    if form == 'u':
        inner = ((k.g * k.q * k.q - k.b * k.S2 / k.q) * bb - k.b / k.q * np.outer(aux.u, aux.u)
                 + k.S2 / k.q * _sym(aux.b_low, aux.u))
        return (aux.a + k.g / k.B * inner) * K2 / k.B
    raise ValueError('unknown representation %r' % form)


def inverse_metric(kernel, aux, form='v'):
    # type: (ScalarKernel, AuxiliaryVectors, str) -> np.ndarray
    """The contravariant metric tensor g^ij
    """
    k = kernel
    factor = k.B / (k.K * k.K)
    bb = np.outer(aux.b_up, aux.b_up)
    if form == 'v':
        inner = (-k.b * k.q * bb - k.q * _sym(aux.b_up, aux.v_up)
                 + (k.b + k.g * k.c2 * k.q) * np.outer(aux.v_up, aux.v_up) / k.nu)
        return (aux.a_inv + k.g / k.B * inner) * factor
    if form == 'u':
        y = aux.y
        return (aux.a_inv + k.g / k.nu * (k.b * bb - _sym(aux.b_up, y))
                + k.g / (k.B * k.nu) * (k.b + k.g * k.c2 * k.q) * np.outer(y, y)) * factor
    raise ValueError('unknown representation %r' % form)


def raise_index(kernel, aux, covector):
    # type: (ScalarKernel, AuxiliaryVectors, t.Any) -> np.ndarray
    """Contraction g^ij t_j of an arbitrary covector without assembling g^ij
    """
    k = kernel
    t_low = np.asarray(covector)
    yt = aux.y.dot(t_low)
    bt = aux.b_up.dot(t_low)
    return (k.B * aux.a_inv.dot(t_low) - k.g * k.q * yt * aux.b_up
            + k.g / k.nu * (-k.B * bt + (k.b + k.g * k.c2 * k.q) * yt) * aux.v_up) / (k.K * k.K)


def angular_metric(kernel, aux, bundle=None, form='v'):
    # type: (ScalarKernel, AuxiliaryVectors, t.Optional[TensorBundle], str) -> np.ndarray
    """The angular metric h_ij = g_ij - y_i y_j / K^2
    """
    k = kernel
    K2 = k.K * k.K
    if form == 'z':
        return K2 / k.B * (aux.eta.lower + np.outer(aux.z, aux.z) / (k.B * k.q * k.q))
    if form == 'u':
        inner = (-k.g * k.b * k.S2 * np.outer(aux.b_low, aux.b_low) - (k.q + k.g * k.b) * np.outer(aux.u, aux.u)
                 + k.g * k.b * k.b * _sym(aux.b_low, aux.u))
        return (aux.a + inner / (k.q * k.B)) * K2 / k.B
    if form == 'v':
        if bundle is not None:
            metric, y_low = bundle.metric, bundle.y_low
        else:
            metric, y_low = metric_tensor(kernel, aux), covariant_y(kernel, aux)
        return metric - np.outer(y_low, y_low) / K2
    raise ValueError('unknown representation %r' % form)


def metric_determinant(kernel, aux):
    # type: (ScalarKernel, AuxiliaryVectors) -> t.Any
    """det(g_ij) = (nu / q) (K^2 / B)^N det(a_ij)
    """
    k = kernel
    return k.nu / k.q * (k.K * k.K / k.B) ** k.dimension * aux.det_a


def tensor_bundle(kernel, aux):
    # type: (ScalarKernel, AuxiliaryVectors) -> TensorBundle
    y_low = covariant_y(kernel, aux)
    metric = metric_tensor(kernel, aux)
    bundle = TensorBundle(y_low=y_low, metric=metric, inverse=inverse_metric(kernel, aux),
                          angular=None, det=metric_determinant(kernel, aux))
    return dataclasses.replace(bundle, angular=angular_metric(kernel, aux, bundle))


def cartan(kernel, aux, bundle):
    # type: (ScalarKernel, AuxiliaryVectors, TensorBundle) -> CartanData
    """The Cartan tensor A_ijk = (K/2) dg_ij/dy^k in its e-form

    Returns:
        CartanData: A_i, A^i, A_ijk and A^i A_i
    """
    k = kernel
    n = k.dimension
    zero_charge = abs(k.g) <= ZERO_CHARGE
    A_low = k.K * k.g / (2.0 * k.q * k.B) * k.inv_x * (k.q * k.q * aux.b_low - k.b * aux.v_low)
    A_up = k.g * k.inv_x / (2.0 * k.K * k.nu) * (k.B * aux.b_up - (k.b + k.g * k.q * k.c2) * aux.y)
    normsq = k.g * k.g / 4.0 * k.inv_x * k.inv_x * (n + 1 - k.inv_x)
    e = aux.e
    eta = aux.eta.lower
    spread = (np.einsum('k,ij->ijk', e, eta) + np.einsum('i,kj->ijk', e, eta)
              + np.einsum('j,ik->ijk', e, eta))
    cube = np.einsum('i,j,k->ijk', e, e, e)
    A_ijk = k.K ** 3 / (k.B * k.B) * (-0.5 * k.g * k.q * spread - k.g * k.q ** 3 / k.B * cube)
    return CartanData(A_low=A_low, A_up=A_up, A_ijk=A_ijk, normsq=normsq,
                      zero_charge=zero_charge, small_charge=abs(k.g) < SMALL_CHARGE)


def cartan_reducible_form(kernel, bundle, data):
    # type: (ScalarKernel, TensorBundle, CartanData) -> t.Optional[np.ndarray]
    """A_ijk through A_i and h_ij, None for a vanishing charge
    """
    if data.zero_charge:
        return None
    k = kernel
    A = data.A_low
    h = bundle.angular
    spread = np.einsum('i,jk->ijk', A, h) + np.einsum('j,ik->ijk', A, h) + np.einsum('k,ij->ijk', A, h)
    cube = np.einsum('i,j,k->ijk', A, A, A)
    return k.X * (spread - (k.dimension + 1 - k.inv_x) / data.normsq * cube)


def evaluate_point(fields, x, y):
    # type: (fields_mod.FieldSet, t.Any, t.Any) -> PointTensors
    """Kernel, auxiliary vectors, tensor bundle and Cartan data at (x, y)
    """
    x = as_vector(x, fields.dimension)
    metric = fields_mod.metric_at(fields, x)
    kernel = eval_kernel(fields, x, y, metric=metric)
    aux = auxiliary_vectors(kernel, fields, x, y, metric=metric)
    bundle = tensor_bundle(kernel, aux)
    return PointTensors(kernel, aux, bundle, cartan(kernel, aux, bundle))


def cartan_oracle_check(kernel, fields, x, y):
    # type: (ScalarKernel, fields_mod.FieldSet, t.Any, t.Any) -> float
    """Distance between the closed-form A_ijk and (K/2) dg_ij/dy^k

    The y-derivative is a certified central difference of the assembled
    closed-form g_ij; the distance is relative to max |A_ijk|.
    """
    x = as_vector(x, fields.dimension)
    metric = fields_mod.metric_at(fields, x)
    point = evaluate_point(fields, x, y)

    def metric_of(yy):
        kk = eval_kernel(fields, x, yy, metric=metric)
        return metric_tensor(kk, auxiliary_vectors(kk, fields, x, yy, metric=metric))

    derivative = gradient(metric_of, y, scale_floor=sup_norm(point.bundle.metric))
    # derivative.value[k, i, j] = d g_ij / dy^k
    numeric = 0.5 * kernel.K * np.einsum('kij->ijk', derivative.value)
    difference = sup_norm(point.cartan.A_ijk - numeric)
    if point.cartan.zero_charge:
        # A_ijk vanishes identically, only round-off is left
        return difference / max(sup_norm(point.bundle.metric), 1.0)
    return difference / sup_norm(point.cartan.A_ijk)


def _result(name, reference, category, lhs, rhs, scale=None, note=''):
    # type: (str, str, str, t.Any, t.Any, t.Optional[float], str) -> IdentityResult
    return IdentityResult(name, reference, category, relative_residual(lhs, rhs, scale), note)


def _algebraic(kernel, aux, bundle, data):
    # type: (ScalarKernel, AuxiliaryVectors, TensorBundle, CartanData) -> t.List[IdentityResult]
    k = kernel
    n = k.dimension
    y = aux.y
    K2 = k.K * k.K
    S2 = k.S2
    c2 = k.c2
    b = k.b
    q = k.q
    g = k.g
    B = k.B
    nu = k.nu
    eta = aux.eta
    z_up = aux.z_up
    # magnitudes of the vectors entering contractions
    ys = sup_norm(y) + sup_norm(aux.u)
    zs = sup_norm(aux.z)
    c_s2_b2 = c2 * S2 - b * b
    results = [
        _result('r_dot_b', 'r_ij b^j = (1-c^2) b_i', 'algebraic', aux.r.dot(aux.b_up), (1 - c2) * aux.b_low,
                sup_norm(aux.b_low)),
        _result('r_squared', 'r_in r^nj = r^j_i - (1-c^2) b^j b_i', 'algebraic', aux.r.dot(aux.r_up),
                aux.r_mixed.T - (1 - c2) * np.outer(aux.b_low, aux.b_up), 1.0),
        _result('q_from_r', 'q = sqrt(r_ij y^i y^j)', 'algebraic', np.sqrt(y.dot(aux.r).dot(y)), q),
        _result('characteristic_squares', 'B = [(b+g_+ q)^2 + (b+g_- q)^2] / 2', 'algebraic', B,
                0.5 * ((b + k.g_plus * q) ** 2 + (b + k.g_minus * q) ** 2)),
        _result('characteristic_L', 'L^2 + h^2 b^2 = B', 'algebraic', k.L * k.L + k.h * k.h * b * b, B),
        _result('nu_ratio', '(c^2 S^2 - b^2)/(q nu) = 1 - (1-c^2) B/(q nu)', 'algebraic',
                c_s2_b2 / (q * nu), 1 - (1 - c2) * B / (q * nu), 1.0),
        _result('nu_product', 'g b (c^2 S^2 - b^2) = q B - nu S^2', 'algebraic', g * b * c_s2_b2,
                q * B - nu * S2, q * B),
        _result('u_dot_v', 'u_i v^i = q^2', 'algebraic', aux.u.dot(aux.v_up), q * q),
        _result('v_dot_y', 'v_i y^i = q^2', 'algebraic', aux.v_low.dot(y), q * q),
        _result('v_dot_b', 'v_i b^i = v^i b_i = (1-c^2) b', 'algebraic',
                [aux.v_low.dot(aux.b_up), aux.v_up.dot(aux.b_low)], [(1 - c2) * b] * 2, np.sqrt(S2)),
        _result('r_dot_v', 'r_in v^n = v_i - (1-c^2) b b_i', 'algebraic', aux.r.dot(aux.v_up),
                aux.v_low - (1 - c2) * b * aux.b_low, ys),
        _result('v_squared', 'v_k v^k = q^2 - (1-c^2) b^2', 'algebraic', aux.v_low.dot(aux.v_up),
                q * q - (1 - c2) * b * b, S2),
        _result('z_dot_y', 'y^i z_i = 0', 'algebraic', y.dot(aux.z), 0.0, sup_norm(y) * zs + S2 * S2),
        _result('z_dot_b', 'b^i z_i = b^2 - c^2 S^2', 'algebraic', aux.b_up.dot(aux.z), -c_s2_b2, S2),
        _result('z_squared', 'a^ij z_i z_j = S^2 (c^2 S^2 - b^2)', 'algebraic', aux.z.dot(z_up),
                S2 * c_s2_b2, S2 * S2),
        _result('eta_mixed', 'eta^n_j = a^nm eta_mj', 'algebraic', eta.mixed, aux.a_inv.dot(eta.lower), 1.0),
        _result('eta_upper', 'eta^ij = a^in eta_n^j', 'algebraic', eta.upper, eta.mixed.dot(aux.a_inv), 1.0),
        _result('eta_dot_y', 'eta_ni y^i = 0', 'algebraic', eta.lower.dot(y), 0.0, sup_norm(y)),
        _result('eta_dot_b', 'eta_ij b^j = -(1-c^2) z_i / q^2', 'algebraic', eta.lower.dot(aux.b_up),
                -(1 - c2) * aux.z / (q * q), sup_norm(aux.b_up)),
        _result('eta_dot_z', 'eta_ij z^j = (1-c^2) S^2 z_i / q^2', 'algebraic', eta.lower.dot(z_up),
                (1 - c2) * S2 * aux.z / (q * q), sup_norm(z_up)),
        _result('reciprocity', 'g_ij g^jk = delta^k_i', 'algebraic', bundle.metric.dot(bundle.inverse),
                np.eye(n), 1.0),
        _result('inverse_numeric', 'closed-form g^ij = (g_ij)^-1', 'algebraic', bundle.inverse,
                np.linalg.inv(bundle.metric)),
        _result('euler_covector', 'y_i = g_ij y^j', 'algebraic', bundle.y_low, bundle.metric.dot(y)),
        _result('euler_vector', 'y^i = g^ij y_j', 'algebraic', bundle.inverse.dot(bundle.y_low), y),
        _result('euler_norm', 'K^2 = g_ij y^i y^j = y_i y^i', 'algebraic',
                [y.dot(bundle.metric).dot(y), bundle.y_low.dot(y)], [K2, K2]),
        _result('angular_annihilates_y', 'h_ij y^j = 0', 'algebraic', bundle.angular.dot(y), 0.0,
                sup_norm(bundle.metric) * sup_norm(y)),
        _result('angular_u_form', 'h_ij u-form = g_ij - y_i y_j / K^2', 'representation',
                angular_metric(k, aux, form='u'), bundle.angular, sup_norm(bundle.metric)),
        _result('angular_b', 'h_ij b^j = -(nu z_i/(B q)) K^2/B', 'algebraic', bundle.angular.dot(aux.b_up),
                -nu * aux.z / (B * q) * K2 / B, sup_norm(bundle.metric) * sup_norm(aux.b_up)),
        _result('inverse_z', 'g^ij z_i z_j = (q/nu)(c^2 S^2 - b^2) B^2/K^2', 'algebraic',
                aux.z.dot(bundle.inverse).dot(aux.z), q / nu * c_s2_b2 * B * B / K2,
                sup_norm(bundle.inverse) * zs * zs),
        _result('inverse_b', 'g^ij b_j = [S^2 b^i - (g/nu)(c^2 S^2 - b^2) v^i]/K^2', 'algebraic',
                bundle.inverse.dot(aux.b_low), (S2 * aux.b_up - g / nu * c_s2_b2 * aux.v_up) / K2,
                sup_norm(bundle.inverse) * sup_norm(aux.b_low)),
        _result('inverse_u', 'g^ij u_j = [B y^i - g q (S^2 b^i - (g/nu)(c^2 S^2 - b^2) v^i)]/K^2', 'algebraic',
                bundle.inverse.dot(aux.u),
                (B * y - g * q * (S2 * aux.b_up - g / nu * c_s2_b2 * aux.v_up)) / K2,
                sup_norm(bundle.inverse) * sup_norm(aux.u)),
        _result('inverse_v', 'g^ij v_j = [B y^i - (b+gq)(S^2 b^i - (g/nu)(c^2 S^2 - b^2) v^i)]/K^2',
                'algebraic', bundle.inverse.dot(aux.v_low),
                (B * y - (b + g * q) * (S2 * aux.b_up - g / nu * c_s2_b2 * aux.v_up)) / K2,
                sup_norm(bundle.inverse) * sup_norm(aux.v_low)),
        _result('v_split', 'v_k = (q^2/K^2) y_k + ((b+gq)/B) z_k', 'algebraic', aux.v_low,
                q * q / K2 * bundle.y_low + (b + g * q) / B * aux.z, ys),
        _result('determinant', 'det g = (nu/q)(K^2/B)^N det a', 'determinant', bundle.det,
                fields_mod.lu_determinant(bundle.metric)),
        _result('e_dot_y', 'y^i e_i = 0', 'algebraic', y.dot(aux.e), 0.0, sup_norm(y) * sup_norm(aux.e)),
        _result('cartan_transversal', 'A_i y^i = 0', 'algebraic', data.A_low.dot(y), 0.0,
                sup_norm(data.A_low) * k.K + 1e-300),
        _result('cartan_raised', 'A^i = g^ij A_j', 'algebraic', data.A_up, bundle.inverse.dot(data.A_low),
                sup_norm(bundle.inverse) * sup_norm(data.A_low)),
        _result('cartan_norm', 'A^i A_i = (g^2/4)(1/X^2)(N + 1 - 1/X)', 'algebraic', data.A_up.dot(data.A_low),
                data.normsq),
        _result('cartan_axis', 'b_i A^i = (g/(2 X K nu))(c^2 S^2 - b^2)', 'algebraic', aux.b_low.dot(data.A_up),
                g * k.inv_x / (2 * k.K * nu) * c_s2_b2, sup_norm(aux.b_low) * sup_norm(data.A_up)),
        _result('cartan_symmetry', 'A_ijk totally symmetric', 'algebraic',
                [data.A_ijk, data.A_ijk], [np.einsum('ijk->jik', data.A_ijk), np.einsum('ijk->kji', data.A_ijk)]),
        _result('cartan_annihilates_y', 'A_ijk y^k = 0', 'algebraic', data.A_ijk.dot(y), 0.0,
                sup_norm(data.A_ijk) * sup_norm(y)),
        _result('cartan_trace', 'g^jk A_ijk = A_i', 'cartan_trace',
                np.einsum('jk,ijk->i', bundle.inverse, data.A_ijk), data.A_low, sup_norm(data.A_low)),
        _result('cartan_e_form', 'A_i = -(K g q/(2 B X)) e_i', 'algebraic', data.A_low,
                -k.K * g * q * k.inv_x / (2 * B) * aux.e),
    ]
    reducible = cartan_reducible_form(k, bundle, data)
    if reducible is not None:
        note = 'small charge' if data.small_charge else ''
        results.append(_result('cartan_forms', 'reducible A_ijk (through A_i, h_ij) = e-form A_ijk', 'cartan_forms',
                               reducible, data.A_ijk, note=note))
    if abs(b) > Z_FORM_PLANE * k.S:
        w = q / b
        results.extend([
            _result('axis_combination', 'b + g c^2 q = (B - q nu)/b', 'algebraic', b + g * c2 * q,
                    (B - q * nu) / b, np.sqrt(S2)),
            _result('inverse_x_w', '1/X = N + ((1-c^2)/w)(1 + g w + w^2)/(w + (1-c^2) g)', 'algebraic',
                    k.inv_x, n + (1 - c2) / w * (1 + g * w + w * w) / (w + (1 - c2) * g)),
            _result('covector_zv', 'y_i z-form = y_i v-form', 'representation', covariant_y(k, aux, 'z'),
                    bundle.y_low),
            _result('metric_zv', 'g_ij z-form = g_ij v-form', 'representation', metric_tensor(k, aux, 'z'),
                    bundle.metric),
            _result('angular_z', 'h_ij z-form = g_ij - y_i y_j / K^2', 'representation',
                    angular_metric(k, aux, form='z'), bundle.angular, sup_norm(bundle.metric)),
        ])
    results.extend([
        _result('covector_uv', 'y_i u-form = y_i v-form', 'representation', covariant_y(k, aux, 'u'), bundle.y_low),
        _result('metric_uv', 'g_ij u-form = g_ij v-form', 'representation', metric_tensor(k, aux, 'u'),
                bundle.metric),
        _result('inverse_uv', 'g^ij u-form = g^ij v-form', 'representation', inverse_metric(k, aux, 'u'),
                bundle.inverse),
    ])
    t_low = np.arange(1.0, n + 1.0) / n + aux.b_low
    results.append(_result('raise_index', 'g^ij t_j through a^ij, b^i, v^i', 'algebraic',
                           raise_index(k, aux, t_low), bundle.inverse.dot(t_low)))
    if abs(g) > ZERO_CHARGE:
        xa = k.X * data.A_low
        l_low = bundle.y_low / k.K
        results.append(_result('cartan_v', 'v_i = (q^2/K^2) y_i - q (b+gq)(2X/(K g)) A_i', 'algebraic',
                               aux.v_low, q * q / K2 * bundle.y_low - q * (b + g * q) * 2 * xa / (k.K * g), ys))
        results.append(_result('cartan_b', 'K b_n = b l_n + (2q/g) X A_n', 'algebraic', k.K * aux.b_low,
                               b * l_low + 2 * q / g * xa, k.K * sup_norm(aux.b_low)))
        if abs(b) > Z_FORM_PLANE * k.S:
            results.append(_result('cartan_v_over_q', 'K v_n/q = q l_n - ((B - q^2)/b)(2/g) X A_n', 'algebraic',
                                   k.K * aux.v_low / q, q * l_low - (B - q * q) / b * 2 / g * xa,
                                   k.K * ys / q))
    return results


def _derivative(kernel, aux, bundle, data, fields):
    # type: (ScalarKernel, AuxiliaryVectors, TensorBundle, CartanData, fields_mod.FieldSet) -> t.List[IdentityResult]
    k = kernel
    x = k.x
    y = aux.y
    metric = (aux.a, aux.a_inv, aux.det_a)
    b_low = aux.b_low
    g = k.g
    b = k.b
    q = k.q
    K2 = k.K * k.K
    results = []  # type: t.List[IdentityResult]

    def point_at(yy):
        kk = eval_kernel(fields, x, yy, metric=metric)
        return kk, auxiliary_from_metric(kk, aux.a, aux.a_inv, aux.det_a, b_low, as_vector(yy))

    def numeric(name, reference, func, expected, floor):
        # expected[i, ...] against d func_... / dy^i, derivative index moved last
        try:
            value = gradient(func, y, scale_floor=floor).value
        except FinsleroidException as e:
            logger.warning('numeric derivative for %s failed: %s', name, e)
            results.append(IdentityResult(name, reference, 'derivative', float('inf'), str(e)))
            return
        value = np.moveaxis(value, 0, -1)
        results.append(_result(name, reference, 'derivative', value, expected, floor))

    numeric('r_from_v', 'r_ij = dv_i/dy^j', lambda yy: point_at(yy)[1].v_low, aux.r, sup_norm(aux.r))
    numeric('db_dy', 'db/dy^i = b_i', lambda yy: b_low.dot(yy), b_low, sup_norm(b_low))
    numeric('dq_dy', 'dq/dy^i = v_i/q', lambda yy: point_at(yy)[0].q, aux.v_low / q, sup_norm(aux.v_low) / q)
    numeric('dv_over_q', 'd(v_k/q)/dy^j = eta_kj/q',
            lambda yy: (lambda kk, ax: ax.v_low / kk.q)(*point_at(yy)), aux.eta.lower / q,
            sup_norm(aux.r) / q)
    numeric('dB_dy', 'dB/dy^k = 2B y_k/K^2 + (g/q) z_k', lambda yy: point_at(yy)[0].B,
            2 * k.B * bundle.y_low / K2 + g / q * aux.z, sup_norm(bundle.y_low))
    numeric('covector_gradient', 'y_i = (1/2) dK^2/dy^i', lambda yy: 0.5 * point_at(yy)[0].K ** 2,
            bundle.y_low, sup_norm(bundle.y_low))
    numeric('cartan_log_det_gradient', 'A_i = K d ln sqrt(det g)/dy^i',
            lambda yy: 0.5 * np.log(metric_determinant(*point_at(yy))), data.A_low / k.K,
            1e-3 * sup_norm(bundle.y_low) / K2)
    if abs(b) > Z_FORM_PLANE * k.S:
        expected_dz = (b * aux.eta.lower + np.outer(aux.z, aux.v_low) / (q * q)
                       + (np.outer(aux.z, b_low) - np.outer(b_low, aux.z)) / b)
        numeric('dz_dy', 'dz_i/dy^k = b eta_ik + v_k z_i/q^2 + (b_k z_i - z_k b_i)/b',
                lambda yy: point_at(yy)[1].z, expected_dz, sup_norm(expected_dz) + b * sup_norm(aux.r))
    if abs(g) > ZERO_CHARGE:
        xa = k.X * data.A_low

        def xa_at(yy):
            kk, ax = point_at(yy)
            return kk.K * kk.g / (2.0 * kk.q * kk.B) * (kk.q * kk.q * ax.b_low - kk.b * ax.v_low)

        numeric('dB_dy_cartan', 'dB/dy^k = 2B y_k/K^2 - (2B/K) X A_k', lambda yy: point_at(yy)[0].B,
                2 * k.B * bundle.y_low / K2 - 2 * k.B / k.K * xa, sup_norm(bundle.y_low))
        numeric('dq2_over_B', 'd(q^2/B)/dy^k = -2q(2b+gq) X A_k/(g K B)',
                lambda yy: point_at(yy)[0].q ** 2 / point_at(yy)[0].B,
                -2 * q * (2 * b + g * q) * xa / (g * k.K * k.B), sup_norm(bundle.y_low) / K2)
        l_low = bundle.y_low / k.K
        expected_dxa = (-np.outer(l_low, xa) / k.K - g * b / (2 * k.K * q) * bundle.angular
                        + 2 * (b + g * q) / (g * k.K * q) * np.outer(xa, xa))
        numeric('dXA_dy', 'd(X A_k)/dy^n = -l_k X A_n/K - (g/(2Kw)) h_kn + 2(b+gq) X^2 A_k A_n/(g K q)',
                xa_at, expected_dxa, sup_norm(expected_dxa) + abs(g) * sup_norm(bundle.angular) / k.K)
        if abs(b) > Z_FORM_PLANE * k.S:
            numeric('dK_over_q', 'd(K/q)/dy^n = 2(B - q^2) X A_n/(g b q^2)',
                    lambda yy: point_at(yy)[0].K / point_at(yy)[0].q,
                    2 * (k.B - q * q) * xa / (g * b * q * q), sup_norm(bundle.y_low) / (k.K * q))
    # round-off in V'' grows like d^2, d the distance from w to the zeros of 1 + g w + w^2
    if abs(b) > Z_FORM_PLANE * k.S:
        try:
            V, dV, ddV = generating_V(fields, x, y, kernel=k)
        except FinsleroidException as e:
            logger.debug('generating function skipped: %s', e)
        else:
            w = q / b
            results.append(_result('generating_first', 'V V\' = w K^2/B', 'generating', V * dV, w * K2 / k.B))
            results.append(_result('generating_second', 'V V\'\' = (b^2/B)(K^2/B)', 'derivative', V * ddV,
                                   b * b / k.B * K2 / k.B))
    try:
        numeric_metric = hessian(lambda yy: 0.5 * point_at(yy)[0].K ** 2, y,
                                 scale_floor=sup_norm(bundle.metric)).value
    except FinsleroidException as e:
        results.append(IdentityResult('metric_hessian', 'g_ij = (1/2) d^2 K^2/dy^i dy^j', 'hessian',
                                      float('inf'), str(e)))
    else:
        results.append(_result('metric_hessian', 'g_ij = (1/2) d^2 K^2/dy^i dy^j', 'hessian',
                               numeric_metric, bundle.metric))
    try:
        residual = cartan_oracle_check(k, fields, x, y)
    except FinsleroidException as e:
        results.append(IdentityResult('cartan_oracle', 'A_ijk = (K/2) dg_ij/dy^k', 'cartan_oracle',
                                      float('inf'), str(e)))
    else:
        results.append(IdentityResult('cartan_oracle', 'A_ijk = (K/2) dg_ij/dy^k', 'cartan_oracle', residual))
    return results


def identity_battery(kernel, aux, bundle, data, fields=None):
    # type: (ScalarKernel, AuxiliaryVectors, TensorBundle, CartanData, t.Optional[fields_mod.FieldSet]) -> t.List[IdentityResult]
    """Run every identity linking the closed forms at one point

    Failures are returned as residuals, never raised.

    Args:
        kernel (ScalarKernel): kernel at (x, y), with x and y set
        aux (AuxiliaryVectors): auxiliary vectors at the same point
        bundle (TensorBundle): closed-form tensors at the same point
        data (CartanData): Cartan data at the same point
        fields (FieldSet): the space; when given the identities involving
            y-derivatives are checked against certified differences as well

    Returns:
        t.List[IdentityResult]: one result per identity
    """
    results = _algebraic(kernel, aux, bundle, data)
    if fields is not None:
        results.extend(_derivative(kernel, aux, bundle, data, fields))
    return results
