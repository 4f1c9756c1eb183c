"""Exact multivariate polynomial arithmetic.

Coefficients are stored in a dictionary keyed by exponent tuples, e.g.
``{(0, 1, 0): 11.0, (4, 0, 2): -0.22}`` stands for ``11 x1 + -0.22 x0^4 x2^2``.
Arithmetic never truncates, so pulled back fields keep exact derivatives.
"""
import logging
import typing as t  # noqa: F401 ignore unused we use it for typing

import numpy as np

logger = logging.getLogger('finsleroid')  # type: logging.Logger


class Polynomial(object):
    """Polynomial in a fixed number of variables
    """

    def __init__(self, nvars, terms=None):
        # type: (int, t.Optional[t.Dict[t.Tuple[int, ...], float]]) -> None
        self.nvars = nvars
        self.terms = {}  # type: t.Dict[t.Tuple[int, ...], float]
        for powers, coeff in (terms or {}).items():
            powers = tuple(int(p) for p in powers)
            if len(powers) != nvars:
                raise ValueError('exponent %r does not have %d entries' % (powers, nvars))
            if any(p < 0 for p in powers):
                raise ValueError('negative exponent in %r' % (powers,))
            if coeff != 0:
                self.terms[powers] = self.terms.get(powers, 0.0) + coeff

    @classmethod
    def constant(cls, nvars, value):
        # type: (int, float) -> Polynomial
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, index):
        # type: (int, int) -> Polynomial
        powers = [0] * nvars
        powers[index] = 1
        return cls(nvars, {tuple(powers): 1.0})

    def _coerce(self, other):
        # type: (t.Any) -> Polynomial
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError('cannot combine polynomials in %d and %d variables' % (self.nvars, other.nvars))
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for powers, coeff in other.terms.items():
            terms[powers] = terms.get(powers, 0.0) + coeff
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {powers: -coeff for powers, coeff in self.terms.items()})

    def __sub__(self, other):
        return self + -self._coerce(other)

    def __rsub__(self, other):
        return self._coerce(other) + -self

    def __mul__(self, other):
        # (sum_j a_j)*(sum_k b_k) = sum_{j, k} a_j*b_k
        other = self._coerce(other)
        terms = {}  # type: t.Dict[t.Tuple[int, ...], float]
        for left, lcoeff in self.terms.items():
            for right, rcoeff in other.terms.items():
                powers = tuple(a + b for a, b in zip(left, right))
                terms[powers] = terms.get(powers, 0.0) + lcoeff * rcoeff
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError('only non-negative integer powers are supported')
        if exponent == 0:
            # N.B. 0**0 := 1
            return Polynomial.constant(self.nvars, 1.0)
        half = self ** (exponent // 2)
        if exponent % 2:
            return self * half * half
        return half * half

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = self._coerce(other)
        return self.nvars == other.nvars and self.terms == other.terms

    def __ne__(self, other):
        return not self == other

    __hash__ = None  # type: ignore

    def __repr__(self):
        if not self.terms:
            return 'Polynomial(%d, 0)' % self.nvars
        parts = []
        for powers, coeff in sorted(self.terms.items()):
            factors = ''.join(' x%d**%d' % (i, p) for i, p in enumerate(powers) if p)
            parts.append('%r%s' % (coeff, factors))
        return 'Polynomial(%d, %s)' % (self.nvars, ' + '.join(parts))

    @property
    def degree(self):
        # type: () -> int
        if not self.terms:
            return 0
        return max(sum(powers) for powers in self.terms)

    def derivative(self, index):
        # type: (int) -> Polynomial
        """Exact partial derivative with respect to the variable at index
        """
        terms = {}  # type: t.Dict[t.Tuple[int, ...], float]
        for powers, coeff in self.terms.items():
            if powers[index] == 0:
                continue
            lowered = list(powers)
            lowered[index] -= 1
            terms[tuple(lowered)] = coeff * powers[index]
        return Polynomial(self.nvars, terms)

    def evaluate(self, x):
        # type: (t.Sequence[float]) -> float
        x = np.asarray(x, dtype=float)
        total = 0.0
        for powers, coeff in self.terms.items():
            total += coeff * float(np.prod(x ** np.asarray(powers)))
        return total

    def compose(self, substitutions):
        # type: (t.Sequence[Polynomial]) -> Polynomial
        """Substitute a polynomial for every variable

        Args:
            substitutions (t.Sequence[Polynomial]): one polynomial per variable,
                all in the same number of variables

        Returns:
            Polynomial: the composition, in the variables of the substitutions
        """
        if len(substitutions) != self.nvars:
            raise ValueError('need %d substitutions, got %d' % (self.nvars, len(substitutions)))
        target = substitutions[0].nvars
        result = Polynomial(target)
        for powers, coeff in self.terms.items():
            term = Polynomial.constant(target, coeff)
            for variable, power in zip(substitutions, powers):
                if power:
                    term = term * variable ** power
            result = result + term
        return result
