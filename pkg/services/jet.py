"""Truncated bivariate Taylor arithmetic.

A ``Jet`` carries the Taylor coefficients of a scalar field around a base
point of the parameter domain, ``coef[a, b] = d1^a d2^b f / (a! b!)``, up to a
total order of at most three. Arithmetic propagates the truncation, so every
field built from jets stays exact to its order.
"""
import math
import numbers

import numpy as np

from models.errors import JetDomainError, JetOrderExhausted

MAX_ORDER = 3
_SIZE = MAX_ORDER + 1
_DEGREE = np.add.outer(np.arange(_SIZE), np.arange(_SIZE))
_FACTORIAL = np.array([math.factorial(k) for k in range(_SIZE)], dtype=float)
_SCALE = np.outer(_FACTORIAL, _FACTORIAL)


class Jet:
    __slots__ = ("coef", "order")
    # numpy defers every binary operator to the jet
    __array_ufunc__ = None

    def __init__(self, coef, order=MAX_ORDER):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must lie in [0, {MAX_ORDER}], got {order}")
        coef = np.array(coef, dtype=float)
        coef[_DEGREE > order] = 0.0
        self.coef = coef
        self.order = order

    @classmethod
    def constant(cls, value, order=MAX_ORDER):
        coef = np.zeros((_SIZE, _SIZE))
        coef[0, 0] = value
        return cls(coef, order)

    @classmethod
    def variable(cls, index, value, order=MAX_ORDER):
        coef = np.zeros((_SIZE, _SIZE))
        coef[0, 0] = value
        if order > 0:
            coef[(1, 0) if index == 0 else (0, 1)] = 1.0
        return cls(coef, order)

    @classmethod
    def from_derivatives(cls, derivatives, order=MAX_ORDER):
        """Build a jet from a mapping ``(a, b) -> d1^a d2^b f`` at the base point."""
        coef = np.zeros((_SIZE, _SIZE))
        for (a, b), value in derivatives.items():
            coef[a, b] = value / _SCALE[a, b]
        return cls(coef, order)

    @property
    def value(self):
        return float(self.coef[0, 0])

    def derivative(self, a, b):
        if a + b > self.order:
            raise JetOrderExhausted(f"derivative ({a}, {b}) exceeds jet order {self.order}")
        return float(self.coef[a, b] * _SCALE[a, b])

    @property
    def partials(self):
        """Value followed by the gradient, Hessian and third-derivative entries."""
        return (
            self.value,
            tuple(self.derivative(1 - k, k) for k in range(2)) if self.order >= 1 else (),
            tuple(self.derivative(2 - k, k) for k in range(3)) if self.order >= 2 else (),
            tuple(self.derivative(3 - k, k) for k in range(4)) if self.order >= 3 else (),
        )

    def partial(self, index):
        if self.order < 1:
            raise JetOrderExhausted("cannot differentiate a jet of order 0")
        out = np.zeros((_SIZE, _SIZE))
        k = np.arange(1, _SIZE, dtype=float)
        if index == 0:
            out[:-1, :] = self.coef[1:, :] * k[:, None]
        else:
            out[:, :-1] = self.coef[:, 1:] * k[None, :]
        return Jet(out, self.order - 1)

    def truncate(self, order):
        return Jet(self.coef, min(order, self.order))

    def isfinite(self):
        return bool(np.all(np.isfinite(self.coef)))

    def __repr__(self):
        return f"Jet(value={self.value!r}, order={self.order})"

    # arithmetic

    def __neg__(self):
        return Jet(-self.coef, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.coef + other.coef, min(self.order, other.order))
        if isinstance(other, numbers.Real):
            coef = self.coef.copy()
            coef[0, 0] += float(other)
            return Jet(coef, self.order)
        if isinstance(other, np.ndarray):
            return _broadcast(lambda x: self + x, other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            out = np.zeros((_SIZE, _SIZE))
            for a in range(order + 1):
                for b in range(order + 1 - a):
                    if self.coef[a, b] != 0.0:
                        out[a:, b:] += self.coef[a, b] * other.coef[:_SIZE - a, :_SIZE - b]
            return Jet(out, order)
        if isinstance(other, numbers.Real):
            return Jet(self.coef * float(other), self.order)
        if isinstance(other, np.ndarray):
            return _broadcast(lambda x: self * x, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        if isinstance(other, numbers.Real):
            if other == 0:
                raise JetDomainError("division by zero")
            return Jet(self.coef / float(other), self.order)
        if isinstance(other, np.ndarray):
            return _broadcast(lambda x: self / x, other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Real):
            return reciprocal(self) * float(other)
        if isinstance(other, np.ndarray):
            return _broadcast(lambda x: x / self, other)
        return NotImplemented

    def __pow__(self, other):
        if isinstance(other, Jet):
            return exp(other * log(self))
        if not isinstance(other, numbers.Real):
            return NotImplemented
        exponent = float(other)
        if exponent.is_integer():
            n = int(exponent)
            if n < 0:
                return reciprocal(self ** (-n))
            result = Jet.constant(1.0, self.order)
            base = self
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        a = self.value
        if a <= 0.0:
            raise JetDomainError(f"non-integer power of non-positive value {a!r}")
        r = exponent
        return _compose(self, (a ** r, r * a ** (r - 1), r * (r - 1) * a ** (r - 2),
                               r * (r - 1) * (r - 2) * a ** (r - 3)))

    def __rpow__(self, other):
        if isinstance(other, numbers.Real):
            if other <= 0:
                raise JetDomainError(f"power with non-positive base {other!r}")
            return exp(self * math.log(float(other)))
        return NotImplemented


def _broadcast(op, array):
    out = np.empty(array.shape, dtype=object)
    for index, item in np.ndenumerate(array):
        out[index] = op(item)
    return out


def _compose(x, derivatives):
    """f(x) for a scalar f given its derivatives at the base value of x."""
    delta = Jet(x.coef, x.order)
    delta.coef[0, 0] = 0.0
    result = Jet.constant(derivatives[0], x.order)
    power = Jet.constant(1.0, x.order)
    for k in range(1, x.order + 1):
        power = power * delta
        result = result + power * (derivatives[k] / _FACTORIAL[k])
    return result


def reciprocal(x):
    if not isinstance(x, Jet):
        if x == 0:
            raise JetDomainError("division by zero")
        return 1.0 / x
    a = x.value
    if a == 0.0:
        raise JetDomainError("division by zero")
    return _compose(x, (1.0 / a, -1.0 / a ** 2, 2.0 / a ** 3, -6.0 / a ** 4))


def sqrt(x):
    if not isinstance(x, Jet):
        if x < 0:
            raise JetDomainError(f"sqrt of negative value {x!r}")
        return math.sqrt(x)
    a = x.value
    if a < 0.0 or (a == 0.0 and x.order > 0):
        raise JetDomainError(f"sqrt of non-positive value {a!r}")
    r = math.sqrt(a)
    if x.order == 0:
        return Jet.constant(r, 0)
    return _compose(x, (r, 0.5 / r, -0.25 / r ** 3, 0.375 / r ** 5))


def log(x):
    a = x.value if isinstance(x, Jet) else x
    if a <= 0.0:
        raise JetDomainError(f"log of non-positive value {a!r}")
    if not isinstance(x, Jet):
        return math.log(x)
    return _compose(x, (math.log(a), 1.0 / a, -1.0 / a ** 2, 2.0 / a ** 3))


def exp(x):
    if not isinstance(x, Jet):
        return math.exp(x)
    e = math.exp(x.value)
    return _compose(x, (e, e, e, e))


def sin(x):
    if not isinstance(x, Jet):
        return math.sin(x)
    s, c = math.sin(x.value), math.cos(x.value)
    return _compose(x, (s, c, -s, -c))


def cos(x):
    if not isinstance(x, Jet):
        return math.cos(x)
    s, c = math.sin(x.value), math.cos(x.value)
    return _compose(x, (c, -s, -c, s))


def value_of(x):
    """Base-point value of a jet, a number or an array of either."""
    if isinstance(x, Jet):
        return x.value
    if isinstance(x, np.ndarray):
        return np.array([value_of(item) for item in x.flat], dtype=float).reshape(x.shape)
    return float(x)


def order_of(x):
    if isinstance(x, Jet):
        return x.order
    if isinstance(x, np.ndarray):
        return min((order_of(item) for item in x.flat), default=MAX_ORDER)
    return MAX_ORDER


def lift(x, order=MAX_ORDER):
    """Promote numbers (or arrays of them) to constant jets."""
    if isinstance(x, Jet):
        return x
    if isinstance(x, np.ndarray):
        return _broadcast(lambda item: lift(item, order), x)
    return Jet.constant(float(x), order)
