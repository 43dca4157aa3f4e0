"""Forward-mode truncated Taylor arithmetic.

Two flavours:

* :class:`Jet2` -- value plus first and second partials of a function of
  two variables (s, t).  Fields may be floats or numpy arrays of equal
  shape, so a whole parameter grid can be pushed through at once.
* :class:`Taylor1` -- univariate Taylor coefficients up to a chosen order,
  optionally vector valued.  Used for curve Frenet frames, which need
  fourth derivatives and algebra (division, square roots) on jets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

# Derivative sequences g, g', g'', ... of the elementary functions, cyclic.
_DERIV_CYCLES: dict[str, tuple[Callable, ...]] = {
    "cosh": (np.cosh, np.sinh),
    "sinh": (np.sinh, np.cosh),
    "cos": (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin),
    "sin": (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
}

ELEMENTARY = tuple(_DERIV_CYCLES)


def derivatives_at(fn: str, x, order: int) -> list:
    """[g(x), g'(x), ..., g^(order)(x)] for an elementary function name."""
    cyc = _DERIV_CYCLES[fn]
    return [cyc[j % len(cyc)](x) for j in range(order + 1)]


@dataclass(frozen=True)
class Jet2:
    """Second-order jet in (s, t). The mixed partial is stored once."""

    val: Any
    d_s: Any = 0.0
    d_t: Any = 0.0
    d_ss: Any = 0.0
    d_st: Any = 0.0
    d_tt: Any = 0.0

    def _fields(self):
        return (self.val, self.d_s, self.d_t, self.d_ss, self.d_st, self.d_tt)

    @staticmethod
    def const(c) -> "Jet2":
        z = np.zeros_like(c, dtype=float) if np.ndim(c) else 0.0
        return Jet2(c, z, z, z, z, z)

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.val + other, *self._fields()[1:])
        return Jet2(*(a + b for a, b in zip(self._fields(), other._fields())))

    __radd__ = __add__

    def __neg__(self):
        return Jet2(*(-a for a in self._fields()))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(*(a * other for a in self._fields()))
        a, b = self, other
        return Jet2(
            a.val * b.val,
            a.d_s * b.val + a.val * b.d_s,
            a.d_t * b.val + a.val * b.d_t,
            a.d_ss * b.val + 2 * a.d_s * b.d_s + a.val * b.d_ss,
            a.d_st * b.val + a.d_s * b.d_t + a.d_t * b.d_s + a.val * b.d_st,
            a.d_tt * b.val + 2 * a.d_t * b.d_t + a.val * b.d_tt,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def compose(self, g: Sequence) -> "Jet2":
        """g(self) given g = [g(u0), g'(u0), g''(u0)] at u0 = self.val."""
        g0, g1, g2 = g[:3]
        return Jet2(
            g0,
            g1 * self.d_s,
            g1 * self.d_t,
            g2 * self.d_s * self.d_s + g1 * self.d_ss,
            g2 * self.d_s * self.d_t + g1 * self.d_st,
            g2 * self.d_t * self.d_t + g1 * self.d_tt,
        )

    def reciprocal(self) -> "Jet2":
        v = self.val
        return self.compose([1.0 / v, -1.0 / v**2, 2.0 / v**3])

    def apply(self, fn: str) -> "Jet2":
        return self.compose(derivatives_at(fn, self.val, 2))

    def cosh(self):
        return self.apply("cosh")

    def sinh(self):
        return self.apply("sinh")

    def cos(self):
        return self.apply("cos")

    def sin(self):
        return self.apply("sin")


def seed(s, t) -> tuple[Jet2, Jet2]:
    """Jets of the coordinate functions s and t at (s, t)."""
    one = np.ones_like(s, dtype=float) if np.ndim(s) else 1.0
    zero = one * 0.0
    sj = Jet2(s, one, zero, zero, zero, zero)
    one = np.ones_like(t, dtype=float) if np.ndim(t) else 1.0
    zero = one * 0.0
    tj = Jet2(t, zero, one, zero, zero, zero)
    return sj, tj


def elementary(fn: str, *args):
    """Apply one letter of the map alphabet to jets (or plain numbers).

    ``fn`` is one of cosh, sinh, cos, sin (one argument), add, mul (two
    arguments) or scale (a constant and an argument).
    """
    if fn in _DERIV_CYCLES:
        (x,) = args
        if isinstance(x, (Jet2, Taylor1)):
            return x.apply(fn)
        return _DERIV_CYCLES[fn][0](x)
    if fn == "add":
        a, b = args
        return a + b
    if fn == "mul":
        a, b = args
        return a * b
    if fn == "scale":
        c, x = args
        return x * c
    raise ValueError(f"unknown elementary function {fn!r}")


def _bcast(a: np.ndarray, ndim: int) -> np.ndarray:
    return a.reshape(a.shape + (1,) * (ndim - a.ndim))


class Taylor1:
    """Truncated univariate Taylor series sum_k c_k h^k, c_k = f^(k)/k!.

    ``coef`` has shape (order + 1,) for scalars or (order + 1, dim) for
    vectors.  Binary operations truncate to the lower order of the two
    operands.
    """

    __slots__ = ("coef",)

    def __init__(self, coef):
        self.coef = np.asarray(coef, dtype=float)

    @classmethod
    def variable(cls, x0: float, order: int) -> "Taylor1":
        c = np.zeros(order + 1)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, x0, order: int) -> "Taylor1":
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        return cls(c)

    @classmethod
    def stack(cls, comps: Sequence["Taylor1"]) -> "Taylor1":
        n = min(c.order for c in comps)
        return cls(np.stack([c.coef[: n + 1] for c in comps], axis=-1))

    @property
    def order(self) -> int:
        return self.coef.shape[0] - 1

    @property
    def value(self):
        return self.coef[0]

    def derivatives(self) -> np.ndarray:
        """f, f', ..., f^(order) (rescaled coefficients)."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.coef * _bcast(fact, self.coef.ndim)

    def deriv(self) -> "Taylor1":
        k = np.arange(1, self.order + 1, dtype=float)
        return Taylor1(self.coef[1:] * _bcast(k, self.coef.ndim))

    def __len__(self):
        return self.coef.shape[-1]

    def __getitem__(self, i) -> "Taylor1":
        return Taylor1(self.coef[:, i])

    def _coerce(self, other):
        if isinstance(other, Taylor1):
            n = min(self.order, other.order)
            return self.coef[: n + 1], other.coef[: n + 1]
        c = np.zeros_like(self.coef, dtype=float, shape=self.coef.shape[:1] + np.shape(other))
        c[0] = other
        return self.coef, c

    def __add__(self, other):
        a, b = self._coerce(other)
        nd = max(a.ndim, b.ndim)
        return Taylor1(_bcast(a, nd) + _bcast(b, nd))

    __radd__ = __add__

    def __neg__(self):
        return Taylor1(-self.coef)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Taylor1):
            return Taylor1(self.coef * other)
        a, b = self._coerce(other)
        nd = max(a.ndim, b.ndim)
        a, b = _bcast(a, nd), _bcast(b, nd)
        n = a.shape[0]
        out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]))
        for k in range(n):
            out[k] = sum(a[i] * b[k - i] for i in range(k + 1))
        return Taylor1(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Taylor1":
        a = self.coef
        if a.ndim != 1:
            raise TypeError("reciprocal of a vector jet")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            b[k] = -b[0] * sum(a[i] * b[k - i] for i in range(1, k + 1))
        return Taylor1(b)

    def __truediv__(self, other):
        if isinstance(other, Taylor1):
            return self * other.reciprocal()
        return Taylor1(self.coef / other)

    def sqrt(self) -> "Taylor1":
        a = self.coef
        if a.ndim != 1:
            raise TypeError("sqrt of a vector jet")
        b = np.zeros_like(a)
        b[0] = math.sqrt(a[0])
        for k in range(1, a.shape[0]):
            b[k] = (a[k] - sum(b[i] * b[k - i] for i in range(1, k))) / (2 * b[0])
        return Taylor1(b)

    def compose(self, g: Sequence) -> "Taylor1":
        """g(self) from the derivative list g = [g(u0), g'(u0), ...]."""
        n = self.order
        delta = Taylor1(np.concatenate([[0.0], self.coef[1:]]))
        out = Taylor1.constant(g[0], n)
        power = Taylor1.constant(1.0, n)
        for j in range(1, n + 1):
            power = power * delta
            out = out + power * (g[j] / math.factorial(j))
        return out

    def apply(self, fn: str) -> "Taylor1":
        if self.coef.ndim != 1:
            raise TypeError("elementary functions act on scalar jets")
        return self.compose(derivatives_at(fn, float(self.coef[0]), self.order))

    def cosh(self):
        return self.apply("cosh")

    def sinh(self):
        return self.apply("sinh")

    def cos(self):
        return self.apply("cos")

    def sin(self):
        return self.apply("sin")

    def __repr__(self):
        return f"Taylor1({self.coef!r})"


def minner(eps, u: Taylor1, v: Taylor1) -> Taylor1:
    """Jet of sum_i eps_i u_i v_i for vector jets u, v."""
    eps = np.asarray(eps, dtype=float)
    a, b = u._coerce(v)
    n = a.shape[0]
    out = np.zeros(n)
    for k in range(n):
        out[k] = sum(np.sum(eps * a[i] * b[k - i]) for i in range(k + 1))
    return Taylor1(out)
