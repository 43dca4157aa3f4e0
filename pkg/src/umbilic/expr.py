"""Composition trees over {cosh, sinh, cos, sin, +, *, scalar scale}.

Trees are built with ordinary operators::

    s, t = Var("s"), Var("t")
    x = 2.0 * cosh(s / 3.0)

and evaluated on floats, numpy arrays, :class:`Jet2` or :class:`Taylor1`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .jets import Jet2, Taylor1, elementary, seed
from .metric import Signature


class Expr:
    def evaluate(self, env: Mapping[str, object]):
        raise NotImplementedError

    def variables(self) -> frozenset[str]:
        raise NotImplementedError

    def substitute(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        raise NotImplementedError

    def __add__(self, other):
        return Add(self, _wrap(other))

    def __radd__(self, other):
        return Add(_wrap(other), self)

    def __sub__(self, other):
        return Add(self, Scale(-1.0, _wrap(other)))

    def __rsub__(self, other):
        return Add(_wrap(other), Scale(-1.0, self))

    def __neg__(self):
        return Scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, Expr):
            return Mul(self, other)
        return Scale(float(other), self)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if isinstance(other, Expr):
            raise TypeError("division is only by constants")
        return Scale(1.0 / float(other), self)


def _wrap(x) -> Expr:
    return x if isinstance(x, Expr) else Const(float(x))


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def evaluate(self, env):
        return self.value

    def variables(self):
        return frozenset()

    def substitute(self, mapping):
        return self


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def evaluate(self, env):
        return env[self.name]

    def variables(self):
        return frozenset({self.name})

    def substitute(self, mapping):
        return mapping.get(self.name, self)


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr

    def evaluate(self, env):
        return elementary("add", self.a.evaluate(env), self.b.evaluate(env))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def substitute(self, mapping):
        return Add(self.a.substitute(mapping), self.b.substitute(mapping))


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr

    def evaluate(self, env):
        return elementary("mul", self.a.evaluate(env), self.b.evaluate(env))

    def variables(self):
        return self.a.variables() | self.b.variables()

    def substitute(self, mapping):
        return Mul(self.a.substitute(mapping), self.b.substitute(mapping))


@dataclass(frozen=True)
class Scale(Expr):
    factor: float
    a: Expr

    def evaluate(self, env):
        return elementary("scale", self.factor, self.a.evaluate(env))

    def variables(self):
        return self.a.variables()

    def substitute(self, mapping):
        return Scale(self.factor, self.a.substitute(mapping))


@dataclass(frozen=True)
class Func(Expr):
    fn: str
    a: Expr

    def evaluate(self, env):
        return elementary(self.fn, self.a.evaluate(env))

    def variables(self):
        return self.a.variables()

    def substitute(self, mapping):
        return Func(self.fn, self.a.substitute(mapping))


def cosh(x: Expr) -> Expr:
    return Func("cosh", _wrap(x))


def sinh(x: Expr) -> Expr:
    return Func("sinh", _wrap(x))


def cos(x: Expr) -> Expr:
    return Func("cos", _wrap(x))


def sin(x: Expr) -> Expr:
    return Func("sin", _wrap(x))


S = Var("s")
T = Var("t")


@dataclass(frozen=True)
class Jet2Point:
    """Value and partials of a map R^2 -> R^N; arrays end in an axis of length N."""

    value: np.ndarray
    d_s: np.ndarray
    d_t: np.ndarray
    d_ss: np.ndarray
    d_st: np.ndarray
    d_tt: np.ndarray
    signature: Signature

    def at(self, idx) -> "Jet2Point":
        """Single point out of a grid evaluation."""
        return Jet2Point(
            self.value[idx], self.d_s[idx], self.d_t[idx],
            self.d_ss[idx], self.d_st[idx], self.d_tt[idx], self.signature,
        )


@dataclass(frozen=True)
class SurfaceMap:
    """Parametric map (s, t) -> R^N_mu given component-wise as trees."""

    components: tuple[Expr, ...]
    signature: Signature
    name: str = "surface"

    def __post_init__(self):
        if len(self.components) != len(self.signature):
            raise ValueError("component count does not match the signature")

    def __call__(self, s, t) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast_shapes(s.shape, t.shape)
        env = {"s": np.broadcast_to(s, shape), "t": np.broadcast_to(t, shape)}
        return np.stack(
            [np.broadcast_to(np.asarray(c.evaluate(env), dtype=float), shape) for c in self.components],
            axis=-1,
        )

    def reparametrize(self, s_expr: Expr, t_expr: Expr, name: str | None = None) -> "SurfaceMap":
        comps = tuple(c.substitute({"s": s_expr, "t": t_expr}) for c in self.components)
        return SurfaceMap(comps, self.signature, name or self.name)


@dataclass(frozen=True)
class CurveMap:
    """Parametric curve u -> R^n given component-wise as trees in one variable."""

    components: tuple[Expr, ...]
    signature: Signature
    var: str = "s"

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.stack(
            [np.broadcast_to(np.asarray(c.evaluate({self.var: u}), dtype=float), u.shape)
             for c in self.components],
            axis=-1,
        )

    def jet(self, u: float, order: int = 4) -> Taylor1:
        x = Taylor1.variable(float(u), order)
        comps = []
        for c in self.components:
            r = c.evaluate({self.var: x})
            comps.append(r if isinstance(r, Taylor1) else Taylor1.constant(r, order))
        return Taylor1.stack(comps)


def _as_field(x, shape):
    return np.broadcast_to(np.asarray(x, dtype=float), shape)


def eval_map(F: SurfaceMap, s, t) -> Jet2Point:
    """Exact value and partials up to order two of F at (s, t).

    ``s`` and ``t`` may be arrays of a common shape; the result then has
    that shape plus a trailing coordinate axis.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(s.shape, t.shape)
    sj, tj = seed(np.broadcast_to(s, shape).copy(), np.broadcast_to(t, shape).copy())
    fields = [[] for _ in range(6)]
    for comp in F.components:
        r = comp.evaluate({"s": sj, "t": tj})
        if not isinstance(r, Jet2):
            r = Jet2.const(_as_field(r, shape))
        for acc, f in zip(fields, r._fields()):
            acc.append(_as_field(f, shape))
    arrays = [np.stack(acc, axis=-1) for acc in fields]
    return Jet2Point(*arrays, signature=F.signature)


def restrict_curve(F: SurfaceMap, indices: Sequence[int], var: str) -> CurveMap:
    comps = tuple(F.components[i] for i in indices)
    return CurveMap(comps, F.signature.restrict(indices), var)
