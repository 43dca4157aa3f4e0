"""The two families of flat umbilical surfaces.

* ``example1``: surfaces in H^3_k x R^2, a product of a Lorentzian helix and
  a Euclidean helix inside R^6_1.
* ``example2``: surfaces in H^3_{k1} x H^3_{k2} inside R^8_2.

Both are parametrized by moduli 0 < lambda1 < lambda2 < 1, the constant
eigenvalues of R along the coordinate directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CurvatureError, ModuliError
from .expr import S, T, SurfaceMap, cos, cosh, sin, sinh
from .metric import Signature
from .product import ProductSpaceForm

CONSTRAINT_TOL = 1e-12

GENERIC = "generic"
LIGHTLIKE = "lightlike"


def _check_moduli(l1: float, l2: float) -> None:
    if not (0.0 < l1 < l2 < 1.0):
        raise ModuliError(f"moduli must satisfy 0 < lambda1 < lambda2 < 1, got ({l1}, {l2})")


def _check_negative(name: str, k: float) -> None:
    if not k < 0:
        raise CurvatureError(f"{name} must be negative, got {k}")


@dataclass(frozen=True)
class Example1Params:
    k: float
    lambda1: float
    lambda2: float
    a1: float
    a2: float
    b1: float
    b2: float
    c: float
    r: float

    @property
    def k1(self) -> float:
        return self.k

    @property
    def k2(self) -> float:
        return 0.0

    @property
    def lambdas(self) -> tuple[float, float]:
        return (self.lambda1, self.lambda2)

    def constraint_residuals(self) -> dict[str, float]:
        a1, a2, b1, b2, c, r = self.a1, self.a2, self.b1, self.b2, self.c, self.r
        return {
            "a1^2-a2^2=r^2": a1**2 - a2**2 - r**2,
            "a1^2+b1^2=c^2": a1**2 + b1**2 - c**2,
            "a2^2+b2^2=c^2": a2**2 + b2**2 - c**2,
            "r^2=-1/k": r**2 + 1.0 / self.k,
        }


@dataclass(frozen=True)
class Example2Params:
    k1: float
    k2: float
    lambda1: float
    lambda2: float
    a1: float
    a2: float
    a3: float
    a4: float
    c: float
    d: float
    r1: float
    r2: float

    @property
    def lambdas(self) -> tuple[float, float]:
        return (self.lambda1, self.lambda2)

    def constraint_residuals(self) -> dict[str, float]:
        a1, a2, a3, a4, c, d = self.a1, self.a2, self.a3, self.a4, self.c, self.d
        return {
            "a1^2-a2^2=r1^2": a1**2 - a2**2 - self.r1**2,
            "a3^2-a4^2=r2^2": a3**2 - a4**2 - self.r2**2,
            "a1^2/c^2+a4^2/d^2=1": a1**2 / c**2 + a4**2 / d**2 - 1.0,
            "a2^2/c^2+a3^2/d^2=1": a2**2 / c**2 + a3**2 / d**2 - 1.0,
        }


def _assert_constraints(params) -> None:
    scale = max(1.0, params.c**2)
    bad = {k: v for k, v in params.constraint_residuals().items() if abs(v) > CONSTRAINT_TOL * scale}
    if bad:
        raise ModuliError(f"derived parameters violate the defining constraints: {bad}")


def example1_map(a1: float, a2: float, b1: float, b2: float, c: float) -> SurfaceMap:
    """(a1 cosh s/c, a1 sinh s/c, a2 cos t/c, a2 sin t/c, b1 s/c, b2 t/c) in R^6_1."""
    u, v = S / c, T / c
    comps = (a1 * cosh(u), a1 * sinh(u), a2 * cos(v), a2 * sin(v), b1 * u, b2 * v)
    return SurfaceMap(comps, Signature.lorentz(4) + Signature.euclidean(2), "example1")


def example2_map(a1: float, a2: float, a3: float, a4: float, c: float, d: float) -> SurfaceMap:
    """The factor-blocked map into R^8_2 with signature (-,+,+,+,-,+,+,+)."""
    comps = (
        a1 * cosh(S / c), a1 * sinh(S / c), a2 * cos(T / c), a2 * sin(T / c),
        a3 * cosh(T / d), a3 * sinh(T / d), a4 * cos(S / d), a4 * sin(S / d),
    )
    return SurfaceMap(comps, Signature.lorentz(4) + Signature.lorentz(4), "example2")


def build_example1(k: float, lambda1: float, lambda2: float) -> tuple[Example1Params, SurfaceMap]:
    _check_negative("k", k)
    _check_moduli(lambda1, lambda2)
    r2 = -1.0 / k
    gap = lambda2 - lambda1
    p = Example1Params(
        k=k,
        lambda1=lambda1,
        lambda2=lambda2,
        a1=math.sqrt(r2 * (1 - lambda1) / gap),
        a2=math.sqrt(r2 * (1 - lambda2) / gap),
        b1=math.sqrt(r2 * lambda1 / gap),
        b2=math.sqrt(r2 * lambda2 / gap),
        c=math.sqrt(r2 / gap),
        r=math.sqrt(r2),
    )
    _assert_constraints(p)
    return p, example1_map(p.a1, p.a2, p.b1, p.b2, p.c)


def build_example2(k1: float, k2: float, lambda1: float, lambda2: float) -> tuple[Example2Params, SurfaceMap]:
    _check_negative("k1", k1)
    _check_negative("k2", k2)
    _check_moduli(lambda1, lambda2)
    r1sq, r2sq = -1.0 / k1, -1.0 / k2
    gap = lambda2 - lambda1
    p = Example2Params(
        k1=k1,
        k2=k2,
        lambda1=lambda1,
        lambda2=lambda2,
        a1=math.sqrt(r1sq * (1 - lambda1) / gap),
        a2=math.sqrt(r1sq * (1 - lambda2) / gap),
        a3=math.sqrt(r2sq * lambda2 / gap),
        a4=math.sqrt(r2sq * lambda1 / gap),
        c=math.sqrt(r1sq / gap),
        d=math.sqrt(r2sq / gap),
        r1=math.sqrt(r1sq),
        r2=math.sqrt(r2sq),
    )
    _assert_constraints(p)
    return p, example2_map(p.a1, p.a2, p.a3, p.a4, p.c, p.d)


def mean_curvature_norm_sq(k1: float, k2: float, lambda1: float, lambda2: float) -> float:
    """-k1 (1 - l1)(1 - l2) - k2 l1 l2."""
    return -k1 * (1 - lambda1) * (1 - lambda2) - k2 * lambda1 * lambda2


@dataclass(frozen=True)
class MeanCurvaturePrediction:
    vector: SurfaceMap      # h_* H as a map of (s, t)
    norm_sq: float


def closed_form_H(params) -> MeanCurvaturePrediction:
    if isinstance(params, Example1Params):
        p = params
        f = p.k * p.a1 * p.a2 / p.c**2
        u, v = S / p.c, T / p.c
        comps = (f * p.a2 * cosh(u), f * p.a2 * sinh(u), f * p.a1 * cos(v), f * p.a1 * sin(v), 0.0 * u, 0.0 * v)
        sig = Signature.lorentz(4) + Signature.euclidean(2)
    else:
        p = params
        f1 = p.k1 * p.a1 * p.a2 / p.c**2
        f2 = p.k2 * p.a3 * p.a4 / p.d**2
        comps = (
            f1 * p.a2 * cosh(S / p.c), f1 * p.a2 * sinh(S / p.c), f1 * p.a1 * cos(T / p.c), f1 * p.a1 * sin(T / p.c),
            f2 * p.a4 * cosh(T / p.d), f2 * p.a4 * sinh(T / p.d), f2 * p.a3 * cos(S / p.d), f2 * p.a3 * sin(S / p.d),
        )
        sig = Signature.lorentz(4) + Signature.lorentz(4)
    return MeanCurvaturePrediction(
        SurfaceMap(tuple(comps), sig, "mean_curvature"),
        mean_curvature_norm_sq(p.k1, p.k2, p.lambda1, p.lambda2),
    )


@dataclass(frozen=True)
class CurvePrediction:
    """Closed-form Frenet data of one factor curve.

    ``curvatures_sq`` holds squared Frenet curvatures in order: (k1^2, k2^2,
    k3^2) in the generic regime (k2 is the torsion for the 3-dimensional
    curves of example1, whose k3 is None), (k1~^2, k2~^2, None) in the
    lightlike regime.
    """

    curve: int
    regime: str
    dim: int
    curvature_vector_sq: float          # <gamma'', gamma''>
    curvatures_sq: tuple


def curve_regime(params, i: int) -> str:
    """Exact test of kappa*l_i - k1 == 0 on the binary values of the moduli."""
    k1, k2 = Fraction(params.k1), Fraction(params.k2)
    li = Fraction(params.lambdas[i - 1])
    return LIGHTLIKE if (k1 + k2) * li - k1 == 0 else GENERIC


def predicted_curve_invariants(params, which: int) -> CurvePrediction:
    if which not in (1, 2):
        raise ValueError("factor curve index must be 1 or 2")
    li = params.lambdas[which - 1]
    lj = params.lambdas[2 - which]
    k1, k2 = params.k1, params.k2
    kappa = k1 + k2
    curv_sq = (li - lj) * (kappa * li - k1) + 0.0    # no negative zero
    if isinstance(params, Example1Params):
        k = params.k
        curv_sq = k * (lj - li) * (1 - li)
        tau_sq = -k * li * abs(lj - li)
        return CurvePrediction(which, GENERIC, 3, curv_sq, (abs(curv_sq), tau_sq, None))
    regime = curve_regime(params, which)
    if regime == GENERIC:
        m = abs(kappa * li - k1)
        ks = (
            abs((li - lj) * (kappa * li - k1)),
            kappa**2 * abs(li - lj) * li * (1 - li) / m,
            k1 * k2 * abs(li - lj) / m,
        )
    else:
        ks = (
            k1 * k2 * (kappa * lj - k1) ** 2 / kappa**2,
            (k1 - k2) ** 2 / (4 * k1 * k2),
            None,
        )
    return CurvePrediction(which, regime, 4, curv_sq, ks)


@dataclass(frozen=True)
class Family:
    """A constructed surface together with its moduli and ambient product."""

    name: str
    params: object
    space: ProductSpaceForm
    surface: SurfaceMap

    @property
    def moduli(self) -> dict:
        p = self.params
        if isinstance(p, Example1Params):
            return {"k": p.k, "lambda1": p.lambda1, "lambda2": p.lambda2}
        return {"k1": p.k1, "k2": p.k2, "lambda1": p.lambda1, "lambda2": p.lambda2}


def build_family(name: str, *, k1: float, k2: float | None = None, lambda1: float, lambda2: float) -> Family:
    """Build ``example1`` (k1 is the curvature k; k2 ignored) or ``example2``."""
    if name == "example1":
        params, F = build_example1(k1, lambda1, lambda2)
        return Family(name, params, ProductSpaceForm(k1, 3, 0.0, 2), F)
    if name == "example2":
        if k2 is None:
            raise CurvatureError("example2 needs k2")
        params, F = build_example2(k1, k2, lambda1, lambda2)
        return Family(name, params, ProductSpaceForm(k1, 3, k2, 3), F)
    raise ValueError(f"unknown family {name!r}")
