"""Frenet frames of unit-speed spacelike curves in R^4_1 (and R^3_1, R^3).

Frames are built from order-4 Taylor jets of the curve, so every frame
vector carries its own derivative and the Frenet equations can be checked
exactly (to roundoff) instead of by finite differences.

Two regimes:

* generic -- <gamma'', gamma''> != 0; frame {t, n1, n2, n3} and curvatures
  k1, k2, k3 (only {t, n1, n2} and k1, k2 for 3-dimensional curves, where
  k2 is the torsion);
* null -- gamma'' lightlike; pseudo-orthonormal frame {t, n1, n2, n3} with
  n1, n3 null, <n1, n3> = 1, and curvatures k1, k2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateCurveError, DegenerateInputError, RegimeError
from .expr import CurveMap, SurfaceMap, eval_map, restrict_curve
from .jets import Taylor1, minner
from .metric import LIGHTLIKE_TOL, CausalType, Signature, aux_norm, causal_type
from .product import ProductSpaceForm

UNIT_SPEED_TOL = 1e-9
DEGENERATE_TOL = 1e-10

GENERIC = "generic"
LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class FrenetGeneric:
    s: float
    t: np.ndarray
    n1: np.ndarray
    n2: np.ndarray | None
    n3: np.ndarray | None
    khat1: float
    khat2: float
    khat3: float | None
    eps1: int
    eps2: int | None
    eps3: int | None
    equation_residuals: tuple[float, ...]
    frame_residual: float

    regime = GENERIC

    @property
    def curvatures_sq(self) -> tuple:
        k3 = None if self.khat3 is None else self.khat3**2
        return (self.khat1**2, self.khat2**2, k3)

    @property
    def frame(self) -> list[np.ndarray]:
        return [v for v in (self.t, self.n1, self.n2, self.n3) if v is not None]

    @property
    def sign_product(self) -> int | None:
        """<t,t> eps1 <n2,n2> eps3; always -1 for a frame of R^4_1."""
        if self.eps3 is None:
            return None
        return self.eps1 * self.eps2 * self.eps3


@dataclass(frozen=True)
class FrenetNull:
    s: float
    t: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    n3: np.ndarray
    ktilde1: float
    ktilde2: float
    equation_residuals: tuple[float, ...]
    frame_residual: float
    # n3' = -t + k2 n2; <n3', t> = -<n3, n1> = -1 forces the t term
    n3_corrected_residual: float

    regime = LIGHTLIKE

    @property
    def curvatures_sq(self) -> tuple:
        return (self.ktilde1**2, self.ktilde2**2, None)

    @property
    def frame(self) -> list[np.ndarray]:
        return [self.t, self.n1, self.n2, self.n3]


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def _unit_tangent(jet: Taylor1, sig: Signature) -> Taylor1:
    if jet.order < 4:
        raise ValueError("Frenet analysis needs curve jets of order 4")
    if len(jet) != len(sig):
        raise ValueError("jet dimension does not match the signature")
    t = jet.deriv()
    speed = float(minner(sig.diag, t, t).value)
    if abs(speed - 1.0) > UNIT_SPEED_TOL:
        raise DegenerateInputError(f"curve is not unit-speed spacelike (<t,t> = {speed!r})")
    return t


def _frame_residual(sig: Signature, frame: Sequence[np.ndarray], gram: np.ndarray) -> float:
    G = sig.gram(np.array(frame))
    return float(np.max(np.abs(G - gram)))


def frenet_generic(jet: Taylor1, sig: Signature, s: float = float("nan")) -> FrenetGeneric:
    """Generic-regime Frenet data from an order-4 jet of a unit-speed curve."""
    eps = sig.diag
    n = len(sig)
    t = _unit_tangent(jet, sig)
    g2 = t.deriv()
    if causal_type(sig, g2.value) is CausalType.LIGHTLIKE:
        raise RegimeError("curvature vector is lightlike; use frenet_null")
    q1 = minner(eps, g2, g2)
    eps1 = _sign(float(q1.value))
    k1 = (q1 * eps1).sqrt()
    n1 = g2 / k1
    v = n1.deriv() + t * (k1 * eps1)
    v0 = v.value
    scale = max(float(k1.value), 1.0)
    if aux_norm(v0) <= DEGENERATE_TOL * scale:
        partial = FrenetGeneric(s, t.value, n1.value, None, None, float(k1.value), 0.0, None,
                                eps1, None, None, (aux_norm((t.deriv() - n1 * k1).value),), 0.0)
        err = DegenerateCurveError("second Frenet curvature vanishes (planar curve)")
        err.partial = partial
        raise err
    q2 = minner(eps, v, v)
    if abs(float(q2.value)) <= LIGHTLIKE_TOL * float(v0 @ v0):
        raise DegenerateCurveError("n1' + eps1 k1 t is lightlike")
    eps2 = _sign(float(q2.value))
    k2 = (q2 * eps2).sqrt()
    n2 = v / k2

    res = [
        aux_norm((t.deriv() - n1 * k1).value),
        aux_norm((n1.deriv() - (t * (-eps1 * k1) + n2 * k2)).value),
    ]
    if n == 3:
        # right-handed (t, n1, n2); torsion k2 carries the sign
        if np.linalg.det(np.array([t.value, n1.value, n2.value])) < 0:
            n2, k2 = -n2, -k2
        res[1] = aux_norm((n1.deriv() - (t * (-eps1 * k1) + n2 * k2)).value)
        res.append(aux_norm((n2.deriv() - n1 * (-eps1 * eps2 * k2)).value))
        frame = [t.value, n1.value, n2.value]
        fres = _frame_residual(sig, frame, np.diag([1.0, eps1, eps2]))
        return FrenetGeneric(s, t.value, n1.value, n2.value, None, float(k1.value), float(k2.value), None,
                             eps1, eps2, None, tuple(res), fres)
    if n != 4:
        raise ValueError("Frenet frames are implemented for curves in dimension 3 or 4")

    # n3 from the standard basis vector with the largest residual off {t, n1, n2}
    frame0 = [(t.value, 1), (n1.value, eps1), (n2.value, eps2)]
    best, best_norm = 0, -1.0
    for j in range(n):
        e = np.eye(n)[j]
        r = e - sum(sg * sig.inner(e, w) * w for w, sg in frame0)
        if aux_norm(r) > best_norm:
            best, best_norm = j, aux_norm(r)
    e = np.eye(n)[best]
    n3 = Taylor1.constant(e, n2.order)
    for w, sg in ((t, 1), (n1, eps1), (n2, eps2)):
        n3 = n3 - w * (minner(eps, n3, w) * sg)
    q3 = minner(eps, n3, n3)
    eps3 = _sign(float(q3.value))
    n3 = n3 / (q3 * eps3).sqrt()
    if np.linalg.det(np.array([t.value, n1.value, n2.value, n3.value])) < 0:
        n3 = -n3
    k3 = minner(eps, n2.deriv(), n3) * eps3

    res.append(aux_norm((n2.deriv() - (n1 * (eps3 * k2) + n3 * k3)).value))
    res.append(aux_norm((n3.deriv() - n2 * (eps1 * k3)).value))
    frame = [t.value, n1.value, n2.value, n3.value]
    fres = _frame_residual(sig, frame, np.diag([1.0, eps1, eps2, eps3]))
    return FrenetGeneric(s, t.value, n1.value, n2.value, n3.value, float(k1.value), float(k2.value),
                         float(k3.value), eps1, eps2, eps3, tuple(res), fres)


def frenet_null(jet: Taylor1, sig: Signature, s: float = float("nan")) -> FrenetNull:
    """Null-regime Frenet data of a unit-speed curve in R^4_1 with lightlike gamma''."""
    eps = sig.diag
    n = len(sig)
    t = _unit_tangent(jet, sig)
    n1 = t.deriv()
    if aux_norm(n1.value) <= DEGENERATE_TOL or causal_type(sig, n1.value) is not CausalType.LIGHTLIKE:
        raise RegimeError("curvature vector is not a nonzero lightlike vector; use frenet_generic")
    n1p = n1.deriv()
    q = minner(eps, n1p, n1p)
    if float(q.value) <= DEGENERATE_TOL * max(1.0, float(n1p.value @ n1p.value)):
        raise DegenerateCurveError("n1' vanishes or is not spacelike")
    k1 = q.sqrt()
    n2 = n1p / k1

    def off_plane(w):
        return w - t * minner(eps, w, t) - n2 * minner(eps, w, n2)

    best, best_val = 0, -1.0
    for j in range(n):
        e = Taylor1.constant(np.eye(n)[j], n2.order)
        val = abs(float(minner(eps, n1, off_plane(e)).value))
        if val > best_val:
            best, best_val = j, val
    w = off_plane(Taylor1.constant(np.eye(n)[best], n2.order))
    p = minner(eps, n1, w)
    a = p.reciprocal()
    b = -(a * minner(eps, w, w)) / (p * 2.0)
    n3 = w * a + n1 * b
    k2 = minner(eps, n3.deriv(), n2)

    res = (
        aux_norm((t.deriv() - n1).value),
        aux_norm((n1.deriv() - n2 * k1).value),
        aux_norm((n2.deriv() + n1 * k2 + n3 * k1).value),
        aux_norm((n3.deriv() - n2 * k2).value),
    )
    frame = [t.value, n1.value, n2.value, n3.value]
    expected = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=float)
    fres = _frame_residual(sig, frame, expected)
    corrected = aux_norm((n3.deriv() + t - n2 * k2).value)
    return FrenetNull(s, t.value, n1.value, n2.value, n3.value, float(k1.value), float(k2.value), res, fres,
                      corrected)


def frenet_at(curve: CurveMap, s: float, regime: str | None = None):
    """Frenet data at s; ``regime`` (if given) must agree with the numeric classifier."""
    jet = curve.jet(s, order=4)
    g2 = jet.deriv().deriv().value
    numeric = LIGHTLIKE if causal_type(curve.signature, g2) is CausalType.LIGHTLIKE else GENERIC
    if regime is not None and regime != numeric:
        raise RegimeError(f"exact regime {regime!r} disagrees with numeric classification {numeric!r} at s={s}")
    if numeric == LIGHTLIKE:
        return frenet_null(jet, curve.signature, s)
    return frenet_generic(jet, curve.signature, s)


@dataclass(frozen=True)
class ProductSplit:
    curve1: CurveMap
    curve2: CurveMap
    V1: tuple[int, ...]
    V2: tuple[int, ...]


def _order_indices(idx: Sequence[int], space: ProductSpaceForm) -> tuple[int, ...]:
    """Blocks containing a timelike coordinate first, ascending inside blocks."""
    eps = space.signature.epsilons
    blocks = []
    for i in (1, 2):
        b = space.block(i)
        blocks.append(sorted(j for j in idx if b.start <= j < b.stop))
    blocks.sort(key=lambda blk: 0 if any(eps[j] < 0 for j in blk) else 1)
    return tuple(j for blk in blocks for j in blk)


def split_product_curves(F: SurfaceMap, space: ProductSpaceForm, samples: int = 5) -> ProductSplit:
    """Write a separable F(s, t) = (gamma1(s), gamma2(t)) up to coordinate order."""
    I1, I2 = [], []
    for j, comp in enumerate(F.components):
        vs = comp.variables()
        if vs == {"s"}:
            I1.append(j)
        elif vs == {"t"}:
            I2.append(j)
        else:
            raise ValueError(f"component {j} depends on {sorted(vs) or 'no variable'}; map is not separable")
    V1 = _order_indices(I1, space)
    V2 = _order_indices(I2, space)
    u = np.linspace(-1.0, 1.0, samples)
    jet = eval_map(F, *np.meshgrid(u, u, indexing="ij"))
    if np.any(jet.d_t[..., list(V1)] != 0) or np.any(jet.d_s[..., list(V2)] != 0) or np.any(jet.d_st != 0):
        raise ValueError("factor curves do not separate")
    return ProductSplit(restrict_curve(F, V1, "s"), restrict_curve(F, V2, "t"), V1, V2)


@dataclass(frozen=True)
class CurveSummary:
    """Frenet data of a factor curve over several parameter samples."""

    regime: str
    dim: int
    samples: tuple
    curvature_vector_sq: np.ndarray    # <gamma'', gamma''> per sample
    curvatures_sq: np.ndarray          # (n_samples, 3); NaN where undefined
    equation_residual: float
    frame_residual: float
    consistent_residual: float    # null regime: last equation replaced by n3' = -t + k2 n2

    @property
    def mean_sq(self) -> np.ndarray:
        return np.mean(self.curvatures_sq, axis=0)

    @property
    def spread(self) -> np.ndarray:
        """max - min over samples of each curvature (not squared)."""
        k = np.sqrt(np.abs(self.curvatures_sq))
        return np.max(k, axis=0) - np.min(k, axis=0)   # NaN for undefined curvatures


def summarize_curve(curve: CurveMap, samples: Sequence[float], regime: str | None = None) -> CurveSummary:
    results = [frenet_at(curve, float(u), regime) for u in samples]
    regimes = {r.regime for r in results}
    if len(regimes) != 1:
        raise RegimeError("curve changes Frenet regime across samples")
    sig = curve.signature
    # generic: gamma'' = k1 n1; null: gamma'' = n1
    cv = np.array([float(sig.inner(r.n1, r.n1)) * (r.curvatures_sq[0] if r.regime == GENERIC else 1.0)
                   for r in results])
    ks = np.array([[np.nan if x is None else x for x in r.curvatures_sq] for r in results])
    return CurveSummary(
        regime=regimes.pop(),
        dim=len(sig),
        samples=tuple(float(u) for u in samples),
        curvature_vector_sq=cv,
        curvatures_sq=ks,
        equation_residual=max(max(r.equation_residuals) for r in results),
        frame_residual=max(r.frame_residual for r in results),
        consistent_residual=max(_consistent(r) for r in results),
    )


def _consistent(r) -> float:
    if r.regime == LIGHTLIKE:
        return max(*r.equation_residuals[:3], r.n3_corrected_residual)
    return max(r.equation_residuals)
