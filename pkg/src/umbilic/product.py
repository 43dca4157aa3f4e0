"""Products of space forms through their flat embedding.

A curved factor Q^n_k (k != 0) sits in R^{n+1} as the quadric <x,x> = 1/k
(with a timelike first coordinate when k < 0); a flat factor is R^n itself.
The product lives in R^{N1+N2}_mu with the factor coordinates in two
consecutive blocks.

:func:`pointwise_geometry` turns a second-order jet of a surface F = h o f
into the extrinsic data of f: second fundamental form, mean curvature
vector, the tensors R, S, T and the Gauss curvature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import CurvatureError, DomainError, ImmersionError, SignatureError
from .expr import Jet2Point, SurfaceMap, eval_map
from .metric import LIGHTLIKE_TOL, RANK_TOL, Signature, aux_norm

MEMBERSHIP_TOL = 1e-9


def sigma(k: float) -> int:
    return 1 if k < 0 else 0


@dataclass(frozen=True)
class ProductSpaceForm:
    """Q^{n1}_{k1} x Q^{n2}_{k2} with curvature-sum kappa = k1 + k2 != 0."""

    k1: float
    n1: int
    k2: float
    n2: int

    def __post_init__(self):
        if self.k1 + self.k2 == 0:
            raise CurvatureError("k1 + k2 must be nonzero")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("factor dimensions must be positive")

    @property
    def kappa(self) -> float:
        return self.k1 + self.k2

    @property
    def curvatures(self) -> tuple[float, float]:
        return (self.k1, self.k2)

    def N(self, i: int) -> int:
        k, n = ((self.k1, self.n1), (self.k2, self.n2))[i - 1]
        return n + 1 if k != 0 else n

    @property
    def N1(self) -> int:
        return self.N(1)

    @property
    def N2(self) -> int:
        return self.N(2)

    @property
    def dim(self) -> int:
        return self.N1 + self.N2

    @property
    def mu(self) -> int:
        return sigma(self.k1) + sigma(self.k2)

    def radius(self, i: int) -> float | None:
        k = self.curvatures[i - 1]
        return None if k == 0 else abs(k) ** -0.5

    def block(self, i: int) -> slice:
        return slice(0, self.N1) if i == 1 else slice(self.N1, self.dim)

    def factor_signature(self, i: int) -> Signature:
        k = self.curvatures[i - 1]
        n = self.N(i)
        return Signature.lorentz(n, 1) if k < 0 else Signature.euclidean(n)

    @cached_property
    def signature(self) -> Signature:
        return self.factor_signature(1) + self.factor_signature(2)

    def project(self, i: int, v) -> np.ndarray:
        """Coordinate projection onto factor block i, kept in ambient coordinates."""
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        b = self.block(i)
        out[..., b] = v[..., b]
        return out

    def nu_sign(self, i: int) -> int:
        """<nu_i, nu_i>: -1 on a hyperbolic factor, +1 on a spherical one."""
        return -1 if self.curvatures[i - 1] < 0 else 1

    def nu(self, i: int, p) -> np.ndarray | None:
        r = self.radius(i)
        if r is None:
            return None
        return self.project(i, p) / r


def membership_residual(space: ProductSpaceForm, p) -> tuple[float, float]:
    """(<pi_1 p, pi_1 p> - 1/k1, <pi_2 p, pi_2 p> - 1/k2); flat factors give 0."""
    sig = space.signature
    out = []
    for i, k in enumerate(space.curvatures, start=1):
        if k == 0:
            out.append(0.0)
        else:
            q = space.project(i, p)
            out.append(float(sig.inner(q, q) - 1.0 / k))
    return tuple(out)


@dataclass(frozen=True)
class ImmersionPointData:
    """Extrinsic data of f at one parameter point.

    Tangent quantities are expressed in the orthonormal frame ``tangents``
    obtained by Gram-Schmidt on (F_s, F_t); ``coord_to_frame`` is the 2x2
    matrix M with tangents[a] = sum_i M[a, i] * (F_s, F_t)[i].  Normal
    quantities use the orthonormal ``normal_frame`` of f.
    """

    space: ProductSpaceForm
    param: tuple[float, float]
    point: np.ndarray
    coord_tangents: np.ndarray        # (2, N): F_s, F_t
    first_form: np.ndarray            # (2, 2) in (s, t) coordinates
    coord_to_frame: np.ndarray        # (2, 2)
    tangents: np.ndarray              # (2, N) orthonormal
    nus: tuple                        # ((nu_i, sign), ...) curved factors only
    normal_frame: np.ndarray          # (m, N), m = n1 + n2 - 2
    alpha_F: np.ndarray               # (2, 2, N) second fundamental form of F
    alpha_f: np.ndarray               # (2, 2, N) with nu components removed
    alpha_f_components: np.ndarray    # (m, 2, 2)
    H: np.ndarray                     # (N,)
    R: np.ndarray                     # (2, 2)
    S: np.ndarray                     # (m, 2)
    T: np.ndarray                     # (m, m)
    gauss_curvature: float

    @property
    def signature(self) -> Signature:
        return self.space.signature

    def inner(self, u, v):
        return self.space.signature.inner(u, v)

    # -- operators as ambient maps (gauge free) -------------------------
    def tangent_part(self, v) -> np.ndarray:
        c = self.inner(self.tangents, v)
        return c @ self.tangents

    def normal_part(self, v) -> np.ndarray:
        c = self.inner(self.normal_frame, v)
        return c @ self.normal_frame

    def tangent_coords(self, v) -> np.ndarray:
        return self.inner(self.tangents, v)

    def apply_R(self, X) -> np.ndarray:
        return self.tangent_part(self.space.project(2, X))

    def apply_S(self, X) -> np.ndarray:
        return self.normal_part(self.space.project(2, X))

    def apply_St(self, xi) -> np.ndarray:
        return self.tangent_part(self.space.project(2, xi))

    def apply_T(self, xi) -> np.ndarray:
        return self.normal_part(self.space.project(2, xi))

    def alpha(self, X, Y) -> np.ndarray:
        x = self.tangent_coords(X)
        y = self.tangent_coords(Y)
        return np.einsum("a,b,abn->n", x, y, self.alpha_f)

    def shape_operator(self, xi, X) -> np.ndarray:
        """A_xi X, defined by <A_xi X, Y> = <alpha(X, Y), xi>."""
        x = self.tangent_coords(X)
        a = np.einsum("a,abn->bn", x, self.alpha_f)
        return self.inner(a, xi) @ self.tangents

    # -- principal data --------------------------------------------------
    def principal(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) of R and the eigenvectors as columns.

        Eigenvector signs are fixed so that the largest-magnitude entry is
        positive.
        """
        lam, V = np.linalg.eigh(self.R)
        for j in range(V.shape[1]):
            k = int(np.argmax(np.abs(V[:, j])))
            if V[k, j] < 0:
                V[:, j] = -V[:, j]
        return lam, V

    def principal_directions(self) -> np.ndarray:
        """Ambient eigenvectors X_1, X_2 of R (rows)."""
        _, V = self.principal()
        return V.T @ self.tangents

    def principal_param_directions(self) -> np.ndarray:
        """(s, t)-coordinate components of X_1, X_2 (rows)."""
        _, V = self.principal()
        return V.T @ self.coord_to_frame

    def xi(self) -> np.ndarray:
        """xi_i = S X_i in ambient coordinates (rows)."""
        return np.array([self.apply_S(X) for X in self.principal_directions()])

    def Z(self) -> np.ndarray:
        """Z_i = alpha_F(X_i, X_i) in ambient coordinates (rows)."""
        _, V = self.principal()
        return np.einsum("ai,bi,abn->in", V, V, self.alpha_F)


def _normal_frames(space: ProductSpaceForm, E: np.ndarray, nus) -> np.ndarray:
    """Normal frames of f for a batch: complement of {E_1, E_2, nu_i}.

    Batched form of :func:`orthonormalize_against` applied to the standard
    basis with the tangents and nu fields as fixed directions (same
    largest-residual-first pivoting, ties to the lowest index).
    """
    sig = space.signature
    eps = sig.diag
    B, N = E.shape[0], space.dim
    m = space.n1 + space.n2 - 2
    fixed = [(E[:, 0], 1.0), (E[:, 1], 1.0)] + [(nu, float(sign)) for nu, sign in nus]
    done = []
    for w, sign in fixed:
        for u, su in done:
            w = w - su * ((w * u) @ eps)[:, None] * u
        q = (w * w) @ eps
        aux = np.einsum("bn,bn->b", w, w)
        if np.any(np.abs(q) <= LIGHTLIKE_TOL * aux) or np.any(np.sign(q) != sign):
            raise ImmersionError("tangent plane and nu fields are not independent")
        done.append((w / np.sqrt(np.abs(q))[:, None], sign))
    res = np.broadcast_to(np.eye(N), (B, N, N)).copy()
    for w, sign in done:
        res -= sign * (res @ (eps * w)[:, :, None]) * w[:, None, :]
    alive = np.ones((B, N), dtype=bool)
    out = np.empty((B, m, N))
    rows = np.arange(B)
    for j in range(m):
        norms = np.where(alive, np.linalg.norm(res, axis=2), -1.0)
        k = np.argmax(norms, axis=1)
        if np.any(norms[rows, k] < RANK_TOL):
            raise ImmersionError("normal space is rank deficient")
        r = res[rows, k]
        q = (r * r) @ eps
        if np.any(q <= LIGHTLIKE_TOL * norms[rows, k] ** 2):
            raise SignatureError("normal space of f is not positive definite")
        g = r / np.sqrt(q)[:, None]
        for i in range(j):
            g = g - ((g * out[:, i]) @ eps)[:, None] * out[:, i]
        g = g / np.sqrt((g * g) @ eps)[:, None]
        out[:, j] = g
        alive[rows, k] = False
        res -= (res @ (eps * g)[:, :, None]) * g[:, None, :]
    return out


def _batch_geometry(space: ProductSpaceForm, jet: Jet2Point, params) -> list[ImmersionPointData]:
    sig = space.signature
    eps = sig.diag
    p = np.asarray(jet.value, dtype=float).reshape(-1, space.dim)
    B = p.shape[0]
    params = np.asarray(params, dtype=float).reshape(B, 2)

    for i, k in enumerate(space.curvatures, start=1):
        if k != 0:
            q = space.project(i, p)
            res = (q * q) @ eps - 1.0 / k
            scale = np.maximum(1.0, np.einsum("bn,bn->b", p, p))
            if np.any(np.abs(res) > MEMBERSHIP_TOL * scale):
                bad = int(np.argmax(np.abs(res) / scale))
                raise DomainError(f"point {params[bad].tolist()} is off factor {i} (residual {res[bad]:.3e})")

    X = np.stack([jet.d_s.reshape(B, -1), jet.d_t.reshape(B, -1)], axis=1)
    I = np.einsum("bin,bjn,n->bij", X, X, eps)
    det = I[:, 0, 0] * I[:, 1, 1] - I[:, 0, 1] ** 2
    ok = (I[:, 0, 0] > 0) & (det > 1e-14 * I[:, 0, 0] * I[:, 1, 1])
    if not np.all(ok):
        bad = int(np.argmin(ok))
        raise ImmersionError(f"degenerate first fundamental form at {params[bad].tolist()}")
    # Gram-Schmidt in order: E = M X with M the inverse Cholesky factor of I
    M = np.linalg.inv(np.linalg.cholesky(I))
    E = M @ X

    nus = [(space.nu(i, p), space.nu_sign(i)) for i in (1, 2) if space.curvatures[i - 1] != 0]
    eta = _normal_frames(space, E, nus)

    d2 = np.stack(
        [np.stack([jet.d_ss.reshape(B, -1), jet.d_st.reshape(B, -1)], axis=1),
         np.stack([jet.d_st.reshape(B, -1), jet.d_tt.reshape(B, -1)], axis=1)],
        axis=1,
    )
    d2E = np.einsum("bai,bcj,bijn->bacn", M, M, d2)
    tang = np.einsum("bacn,bdn,n->bacd", d2E, E, eps)
    alpha_F = d2E - np.einsum("bacd,bdn->bacn", tang, E)
    alpha_f = alpha_F.copy()
    for nu, sign in nus:
        alpha_f -= sign * np.einsum("bacn,bn,n->bac", alpha_F, nu, eps)[..., None] * nu[:, None, None, :]
    comps = np.einsum("bacn,bmn,n->bmac", alpha_f, eta, eps)
    H = 0.5 * (alpha_f[:, 0, 0] + alpha_f[:, 1, 1])

    pE = space.project(2, E)
    peta = space.project(2, eta)
    R = np.einsum("bin,bjn,n->bij", pE, pE, eps)
    S = np.einsum("ban,bin,n->bai", peta, pE, eps)
    T = np.einsum("ban,bcn,n->bac", peta, peta, eps)
    K = (np.einsum("bn,bn,n->b", alpha_F[:, 0, 0], alpha_F[:, 1, 1], eps)
         - np.einsum("bn,bn,n->b", alpha_F[:, 0, 1], alpha_F[:, 0, 1], eps))

    return [
        ImmersionPointData(
            space=space,
            param=(float(params[b, 0]), float(params[b, 1])),
            point=p[b],
            coord_tangents=X[b],
            first_form=I[b],
            coord_to_frame=M[b],
            tangents=E[b],
            nus=tuple((nu[b], sign) for nu, sign in nus),
            normal_frame=eta[b],
            alpha_F=alpha_F[b],
            alpha_f=alpha_f[b],
            alpha_f_components=comps[b],
            H=H[b],
            R=R[b],
            S=S[b],
            T=T[b],
            gauss_curvature=float(K[b]),
        )
        for b in range(B)
    ]


def pointwise_geometry(space: ProductSpaceForm, jet: Jet2Point, param=(math.nan, math.nan)) -> ImmersionPointData:
    """All pointwise extrinsic data of f from a jet of F = h o f at one point.

    Raises DomainError if the point is off the product and ImmersionError
    if the tangent vectors are dependent.
    """
    if len(jet.signature) != space.dim or np.shape(jet.value) != (space.dim,):
        raise DomainError("jet does not describe a single point of this product")
    return _batch_geometry(space, jet, [param])[0]


def batch_geometry(space: ProductSpaceForm, F: SurfaceMap, s, t) -> list[ImmersionPointData]:
    """pointwise_geometry at many parameter points (flattened, C order)."""
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    s, t = s.ravel(), t.ravel()
    if s.size == 0:
        return []
    return _batch_geometry(space, eval_map(F, s, t), np.stack([s, t], axis=1))


def geometry_at(space: ProductSpaceForm, F: SurfaceMap, s: float, t: float) -> ImmersionPointData:
    return pointwise_geometry(space, eval_map(F, s, t), (s, t))


def tensor_identity_residuals(d: ImmersionPointData) -> float:
    """max Frobenius norm of S^tS - R(I-R), TS - S(I-R), SS^t - T(I-T)."""
    R, S, T = d.R, d.S, d.T
    I2 = np.eye(R.shape[0])
    Im = np.eye(T.shape[0])
    res = (
        S.T @ S - R @ (I2 - R),
        T @ S - S @ (I2 - R),
        S @ S.T - T @ (Im - T),
    )
    return max(float(np.linalg.norm(r)) for r in res)


def umbilicity_residual(d: ImmersionPointData) -> float:
    a = d.alpha_f
    return max(aux_norm(a[0, 0] - d.H), aux_norm(a[1, 1] - d.H), aux_norm(a[0, 1]))


def gauss_equation_rhs(d: ImmersionPointData) -> float:
    """k1(1-l1)(1-l2) + k2 l1 l2 + |H|^2 with l1, l2 the eigenvalues of R."""
    lam, _ = d.principal()
    k1, k2 = d.space.curvatures
    return float(k1 * (1 - lam[0]) * (1 - lam[1]) + k2 * lam[0] * lam[1] + d.inner(d.H, d.H))


def r_parallel_residual(d: ImmersionPointData) -> float:
    """max |A_{SY}X + S^t alpha(X,Y)| over the tangent frame; vanishes iff nabla R = 0."""
    E = d.tangents
    return max(
        aux_norm(d.shape_operator(d.apply_S(E[b]), E[a]) + d.apply_St(d.alpha(E[a], E[b])))
        for a in range(2) for b in range(2)
    )


@dataclass(frozen=True)
class GridSpec:
    rect: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    shape: tuple[int, int] = (16, 16)

    def __post_init__(self):
        ns, nt = self.shape
        if ns < 2 or nt < 2:
            raise ValueError(f"grid resolution must be at least 2x2, got {ns}x{nt}")
        s0, s1, t0, t1 = self.rect
        if not (s1 > s0 and t1 > t0):
            raise ValueError(f"empty parameter rectangle {self.rect}")

    @property
    def s(self) -> np.ndarray:
        return np.linspace(self.rect[0], self.rect[1], self.shape[0])

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.rect[2], self.rect[3], self.shape[1])

    @property
    def diagonal(self) -> float:
        s0, s1, t0, t1 = self.rect
        return math.hypot(s1 - s0, t1 - t0)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.s, self.t, indexing="ij")


@dataclass
class SurfaceGrid:
    """Pointwise geometry over a parameter rectangle (s-major)."""

    spec: GridSpec
    space: ProductSpaceForm
    surface: SurfaceMap
    points: list[list[ImmersionPointData]] = field(default_factory=list)

    @classmethod
    def build(cls, space: ProductSpaceForm, surface: SurfaceMap, spec: GridSpec) -> "SurfaceGrid":
        ss, tt = spec.mesh()
        flat = batch_geometry(space, surface, ss, tt)
        nt = spec.shape[1]
        pts = [flat[i * nt:(i + 1) * nt] for i in range(spec.shape[0])]
        return cls(spec, space, surface, pts)

    def __iter__(self):
        for row in self.points:
            yield from row

    def interior(self):
        ns, nt = self.spec.shape
        for i in range(1, ns - 1):
            for j in range(1, nt - 1):
                yield self.points[i][j]


# -- finite-difference covariant checks ----------------------------------


@dataclass
class EquationResiduals:
    gauss: float = 0.0
    flatness: float = 0.0
    r_parallel: float = 0.0
    codazzi: float = 0.0
    r_derivative: float = 0.0
    s_derivative: float = 0.0
    t_derivative: float = 0.0
    where: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    fd_step: float = 0.0
    points: int = 0

    def update(self, name: str, value: float, param) -> None:
        if name not in self.where or value > getattr(self, name):
            setattr(self, name, float(value))
            self.where[name] = [float(param[0]), float(param[1])]


class Stencil:
    """Geometry at p +- h w for the parameter directions the checks need.

    Directions are keyed ("E", a) for the a-th orthonormal tangent and
    ("X", i) for the i-th eigenvector of R.
    """

    def __init__(self, d: ImmersionPointData, h: float, pairs: dict):
        self.d, self.h, self.pairs = d, h, pairs

    @staticmethod
    def directions(d: ImmersionPointData) -> dict:
        W = d.principal_param_directions()
        return {("E", 0): d.coord_to_frame[0], ("E", 1): d.coord_to_frame[1],
                ("X", 0): W[0], ("X", 1): W[1]}

    @classmethod
    def build_many(cls, space, surface, ds: Sequence[ImmersionPointData], h: float) -> list["Stencil"]:
        keys, ss, tt = [], [], []
        for n, d in enumerate(ds):
            s, t = d.param
            for key, w in cls.directions(d).items():
                keys.append((n, key))
                ss += [s + h * w[0], s - h * w[0]]
                tt += [t + h * w[1], t - h * w[1]]
        geo = batch_geometry(space, surface, np.array(ss), np.array(tt))
        pairs: list[dict] = [dict() for _ in ds]
        for m, (n, key) in enumerate(keys):
            pairs[n][key] = (geo[2 * m], geo[2 * m + 1])
        return [cls(d, h, pr) for d, pr in zip(ds, pairs)]

    def deriv(self, key, fn) -> np.ndarray:
        gp, gm = self.pairs[key]
        return (fn(gp) - fn(gm)) / (2 * self.h)


def codazzi_residual(d: ImmersionPointData, st: Stencil) -> float:
    """max_i |nabla^perp_{X_i} H - (kappa l_j - k1) xi_i| with X_i eigenvectors of R."""
    lam, _ = d.principal()
    xi = d.xi()
    k1 = d.space.k1
    kappa = d.space.kappa
    worst = 0.0
    for i in range(2):
        j = 1 - i
        lhs = d.normal_part(st.deriv(("X", i), lambda g: g.H))
        rhs = (kappa * lam[j] - k1) * xi[i]
        worst = max(worst, aux_norm(lhs - rhs))
    return worst


def derivative_equation_residuals(d: ImmersionPointData, st: Stencil) -> tuple[float, float, float]:
    """Residuals of the covariant derivative equations for R, S and T.

    (nabla_X R)Y = A_{SY}X + S^t alpha(X,Y)
    (nabla_X S)Y = T alpha(X,Y) - alpha(X,RY)
    (nabla_X T)xi = -S A_xi X - alpha(X, S^t xi)

    X, Y run over the orthonormal tangent frame (extended by the
    Gram-Schmidt frame field) and xi over the normal fields P_N(c) for the
    constant vectors c = eta_a(p).
    """
    rR = rS = rT = 0.0
    E = d.tangents
    for a in range(2):
        key = ("E", a)
        X = E[a]
        for b in range(2):
            Y = E[b]
            dY = d.tangent_part(st.deriv(key, lambda g, b=b: g.tangents[b]))
            nRY = d.tangent_part(st.deriv(key, lambda g, b=b: g.apply_R(g.tangents[b])))
            lhs = nRY - d.apply_R(dY)
            rhs = d.shape_operator(d.apply_S(Y), X) + d.apply_St(d.alpha(X, Y))
            rR = max(rR, aux_norm(lhs - rhs))

            nSY = d.normal_part(st.deriv(key, lambda g, b=b: g.apply_S(g.tangents[b])))
            lhs = nSY - d.apply_S(dY)
            rhs = d.apply_T(d.alpha(X, Y)) - d.alpha(X, d.apply_R(Y))
            rS = max(rS, aux_norm(lhs - rhs))
        for c in d.normal_frame:
            xi = d.normal_part(c)
            dxi = d.normal_part(st.deriv(key, lambda g, c=c: g.normal_part(c)))
            nTxi = d.normal_part(st.deriv(key, lambda g, c=c: g.apply_T(g.normal_part(c))))
            lhs = nTxi - d.apply_T(dxi)
            rhs = -d.apply_S(d.shape_operator(xi, X)) - d.alpha(X, d.apply_St(xi))
            rT = max(rT, aux_norm(lhs - rhs))
    return rR, rS, rT


def fundamental_equation_residuals(grid: SurfaceGrid, space: ProductSpaceForm | None = None) -> EquationResiduals:
    """Gauss, reduced Codazzi and R/S/T derivative equations over a grid.

    Gauss is checked at every grid point, the finite-difference equations
    at interior points with central step 1e-4 times the rectangle diagonal.
    """
    space = space or grid.space
    out = EquationResiduals()
    h = 1e-4 * grid.spec.diagonal
    out.fd_step = h
    ns, nt = grid.spec.shape
    if ns < 4 or nt < 4:
        out.warnings.append(f"grid {ns}x{nt} is too coarse for finite-difference checks (need 4x4)")
    for d in grid:
        out.update("gauss", abs(d.gauss_curvature - gauss_equation_rhs(d)), d.param)
        out.update("flatness", abs(d.gauss_curvature), d.param)
        out.update("r_parallel", r_parallel_residual(d), d.param)
    interior = list(grid.interior())
    for d, st in zip(interior, Stencil.build_many(space, grid.surface, interior, h)):
        out.update("codazzi", codazzi_residual(d, st), d.param)
        rR, rS, rT = derivative_equation_residuals(d, st)
        out.update("r_derivative", rR, d.param)
        out.update("s_derivative", rS, d.param)
        out.update("t_derivative", rT, d.param)
        out.points += 1
    return out
