"""Pseudo-Euclidean linear algebra with a diagonal sign metric.

Vectors are plain numpy arrays; the metric lives in a :class:`Signature`.
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateFrameError,
    DegenerateInputError,
    DimensionError,
    InvalidFrameError,
    SignatureError,
)

LIGHTLIKE_TOL = 1e-9
RANK_TOL = 1e-10
FRAME_TOL = 1e-9


class CausalType(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class Signature:
    """Diagonal metric diag(eps_1, ..., eps_N) with every eps_i = +-1."""

    epsilons: tuple[int, ...]

    def __post_init__(self):
        eps = tuple(int(e) for e in self.epsilons)
        if any(e not in (-1, 1) for e in eps):
            raise SignatureError(f"signature entries must be +-1, got {self.epsilons}")
        object.__setattr__(self, "epsilons", eps)
        d = np.asarray(eps, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "_diag", d)

    @classmethod
    def lorentz(cls, n: int, index: int = 1) -> "Signature":
        """(-, ..., -, +, ..., +) with ``index`` leading minus signs."""
        return cls((-1,) * index + (1,) * (n - index))

    @classmethod
    def euclidean(cls, n: int) -> "Signature":
        return cls((1,) * n)

    def __len__(self) -> int:
        return len(self.epsilons)

    def __add__(self, other: "Signature") -> "Signature":
        return Signature(self.epsilons + other.epsilons)

    @property
    def index(self) -> int:
        return sum(1 for e in self.epsilons if e < 0)

    @property
    def diag(self) -> np.ndarray:
        return self._diag

    def restrict(self, indices: Sequence[int]) -> "Signature":
        return Signature(tuple(self.epsilons[i] for i in indices))

    def _check(self, *vs: np.ndarray) -> None:
        for v in vs:
            if np.shape(v)[-1] != len(self.epsilons):
                raise DimensionError(
                    f"vector of length {np.shape(v)[-1]} in a space of dimension {len(self)}"
                )

    def inner(self, u, v):
        """sum_i eps_i u_i v_i; broadcasts over leading axes."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        self._check(u, v)
        return (u * v) @ self._diag

    def norm_sq(self, v):
        return self.inner(v, v)

    def lower(self, v) -> np.ndarray:
        """Metric dual of v in coordinates: diag(eps) @ v."""
        return np.asarray(v, dtype=float) * self.diag

    def gram(self, vs) -> np.ndarray:
        vs = np.atleast_2d(np.asarray(vs, dtype=float))
        self._check(vs)
        return (vs * self.diag) @ vs.T


def aux_norm(v) -> float:
    """Signature-blind Euclidean norm used for tolerances."""
    return float(np.linalg.norm(np.asarray(v, dtype=float)))


def causal_type(sig: Signature, v, tol: float = LIGHTLIKE_TOL) -> CausalType:
    v = np.asarray(v, dtype=float)
    aux = float(v @ v)
    if aux == 0.0:
        raise DegenerateInputError("causal type of the zero vector is undefined")
    q = float(sig.inner(v, v))
    if abs(q) <= tol * aux:
        return CausalType.LIGHTLIKE
    return CausalType.SPACELIKE if q > 0 else CausalType.TIMELIKE


def _check_fixed(sig: Signature, fixed) -> list[tuple[np.ndarray, int]]:
    """Orthonormalize declared-sign directions among themselves."""
    out: list[tuple[np.ndarray, int]] = []
    for w, sign in fixed:
        w = np.asarray(w, dtype=float)
        sig._check(w)
        for u, su in out:
            w = w - su * sig.inner(w, u) * u
        q = float(sig.inner(w, w))
        aux = float(w @ w)
        if aux == 0.0 or abs(q) <= LIGHTLIKE_TOL * aux:
            raise DegenerateFrameError("fixed direction is numerically null")
        if np.sign(q) != sign:
            raise SignatureError(
                f"fixed direction declared with sign {sign} but <w,w> = {q:.3e}"
            )
        out.append((w / np.sqrt(abs(q)), int(sign)))
    return out


def orthonormalize_against(
    sig: Signature,
    vs: Iterable,
    fixed: Iterable = (),
    rank_tol: float = RANK_TOL,
) -> list[np.ndarray]:
    """Orthonormal spacelike basis of the part of span(vs) orthogonal to ``fixed``.

    ``fixed`` holds (w, sign) pairs with sign(<w,w>) = sign. These are
    processed first; the remaining residuals must span a positive-definite
    subspace and are orthonormalized with largest-residual-first pivoting.
    Candidates whose residual drops below ``rank_tol`` (relative to the
    largest input norm) are discarded.
    """
    fixed = _check_fixed(sig, fixed)
    cands = np.array([np.asarray(v, dtype=float) for v in vs], dtype=float)
    if cands.size == 0:
        return []
    cands = np.atleast_2d(cands)
    sig._check(cands)
    eps = sig.diag
    scale = float(np.max(np.linalg.norm(cands, axis=1))) or 1.0
    res = cands.copy()
    for w, sign in fixed:
        res -= sign * np.outer(res @ (eps * w), w)

    basis: list[np.ndarray] = []
    alive = np.ones(len(res), dtype=bool)
    while alive.any():
        norms = np.where(alive, np.linalg.norm(res, axis=1), -1.0)
        k = int(np.argmax(norms))
        if norms[k] < rank_tol * scale:
            break
        r = res[k]
        q = float(r @ (eps * r))
        if q <= LIGHTLIKE_TOL * norms[k] ** 2:
            raise SignatureError(
                f"residual subspace is not positive definite (<r,r> = {q:.3e})"
            )
        g = r / np.sqrt(q)
        # re-orthogonalize once against the accepted basis for stability
        for b in basis:
            g = g - (g @ (eps * b)) * b
        g = g / np.sqrt(float(g @ (eps * g)))
        basis.append(g)
        alive[k] = False
        res -= np.outer(res @ (eps * g), g)
    return basis


def project_tangent(sig: Signature, v, frame, tol: float = FRAME_TOL) -> np.ndarray:
    """Projection of v onto span(frame) for a frame of (w, sign) with <w,w> = sign."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    for w, sign in frame:
        w = np.asarray(w, dtype=float)
        if abs(float(sig.inner(w, w)) - sign) > tol:
            raise InvalidFrameError(f"frame vector has <w,w> = {sig.inner(w, w)!r}, declared {sign}")
        out = out + sign * sig.inner(v, w) * w
    return out
