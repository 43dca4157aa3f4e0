"""Run the invariant battery over a family and collect a residual report.

Every check reduces to a nonnegative residual compared against a
tolerance; the report keeps the maximum residual and where it occurred.
Checks run in a fixed order and the report is a pure function of the
family, grid and check list, so its JSON form is reproducible byte for
byte.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CheckError
from .expr import eval_map
from .families import Family, closed_form_H, predicted_curve_invariants
from .frenet import GENERIC, LIGHTLIKE, split_product_curves, summarize_curve
from .metric import CausalType, aux_norm, causal_type
from .product import (
    GridSpec,
    ImmersionPointData,
    SurfaceGrid,
    fundamental_equation_residuals,
    membership_residual,
    tensor_identity_residuals,
    umbilicity_residual,
)

SCOPES = ("per-point", "per-grid", "per-curve")
CURVE_SAMPLES = 20


@dataclass(frozen=True)
class CheckSpec:
    name: str
    tolerance: float
    scope: str = "per-point"
    enabled: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance of {self.name!r} must be positive, got {self.tolerance}")
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}")


@dataclass
class CheckResult:
    name: str
    scope: str
    tolerance: float
    max_residual: float | None
    location: dict | None
    passed: bool
    error: str | None = None
    detail: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "scope": self.scope,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "location": self.location,
            "pass": self.passed,
        }
        if self.detail is not None:
            out["detail"] = self.detail
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class VerificationReport:
    family: str
    moduli: dict
    grid: GridSpec
    checks: list[CheckResult]
    warnings: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    elapsed: float = 0.0    # wall time; not serialized

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "moduli": self.moduli,
            "grid": {"rect": list(self.grid.rect), "shape": list(self.grid.shape)},
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "warnings": list(self.warnings),
            "stats": dict(self.stats),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


class _Context:
    """Lazily computed shared data for one suite run."""

    def __init__(self, family: Family, spec: GridSpec):
        self.family = family
        self.spec = spec
        self.space = family.space
        self.params = family.params

    @cached_property
    def grid(self) -> SurfaceGrid:
        return SurfaceGrid.build(self.space, self.family.surface, self.spec)

    @cached_property
    def points(self) -> list[ImmersionPointData]:
        return list(self.grid)

    @cached_property
    def equations(self):
        return fundamental_equation_residuals(self.grid, self.space)

    @cached_property
    def split(self):
        return split_product_curves(self.family.surface, self.space)

    @cached_property
    def samples(self) -> tuple[np.ndarray, np.ndarray]:
        s0, s1, t0, t1 = self.spec.rect
        return np.linspace(s0, s1, CURVE_SAMPLES), np.linspace(t0, t1, CURVE_SAMPLES)

    @cached_property
    def predictions(self):
        return [predicted_curve_invariants(self.params, i) for i in (1, 2)]

    @cached_property
    def curves(self):
        sp = self.split
        out = []
        for pred, curve, u in zip(self.predictions, (sp.curve1, sp.curve2), self.samples):
            out.append((pred, summarize_curve(curve, u, pred.regime)))
        return out

    @cached_property
    def closed_H(self):
        return closed_form_H(self.params)


def _loc(param) -> dict:
    return {"s": float(param[0]), "t": float(param[1])}


def _max_points(ctx: _Context, fn: Callable[[ImmersionPointData], float]):
    best, where = -1.0, None
    for d in ctx.points:
        v = float(fn(d))
        if not v <= best:          # NaN propagates as the worst value
            best, where = v, d.param
            if math.isnan(v):
                break
    return best, _loc(where)


def _eq(name: str):
    def check(ctx: _Context):
        eq = ctx.equations
        loc = eq.where.get(name)
        return getattr(eq, name), (None if loc is None else {"s": loc[0], "t": loc[1]})
    return check


def _membership(ctx):
    return _max_points(ctx, lambda d: max(abs(r) for r in membership_residual(ctx.space, d.point)))


def _unit_speed(ctx):
    def f(d):
        I = d.first_form
        return max(abs(I[0, 0] - 1.0), abs(I[1, 1] - 1.0), abs(I[0, 1]))
    return _max_points(ctx, f)


def _spectrum_bounds(ctx):
    def f(d):
        worst = 0.0
        for A in (d.R, d.T):
            if A.size == 0:
                continue
            ev = np.linalg.eigvalsh((A + A.T) / 2)
            worst = max(worst, float(np.max(np.abs(A - A.T))), -float(ev[0]), float(ev[-1]) - 1.0)
        return worst
    return _max_points(ctx, f)


def _r_eigenvalues(ctx):
    lam = np.array(ctx.params.lambdas)
    return _max_points(ctx, lambda d: float(np.max(np.abs(d.principal()[0] - lam))))


def _r_eigendirections(ctx):
    lam = ctx.params.lambdas

    def f(d):
        worst = 0.0
        for i in range(2):
            X = d.coord_tangents[i]
            X = X / math.sqrt(abs(d.inner(X, X)))
            worst = max(worst, aux_norm(d.apply_R(X) - lam[i] * X))
        return worst
    return _max_points(ctx, f)


def _mean_curvature_norm(ctx):
    target = ctx.closed_H.norm_sq
    return _max_points(ctx, lambda d: abs(float(d.inner(d.H, d.H)) - target))


def _mean_curvature_vector(ctx):
    F = ctx.closed_H.vector
    return _max_points(ctx, lambda d: float(np.max(np.abs(d.H - F(*d.param)))))


def _h_orthogonal_to_S(ctx):
    return _max_points(ctx, lambda d: float(np.max(np.abs(d.inner(d.xi(), d.H)))))


def _xi_gram(ctx):
    lam = np.array(ctx.params.lambdas)
    target = np.diag(lam * (1 - lam))
    return _max_points(ctx, lambda d: float(np.max(np.abs(d.signature.gram(d.xi()) - target))))


def z_norm_closed_form(params) -> tuple[float, float]:
    """<Z_i, Z_i> = (l_i - l_j)(kappa l_i - k1)."""
    l1, l2 = params.lambdas
    kappa = params.k1 + params.k2
    return ((l1 - l2) * (kappa * l1 - params.k1), (l2 - l1) * (kappa * l2 - params.k1))


def _z_norms(ctx):
    target = np.array(z_norm_closed_form(ctx.params))
    return _max_points(ctx, lambda d: float(np.max(np.abs(np.diag(d.signature.gram(d.Z())) - target))))


def cross_orthogonality_check(d1: ImmersionPointData, d2: ImmersionPointData | None = None) -> float:
    """|<Z_1, Z_2>| with Z_i = alpha_F(X_i, X_i); Z_2 taken from ``d2`` when given."""
    Z1 = d1.Z()
    Z2 = (d2 if d2 is not None else d1).Z()
    return abs(float(d1.inner(Z1[0], Z2[1])))


def _z_orthogonality(ctx):
    return _max_points(ctx, cross_orthogonality_check)


def _curve_max(ctx, fn):
    best, where = -1.0, None
    for pred, summ in ctx.curves:
        v, u = fn(pred, summ)
        if v > best:
            best, where = v, ({"curve": pred.curve} if u is None else {"curve": pred.curve, "u": u})
    return best, where


def _frenet_closed_form(ctx):
    def f(pred, summ):
        errs = []
        for j, closed in enumerate(pred.curvatures_sq):
            if closed is None:
                continue
            num = summ.curvatures_sq[:, j]
            errs.append(np.abs(num - closed) / (abs(closed) or 1.0))
        if pred.regime == GENERIC:
            c = pred.curvature_vector_sq
            errs.append(np.abs(summ.curvature_vector_sq - c) / (abs(c) or 1.0))
        e = np.max(errs, axis=0)
        k = int(np.argmax(e))
        return float(e[k]), summ.samples[k]
    return _curve_max(ctx, f)


def _frenet_constancy(ctx):
    return _curve_max(ctx, lambda p, s: (float(np.nanmax(s.spread)), None))


def _frenet_equations(ctx):
    return _curve_max(ctx, lambda p, s: (s.consistent_residual, None))


def _frenet_frame(ctx):
    return _curve_max(ctx, lambda p, s: (s.frame_residual, None))


def _regime_agreement(ctx):
    """1 for every sample where the numeric curvature-vector type contradicts the exact regime."""
    sp = ctx.split
    bad, where = 0, None
    for pred, curve, us in zip(ctx.predictions, (sp.curve1, sp.curve2), ctx.samples):
        for u in us:
            g2 = curve.jet(float(u)).deriv().deriv().value
            numeric = LIGHTLIKE if causal_type(curve.signature, g2) is CausalType.LIGHTLIKE else GENERIC
            if numeric != pred.regime:
                bad += 1
                where = where or {"curve": pred.curve, "u": float(u)}
    return float(bad), where


def _product_split(ctx):
    sp = ctx.split
    ss, tt = ctx.spec.mesh()
    jet = eval_map(ctx.family.surface, ss, tt)
    res = np.maximum.reduce([
        np.max(np.abs(jet.d_st), axis=-1),
        np.max(np.abs(jet.d_t[..., list(sp.V1)]), axis=-1),
        np.max(np.abs(jet.d_s[..., list(sp.V2)]), axis=-1),
    ])
    k = np.unravel_index(int(np.argmax(res)), res.shape)
    return float(res[k]), {"s": float(ss[k]), "t": float(tt[k])}


def _injectivity(ctx):
    """Number of grid-point pairs mapped to (numerically) the same ambient point."""
    P = np.array([d.point for d in ctx.points])
    D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
    iu = np.triu_indices(len(P), 1)
    dist = D[iu]
    scale = max(1.0, float(np.max(np.abs(P))))
    clashes = int(np.sum(dist <= 1e-12 * scale))
    return float(clashes), None, {"min_distance": float(np.min(dist))}


# name -> (function, default tolerance, scope), in execution order
CHECKS: dict[str, tuple[Callable, float, str]] = {
    "membership": (_membership, 1e-12, "per-point"),
    "unit_speed": (_unit_speed, 1e-12, "per-point"),
    "umbilicity": (lambda c: _max_points(c, umbilicity_residual), 1e-9, "per-point"),
    "tensor_identities": (lambda c: _max_points(c, tensor_identity_residuals), 1e-9, "per-point"),
    "spectrum_bounds": (_spectrum_bounds, 1e-10, "per-point"),
    "r_eigenvalues": (_r_eigenvalues, 1e-9, "per-point"),
    "r_eigendirections": (_r_eigendirections, 1e-9, "per-point"),
    "mean_curvature_norm": (_mean_curvature_norm, 1e-9, "per-point"),
    "mean_curvature_vector": (_mean_curvature_vector, 1e-9, "per-point"),
    "h_orthogonal_to_S": (_h_orthogonal_to_S, 1e-9, "per-point"),
    "gauss_flatness": (_eq("flatness"), 1e-8, "per-point"),
    "gauss_equation": (_eq("gauss"), 1e-7, "per-point"),
    "r_parallel": (_eq("r_parallel"), 1e-8, "per-point"),
    "codazzi": (_eq("codazzi"), 1e-5, "per-point"),
    "r_derivative": (_eq("r_derivative"), 1e-5, "per-point"),
    "s_derivative": (_eq("s_derivative"), 1e-5, "per-point"),
    "t_derivative": (_eq("t_derivative"), 1e-5, "per-point"),
    "xi_gram": (_xi_gram, 1e-9, "per-point"),
    "z_norms": (_z_norms, 1e-9, "per-point"),
    "z_orthogonality": (_z_orthogonality, 1e-9, "per-point"),
    "frenet_closed_form": (_frenet_closed_form, 1e-7, "per-curve"),
    "frenet_constancy": (_frenet_constancy, 1e-8, "per-curve"),
    "frenet_equations": (_frenet_equations, 1e-7, "per-curve"),
    "frenet_frame": (_frenet_frame, 1e-9, "per-curve"),
    "regime_agreement": (_regime_agreement, 0.5, "per-curve"),
    "product_split": (_product_split, 1e-12, "per-grid"),
    "injectivity": (_injectivity, 0.5, "per-grid"),
}

FD_CHECKS = frozenset({"codazzi", "r_derivative", "s_derivative", "t_derivative"})


def default_checks(overrides: dict[str, float] | None = None) -> list[CheckSpec]:
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(sorted(unknown))}")
    return [CheckSpec(name, overrides.get(name, tol), scope) for name, (_, tol, scope) in CHECKS.items()]


def run_suite(
    family: Family,
    grid: GridSpec | None = None,
    checks: Sequence[CheckSpec] | None = None,
    on_error: str = "raise",
) -> VerificationReport:
    """Evaluate ``checks`` (default: all) on ``family`` over ``grid``.

    With ``on_error="raise"`` a failing computation is re-raised as
    :class:`CheckError` naming the check; with ``"record"`` the check is
    marked failed with the error message and the suite continues.
    """
    if on_error not in ("raise", "record"):
        raise ValueError("on_error must be 'raise' or 'record'")
    grid = grid or GridSpec()
    checks = list(default_checks() if checks is None else checks)
    names = [c.name for c in checks]
    if len(set(names)) != len(names):
        raise ValueError("duplicate check names")
    unknown = set(names) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(sorted(unknown))}")
    order = {n: i for i, n in enumerate(CHECKS)}
    checks = sorted((c for c in checks if c.enabled), key=lambda c: order[c.name])

    start = time.perf_counter()
    ctx = _Context(family, grid)
    results: list[CheckResult] = []
    for spec in checks:
        fn = CHECKS[spec.name][0]
        try:
            out = fn(ctx)
        except Exception as exc:  # noqa: BLE001 - reported per check
            if on_error == "raise":
                raise CheckError(spec.name, exc) from exc
            results.append(CheckResult(spec.name, spec.scope, spec.tolerance, None, None, False,
                                       error=f"{type(exc).__name__}: {exc}"))
            continue
        value, where = out[0], out[1]
        detail = out[2] if len(out) > 2 else None
        ok = bool(np.isfinite(value) and value <= spec.tolerance)
        results.append(CheckResult(spec.name, spec.scope, spec.tolerance,
                                   float(value) if np.isfinite(value) else None, where, ok, detail=detail))

    warnings: list[str] = []
    stats = {"checks_run": len(results), "grid_points": grid.shape[0] * grid.shape[1]}
    if "equations" in ctx.__dict__:
        warnings += ctx.equations.warnings
        stats["interior_points"] = ctx.equations.points
        stats["fd_step"] = ctx.equations.fd_step
    if "curves" in ctx.__dict__:
        stats["curve_samples"] = CURVE_SAMPLES
    return VerificationReport(
        family=family.name,
        moduli=family.moduli,
        grid=grid,
        checks=results,
        warnings=warnings,
        stats=stats,
        elapsed=time.perf_counter() - start,
    )


def check_names() -> list[str]:
    return list(CHECKS)


def failing(report: VerificationReport) -> Iterable[CheckResult]:
    return (c for c in report.checks if not c.passed)
