"""Command-line entry point: ``umbilic {build,verify,curvatures}``.

Settings come from an optional JSON config file; command-line flags
override it. Exit status: 0 success, 1 a verification check failed,
2 bad configuration or arguments, 3 an output file could not be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import CheckError, ConfigError, GeometryError
from .families import Family, build_family, predicted_curve_invariants
from .frenet import split_product_curves, summarize_curve
from .product import GridSpec, ProductSpaceForm
from .verification import CHECKS, CURVE_SAMPLES, default_checks, run_suite

FAMILIES = ("example1", "example2")
PROJECTIONS = ("ambient", "ball")
CONFIG_KEYS = {"family", "k", "k1", "k2", "lambda1", "lambda2", "grid", "rect", "out", "tolerances", "projection"}


@dataclass
class RunConfig:
    command: str = "verify"
    family: str = "example1"
    k1: float = -1.0
    k2: float | None = None
    lambda1: float = 0.25
    lambda2: float = 0.5
    grid: tuple[int, int] = (16, 16)
    rect: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    out: str | None = None
    tolerances: dict = field(default_factory=dict)
    projection: str = "ambient"

    def validate(self) -> "RunConfig":
        if self.family not in FAMILIES:
            raise ConfigError("family", f"must be one of {', '.join(FAMILIES)}, got {self.family!r}")
        for name in ("k1", "lambda1", "lambda2"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ConfigError(name, f"must be a finite number, got {v!r}")
        if not self.k1 < 0:
            raise ConfigError("k1", f"must be negative, got {self.k1}")
        if self.family == "example2":
            if self.k2 is None:
                raise ConfigError("k2", "is required for example2")
            if isinstance(self.k2, bool) or not isinstance(self.k2, (int, float)) or not self.k2 < 0:
                raise ConfigError("k2", f"must be a negative number, got {self.k2!r}")
        for name in ("lambda1", "lambda2"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigError(name, f"must lie in (0, 1), got {getattr(self, name)}")
        if not self.lambda1 < self.lambda2:
            raise ConfigError("lambda2", f"must exceed lambda1 ({self.lambda1}), got {self.lambda2}")
        if len(self.grid) != 2 or min(self.grid) < 2:
            raise ConfigError("grid", f"resolution must be at least 2x2, got {self.grid}")
        s0, s1, t0, t1 = self.rect
        if not (s1 > s0 and t1 > t0):
            raise ConfigError("rect", f"needs s0 < s1 and t0 < t1, got {self.rect}")
        if self.projection not in PROJECTIONS:
            raise ConfigError("projection", f"must be one of {', '.join(PROJECTIONS)}")
        for name, tol in self.tolerances.items():
            if name not in CHECKS:
                raise ConfigError("tolerances", f"unknown check {name!r}")
            if not (isinstance(tol, (int, float)) and tol > 0):
                raise ConfigError("tolerances", f"tolerance of {name!r} must be positive, got {tol!r}")
        if self.projection == "ball" and self.command == "build" and self.out is None:
            raise ConfigError("out", "ball projection writes OBJ files next to the CSV and needs an output path")
        return self

    @property
    def grid_spec(self) -> GridSpec:
        return GridSpec(tuple(float(x) for x in self.rect), tuple(self.grid))

    def family_obj(self) -> Family:
        try:
            return build_family(self.family, k1=self.k1, k2=self.k2, lambda1=self.lambda1, lambda2=self.lambda2)
        except GeometryError as exc:
            raise ConfigError("moduli", str(exc)) from exc


def parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().replace(" ", "").split("x")
    if len(parts) != 2:
        raise ValueError(f"expected NSxNT, got {text!r}")
    return int(parts[0]), int(parts[1])


def parse_rect(text: str) -> tuple[float, ...]:
    vals = tuple(float(x) for x in text.split(","))
    if len(vals) != 4:
        raise ValueError(f"expected s0,s1,t0,t1, got {text!r}")
    return vals


def parse_tol(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise ValueError(f"expected CHECK=VALUE, got {text!r}")
    return name.strip(), float(value)


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown config key")
    return data


def _from_config(data: dict, command: str) -> RunConfig:
    cfg = RunConfig(command=command)
    kw = {}
    if "k" in data:
        kw["k1"] = data["k"]
    for key in ("family", "k1", "k2", "lambda1", "lambda2", "out", "projection"):
        if key in data:
            kw[key] = data[key]
    for key, parse, conv in (("grid", parse_grid, int), ("rect", parse_rect, float)):
        if key not in data:
            continue
        try:
            v = data[key]
            kw[key] = parse(v) if isinstance(v, str) else tuple(conv(x) for x in v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, str(exc)) from exc
    if "tolerances" in data:
        if not isinstance(data["tolerances"], dict):
            raise ConfigError("tolerances", "must be an object of check: value")
        kw["tolerances"] = dict(data["tolerances"])
    return replace(cfg, **kw)


def resolve(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then flags."""
    cfg = _from_config(load_config(args.config), args.command)
    kw = {}
    for key in ("family", "k1", "k2", "lambda1", "lambda2", "out", "projection", "grid", "rect"):
        v = getattr(args, key)
        if v is not None:
            kw[key] = v
    if args.tol:
        kw["tolerances"] = {**cfg.tolerances, **dict(args.tol)}
    return replace(cfg, **kw).validate()


# -- outputs ---------------------------------------------------------------

def fmt(x: float) -> str:
    return "%.17g" % x


def samples_csv(family: Family, spec: GridSpec) -> str:
    ss, tt = spec.mesh()
    X = family.surface(ss, tt)
    N = X.shape[-1]
    buf = io.StringIO()
    buf.write(",".join(["s", "t"] + [f"x{i + 1}" for i in range(N)]) + "\n")
    for i in range(spec.shape[0]):
        for j in range(spec.shape[1]):
            row = [ss[i, j], tt[i, j], *X[i, j]]
            buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def ball_projection(space: ProductSpaceForm, i: int, X: np.ndarray) -> np.ndarray:
    """Poincare-ball image of the factor-i block of X (hyperbolic factors only)."""
    k = space.curvatures[i - 1]
    if not k < 0:
        raise ValueError(f"factor {i} is not hyperbolic")
    block = X[..., space.block(i)]
    return block[..., 1:] / (1.0 + block[..., :1] * math.sqrt(abs(k)))


def obj_mesh(V: np.ndarray) -> str:
    """OBJ text of an (ns, nt, 3) vertex grid with quad faces."""
    ns, nt = V.shape[:2]
    lines = ["v " + " ".join(fmt(c) for c in V[i, j]) for i in range(ns) for j in range(nt)]
    for i in range(ns - 1):
        for j in range(nt - 1):
            a = i * nt + j + 1
            lines.append(f"f {a} {a + nt} {a + nt + 1} {a + 1}")
    return "\n".join(lines) + "\n"


def curvature_rows(family: Family, spec: GridSpec) -> list[dict]:
    split = split_product_curves(family.surface, family.space)
    s0, s1, t0, t1 = spec.rect
    spans = (np.linspace(s0, s1, CURVE_SAMPLES), np.linspace(t0, t1, CURVE_SAMPLES))
    rows = []
    for i, curve in ((1, split.curve1), (2, split.curve2)):
        pred = predicted_curve_invariants(family.params, i)
        summ = summarize_curve(curve, spans[i - 1], pred.regime)
        row = {
            "curve": i,
            "regime": pred.regime,
            "dim": pred.dim,
            "curvature_vector_sq_closed": pred.curvature_vector_sq,
            "curvature_vector_sq_numeric": float(np.mean(summ.curvature_vector_sq)),
        }
        for j, closed in enumerate(pred.curvatures_sq):
            name = f"k{j + 1}_sq"
            if closed is None:
                row.update({f"{name}_closed": None, f"{name}_numeric": None, f"{name}_absdiff": None})
            else:
                num = float(summ.mean_sq[j])
                row.update({f"{name}_closed": closed, f"{name}_numeric": num, f"{name}_absdiff": abs(num - closed)})
        rows.append(row)
    return rows


CURVATURE_COLUMNS = [
    "curve", "regime", "dim", "curvature_vector_sq_closed", "curvature_vector_sq_numeric",
    *(f"k{j}_sq_{kind}" for j in (1, 2, 3) for kind in ("closed", "numeric", "absdiff")),
]


def curvatures_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVATURE_COLUMNS)
    for r in rows:
        w.writerow(["" if r[c] is None else (fmt(r[c]) if isinstance(r[c], float) else r[c])
                    for c in CURVATURE_COLUMNS])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


# -- commands --------------------------------------------------------------

def cmd_build(cfg: RunConfig) -> int:
    family = cfg.family_obj()
    spec = cfg.grid_spec
    text = samples_csv(family, spec)
    meshes = {}
    if cfg.projection == "ball":
        ss, tt = spec.mesh()
        X = family.surface(ss, tt)
        stem = Path(cfg.out).with_suffix("")
        for i in (1, 2):
            if family.space.curvatures[i - 1] < 0:
                meshes[f"{stem}_factor{i}.obj"] = obj_mesh(ball_projection(family.space, i, X))
    _emit(text, cfg.out)
    for path, body in meshes.items():
        Path(path).write_text(body)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    family = cfg.family_obj()
    report = run_suite(family, cfg.grid_spec, default_checks(cfg.tolerances))
    _emit(report.to_json(), cfg.out)
    for c in report.checks:
        if not c.passed:
            print(f"FAILED {c.name}: max residual {c.max_residual} > tolerance {c.tolerance}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_curvatures(cfg: RunConfig) -> int:
    family = cfg.family_obj()
    _emit(curvatures_csv(curvature_rows(family, cfg.grid_spec)), cfg.out)
    return 0


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "curvatures": cmd_curvatures}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="umbilic", description="Flat umbilical surfaces in products of space forms.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("build", "sample the surface on a grid (CSV, optional OBJ)"),
                        ("verify", "run the invariant suite and write a JSON report"),
                        ("curvatures", "tabulate Frenet curvatures of the factor curves")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--k1", "--k", dest="k1", type=float)
        p.add_argument("--k2", type=float)
        p.add_argument("--lambda1", type=float)
        p.add_argument("--lambda2", type=float)
        p.add_argument("--grid", type=parse_grid, metavar="NSxNT")
        p.add_argument("--rect", type=parse_rect, metavar="S0,S1,T0,T1")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--tol", type=parse_tol, action="append", metavar="CHECK=VALUE")
        p.add_argument("--projection", choices=PROJECTIONS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"umbilic: config error: {exc}", file=sys.stderr)
        return 2
    except CheckError as exc:
        print(f"umbilic: check {exc.check} could not run: {exc.cause}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"umbilic: cannot write output: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
