import math
from dataclasses import replace

import pytest

from umbilic.expr import S, T, SurfaceMap, cos, cosh, sin, sinh
from umbilic.families import build_family, example1_map
from umbilic.metric import Signature
from umbilic.product import ProductSpaceForm

# criterion number -> status line, filled by test_acceptance
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

EX1_REF = dict(k1=-1.0, lambda1=0.25, lambda2=0.5)
EX2_REF = dict(k1=-1.0, k2=-3.0, lambda1=0.25, lambda2=0.5)

# five admissible moduli per family, varied curvature
EX1_MODULI = [
    dict(k1=-1.0, lambda1=0.25, lambda2=0.5),
    dict(k1=-2.0, lambda1=0.1, lambda2=0.9),
    dict(k1=-0.5, lambda1=0.3, lambda2=0.35),
    dict(k1=-4.0, lambda1=0.6, lambda2=0.95),
    dict(k1=-1.5, lambda1=0.05, lambda2=0.2),
]
EX2_MODULI = [
    dict(k1=-1.0, k2=-3.0, lambda1=0.25, lambda2=0.5),
    dict(k1=-2.0, k2=-0.5, lambda1=0.3, lambda2=0.7),
    dict(k1=-1.0, k2=-1.0, lambda1=0.1, lambda2=0.6),
    dict(k1=-0.7, k2=-2.5, lambda1=0.45, lambda2=0.55),
    dict(k1=-3.0, k2=-1.2, lambda1=0.15, lambda2=0.85),
]


@pytest.fixture(scope="session")
def ex1():
    return build_family("example1", **EX1_REF)


@pytest.fixture(scope="session")
def ex2():
    return build_family("example2", **EX2_REF)


def corrupted_b2(fam):
    """b2 nudged by 1e-3: the t-curve loses unit speed and umbilicity."""
    p = fam.params
    return replace(fam, surface=example1_map(p.a1, p.a2, p.b1, p.b2 + 1e-3, p.c))


def doubled_speed(fam):
    return replace(fam, surface=fam.surface.reparametrize(2.0 * S, T))


def mismatched_helix(fam):
    """Unit-speed product whose t-helix (c^2 = 3, b^2 = 1) does not match the s-curve."""
    p = fam.params
    c2 = math.sqrt(3.0)
    u, v = S / p.c, T / c2
    comps = (p.a1 * cosh(u), p.a1 * sinh(u), p.a2 * cos(v), p.a2 * sin(v), p.b1 * u, 1.0 * v)
    return replace(fam, surface=SurfaceMap(comps, fam.surface.signature, "mismatched"))


def slice_sphere(rho=0.8, p=(0.3, -0.2)):
    """Geodesic sphere of H^3 inside the slice H^3 x {p} of H^3 x R^2."""
    space = ProductSpaceForm(-1.0, 3, 0.0, 2)
    ch, sh = math.cosh(rho), math.sinh(rho)
    comps = (
        ch + 0.0 * S,
        sh * (cos(S) * cos(T)),
        sh * (cos(S) * sin(T)),
        sh * sin(S),
        p[0] + 0.0 * T,
        p[1] + 0.0 * T,
    )
    return space, SurfaceMap(comps, Signature.lorentz(4) + Signature.euclidean(2), "slice_sphere")


def wobbly_surface():
    """A non-product, non-umbilical surface in H^3 x R^2."""
    space = ProductSpaceForm(-1.0, 3, 0.0, 2)
    A = 0.8 + 0.5 * S + 0.3 * T
    B = 0.4 * S - 0.6 * T + 0.1 * (S * T)
    comps = (
        cosh(A),
        sinh(A) * cos(B),
        sinh(A) * sin(B) * cos(0.2 * S),
        sinh(A) * sin(B) * sin(0.2 * S),
        0.3 * sin(S * T) + 0.5 * T,
        0.2 * cos(S) + 0.4 * S,
    )
    return space, SurfaceMap(comps, Signature.lorentz(4) + Signature.euclidean(2), "wobbly")
