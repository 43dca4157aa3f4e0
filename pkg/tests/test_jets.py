import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umbilic.expr import S, T, SurfaceMap, cos, eval_map
from umbilic.families import build_family
from umbilic.jets import Jet2, Taylor1, elementary, seed
from umbilic.metric import Signature

from conftest import EX1_MODULI, EX2_MODULI


def test_seed():
    s, t = seed(0.0, 0.0)
    assert (s.val, s.d_s, s.d_t, s.d_ss, s.d_st, s.d_tt) == (0, 1, 0, 0, 0, 0)
    s, t = seed(2.0, 3.0)
    assert (t.val, t.d_s, t.d_t) == (3, 0, 1)
    p = s * t
    assert (p.val, p.d_s, p.d_t, p.d_ss, p.d_st, p.d_tt) == (6, 3, 2, 0, 1, 0)


def test_elementary_expansions():
    s, t = seed(0.0, 0.0)
    c = elementary("cosh", s)
    assert (c.val, c.d_s, c.d_ss) == (1, 0, 1)
    w = elementary("sin", t)
    assert (w.val, w.d_t, w.d_tt) == (0, 1, 0)


def _fd_mixed(f, s, t, h):
    return (f(s + h, t + h) - f(s + h, t - h) - f(s - h, t + h) + f(s - h, t - h)) / (4 * h * h)


def test_cos_of_product_mixed_partial():
    s, t = seed(1.0, math.pi)
    j = elementary("cos", s * t)
    f = lambda a, b: math.cos(a * b)
    fd = _fd_mixed(f, 1.0, math.pi, 1e-5)
    # exact: -sin(st) - st cos(st)
    exact = -math.sin(math.pi) - math.pi * math.cos(math.pi)
    assert abs(j.d_st - exact) < 1e-12
    assert abs(j.d_st - fd) < 1e-5


def test_jet_quotient_and_scale():
    s, t = seed(0.7, -0.4)
    q = (s * s + 1.0) / (t + 2.0)
    f = lambda a, b: (a * a + 1) / (b + 2)
    h = 1e-4
    assert abs(q.val - f(0.7, -0.4)) < 1e-15
    assert abs(q.d_st - _fd_mixed(f, 0.7, -0.4, h)) < 1e-6
    sc = elementary("scale", 3.0, s)
    assert (sc.val, sc.d_s) == pytest.approx((2.1, 3.0))


def test_example1_map_at_origin(ex1):
    p = ex1.params
    jet = eval_map(ex1.surface, 0.0, 0.0)
    np.testing.assert_allclose(jet.value, [p.a1, 0, p.a2, 0, 0, 0], atol=1e-15)


def test_family_maps_separate(ex1, ex2):
    ss, tt = np.meshgrid(np.linspace(-2, 2, 7), np.linspace(-2, 2, 7))
    for fam in (ex1, ex2):
        assert not eval_map(fam.surface, ss, tt).d_st.any()


def _richardson(D, h):
    return (4 * D(h / 2) - D(h)) / 3


def fd_fields(F: SurfaceMap, s: float, t: float, h: float = 1e-4):
    # extended precision keeps second-difference roundoff far below the tolerance
    def f(a, b):
        env = {"s": np.longdouble(a), "t": np.longdouble(b)}
        return np.array([c.evaluate(env) for c in F.components], dtype=np.longdouble)

    s, t = np.longdouble(s), np.longdouble(t)
    ds = lambda k: (f(s + k, t) - f(s - k, t)) / (2 * k)
    dt = lambda k: (f(s, t + k) - f(s, t - k)) / (2 * k)
    dss = lambda k: (f(s + k, t) - 2 * f(s, t) + f(s - k, t)) / k**2
    dtt = lambda k: (f(s, t + k) - 2 * f(s, t) + f(s, t - k)) / k**2
    dst = lambda k: (f(s + k, t + k) - f(s + k, t - k) - f(s - k, t + k) + f(s - k, t - k)) / (4 * k * k)
    return [_richardson(D, np.longdouble(h)).astype(float) for D in (ds, dt, dss, dst, dtt)]


LIBRARY = [build_family("example1", **m) for m in EX1_MODULI] + [build_family("example2", **m) for m in EX2_MODULI]
WARPED = SurfaceMap(
    (cos(S * T) + 0.5 * S, 0.3 * (S * S) * cos(T), 1.0 * T * cos(S + T)),
    Signature.lorentz(3),
    "warped",
)


@pytest.mark.parametrize("F", [f.surface for f in LIBRARY] + [WARPED], ids=lambda F: F.name)
def test_jets_match_finite_differences(F):
    rng = np.random.default_rng(7)
    for s, t in rng.uniform(-1.5, 1.5, size=(20, 2)):
        jet = eval_map(F, s, t)
        ds, dt, dss, dst, dtt = fd_fields(F, s, t)
        assert np.max(np.abs(jet.d_s - ds)) <= 1e-8
        assert np.max(np.abs(jet.d_t - dt)) <= 1e-8
        for exact, fd in ((jet.d_ss, dss), (jet.d_st, dst), (jet.d_tt, dtt)):
            assert np.max(np.abs(exact - fd)) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_jet_chain_rule_sinh_of_cos(s, t):
    a, b = seed(s, t)
    j = elementary("sinh", elementary("cos", a) * b)
    u = math.cos(s) * t
    # d/ds sinh(cos(s) t) = cosh(u) * (-sin(s) t)
    assert j.d_s == pytest.approx(math.cosh(u) * (-math.sin(s) * t), abs=1e-12)
    assert j.d_t == pytest.approx(math.cosh(u) * math.cos(s), abs=1e-12)
    # d2/dsdt = sinh(u) cos(s) (-sin(s) t) + cosh(u)(-sin(s))
    mixed = math.sinh(u) * math.cos(s) * (-math.sin(s) * t) - math.cosh(u) * math.sin(s)
    assert j.d_st == pytest.approx(mixed, abs=1e-11)


def test_taylor1_derivatives_of_exp_like():
    x = Taylor1.variable(0.3, 4)
    y = x.cosh() * x.sin()
    f = lambda u: math.cosh(u) * math.sin(u)
    d = y.derivatives()
    h = 1e-3
    assert d[0] == pytest.approx(f(0.3), abs=1e-15)
    assert d[1] == pytest.approx((f(0.3 + h) - f(0.3 - h)) / (2 * h), abs=1e-6)
    # Leibniz: (cosh sin)'' = 2 sinh cos
    assert d[2] == pytest.approx(2 * math.sinh(0.3) * math.cos(0.3), abs=1e-13)


def test_taylor1_sqrt_and_reciprocal():
    x = Taylor1.variable(2.0, 4)
    r = (x * x + 1.0).sqrt()
    inv = r.reciprocal()
    one = r * inv
    np.testing.assert_allclose(one.coef, [1, 0, 0, 0, 0], atol=1e-15)
    # d/dx sqrt(x^2 + 1) = x / sqrt(x^2 + 1)
    assert r.derivatives()[1] == pytest.approx(2 / math.sqrt(5), abs=1e-15)
    with pytest.raises(TypeError):
        Taylor1.constant(np.ones(3), 2).sqrt()


def test_jet2_array_fields():
    s, t = seed(np.array([0.0, 1.0]), np.array([1.0, 2.0]))
    p = s * t
    assert isinstance(p, Jet2)
    np.testing.assert_array_equal(p.val, [0, 2])
    np.testing.assert_array_equal(p.d_st, [1, 1])
