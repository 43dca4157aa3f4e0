import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umbilic.errors import CurvatureError
from umbilic.expr import eval_map
from umbilic.families import build_family
from umbilic.metric import orthonormalize_against
from umbilic.product import (
    GridSpec,
    ProductSpaceForm,
    SurfaceGrid,
    _normal_frames,
    fundamental_equation_residuals,
    geometry_at,
    membership_residual,
    pointwise_geometry,
    tensor_identity_residuals,
    umbilicity_residual,
)
from umbilic.verification import cross_orthogonality_check

from conftest import EX1_MODULI, EX2_MODULI, mismatched_helix, slice_sphere, wobbly_surface

ALL = [("example1", m) for m in EX1_MODULI] + [("example2", m) for m in EX2_MODULI]


def test_space_form_bookkeeping():
    X = ProductSpaceForm(-1.0, 3, 0.0, 2)
    assert (X.N1, X.N2, X.mu, X.dim) == (4, 2, 1, 6)
    Y = ProductSpaceForm(-1.0, 3, -3.0, 3)
    assert (Y.N1, Y.N2, Y.mu) == (4, 4, 2)
    assert Y.signature.epsilons == (-1, 1, 1, 1, -1, 1, 1, 1)
    assert Y.radius(2) == pytest.approx(3**-0.5)
    assert ProductSpaceForm(1.0, 2, 0.0, 2).signature.index == 0
    with pytest.raises(CurvatureError):
        ProductSpaceForm(-1.0, 2, 1.0, 2)


def test_membership_examples(ex1):
    p = ex1.surface(0.0, 0.0)
    assert membership_residual(ex1.space, p) == pytest.approx((0.0, 0.0), abs=1e-15)
    r1, r2 = membership_residual(ex1.space, 2 * p)
    assert r1 == pytest.approx(3 / ex1.space.k1)
    assert r2 == 0.0


@pytest.mark.parametrize("name, moduli", ALL)
def test_membership_random_points(name, moduli):
    fam = build_family(name, **moduli)
    rng = np.random.default_rng(1)
    s, t = rng.uniform(-3, 3, size=(2, 100))
    P = fam.surface(s, t)
    for p in P:
        assert max(abs(r) for r in membership_residual(fam.space, p)) <= 1e-12 * max(1, fam.params.c**2)


def test_reference_point_data(ex1):
    d = geometry_at(ex1.space, ex1.surface, 0.3, -0.4)
    lam, V = d.principal()
    np.testing.assert_allclose(lam, [0.25, 0.5], atol=1e-12)
    np.testing.assert_allclose(np.abs(V), np.eye(2), atol=1e-12)
    assert d.inner(d.H, d.H) == pytest.approx(3 / 8, abs=1e-12)
    np.testing.assert_allclose(d.first_form, np.eye(2), atol=1e-12)
    assert d.normal_frame.shape == (3, 6)
    # nu is unit timelike, alpha_f free of nu
    (nu, sign), = d.nus
    assert sign == -1 and d.inner(nu, nu) == pytest.approx(-1)
    assert np.max(np.abs(d.inner(d.alpha_f, nu))) < 1e-13
    assert np.allclose(d.alpha_f_components, np.swapaxes(d.alpha_f_components, 1, 2))


@pytest.mark.parametrize("name, moduli", ALL)
def test_family_invariants(name, moduli):
    fam = build_family(name, **moduli)
    grid = SurfaceGrid.build(fam.space, fam.surface, GridSpec(shape=(6, 6)))
    lam = np.array(fam.params.lambdas)
    for d in grid:
        assert umbilicity_residual(d) <= 1e-9
        assert tensor_identity_residuals(d) <= 1e-9
        assert abs(d.gauss_curvature) <= 1e-8
        np.testing.assert_allclose(d.principal()[0], lam, atol=1e-9)
        for A in (d.R, d.T):
            assert np.allclose(A, A.T, atol=1e-10)
            ev = np.linalg.eigvalsh(A)
            assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
        assert np.max(np.abs(d.inner(d.xi(), d.H))) <= 1e-9
        assert cross_orthogonality_check(d) <= 1e-9


def test_slice_sphere_tensors():
    space, F = slice_sphere()
    grid = SurfaceGrid.build(space, F, GridSpec((-0.8, 0.8, -1.0, 1.0), (5, 5)))
    for d in grid:
        assert np.max(np.abs(d.S)) <= 1e-12
        assert np.max(np.abs(d.R)) <= 1e-12
        np.testing.assert_allclose(np.linalg.eigvalsh(d.T), [0, 1, 1], atol=1e-12)
        assert tensor_identity_residuals(d) <= 1e-9
        assert umbilicity_residual(d) <= 1e-9


def test_perturbed_S_is_detected(ex1):
    d = geometry_at(ex1.space, ex1.surface, 0.1, 0.2)
    rng = np.random.default_rng(3)
    P = rng.standard_normal(d.S.shape)
    bad = type(d)(**{**d.__dict__, "S": d.S + 1e-3 * P / np.linalg.norm(P)})
    assert tensor_identity_residuals(bad) >= 1e-4


def test_non_umbilical_product(ex1):
    fam = mismatched_helix(ex1)
    d = geometry_at(fam.space, fam.surface, 0.2, 0.1)
    assert umbilicity_residual(d) > 1e-3
    # the tensor identities hold for every immersion
    assert tensor_identity_residuals(d) <= 1e-9


def test_generic_surface_breaks_z_orthogonality():
    space, F = wobbly_surface()
    d = geometry_at(space, F, 0.2, -0.3)
    assert tensor_identity_residuals(d) <= 1e-9
    assert umbilicity_residual(d) > 1e-3
    assert cross_orthogonality_check(d) > 1e-3


@pytest.mark.parametrize("fixture", ["ex1", "ex2"])
def test_fundamental_equations(fixture, request):
    fam = request.getfixturevalue(fixture)
    grid = SurfaceGrid.build(fam.space, fam.surface, GridSpec())
    eq = fundamental_equation_residuals(grid)
    assert eq.gauss <= 1e-7 and eq.flatness <= 1e-8
    assert eq.r_parallel <= 1e-8
    for name in ("codazzi", "r_derivative", "s_derivative", "t_derivative"):
        assert getattr(eq, name) <= 1e-5, name
    assert eq.points == 14 * 14
    assert eq.fd_step == pytest.approx(1e-4 * np.hypot(2, 2))
    assert not eq.warnings


def test_derivative_equations_hold_off_family():
    # the R/S/T derivative equations are identities for any immersion
    space, F = wobbly_surface()
    grid = SurfaceGrid.build(space, F, GridSpec((-0.5, 0.5, -0.5, 0.5), (5, 5)))
    eq = fundamental_equation_residuals(grid)
    assert max(eq.r_derivative, eq.s_derivative, eq.t_derivative) <= 1e-5
    assert eq.r_parallel > 1e-3


def test_coarse_grid_warns(ex1):
    grid = SurfaceGrid.build(ex1.space, ex1.surface, GridSpec(shape=(3, 3)))
    eq = fundamental_equation_residuals(grid)
    assert eq.warnings and "coarse" in eq.warnings[0]


def test_grid_spec_rejects_thin_grids():
    with pytest.raises(ValueError):
        GridSpec(shape=(1, 5))


def test_xi_gram_reference(ex1):
    d = geometry_at(ex1.space, ex1.surface, -0.2, 0.7)
    np.testing.assert_allclose(d.signature.gram(d.xi()), np.diag([3 / 16, 1 / 4]), atol=1e-9)
    Z = d.Z()
    np.testing.assert_allclose(np.diag(d.signature.gram(Z)), [-3 / 16, 1 / 8], atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.sampled_from(range(len(ALL))))
def test_batched_normal_frame_matches_scalar(s, t, which):
    name, moduli = ALL[which]
    fam = build_family(name, **moduli)
    d = pointwise_geometry(fam.space, eval_map(fam.surface, s, t), (s, t))
    fixed = [(nu, sign) for nu, sign in d.nus] + [(E, 1) for E in d.tangents]
    ref = np.array(orthonormalize_against(fam.space.signature, np.eye(fam.space.dim), fixed))
    batched = _normal_frames(fam.space, d.tangents[None], [(nu[None], sign) for nu, sign in d.nus])[0]
    np.testing.assert_allclose(batched, ref, atol=1e-10)
    np.testing.assert_allclose(d.normal_frame, ref, atol=1e-10)
