import json

import pytest

from umbilic.errors import CheckError
from umbilic.product import GridSpec
from umbilic.verification import (
    CHECKS,
    CheckSpec,
    check_names,
    default_checks,
    run_suite,
    z_norm_closed_form,
)

from conftest import corrupted_b2, doubled_speed, mismatched_helix

SMALL = GridSpec(shape=(6, 6))


def test_default_suite_passes_example1(ex1):
    report = run_suite(ex1)
    assert report.passed, report.failures
    assert [c.name for c in report.checks] == check_names()


def test_default_suite_passes_example2(ex2):
    assert run_suite(ex2).passed


def test_every_check_reachable():
    # one entry per invariant family exercised elsewhere in the package
    expected = {
        "membership", "unit_speed", "umbilicity", "tensor_identities", "spectrum_bounds",
        "r_eigenvalues", "r_eigendirections", "mean_curvature_norm", "mean_curvature_vector",
        "h_orthogonal_to_S", "gauss_flatness", "gauss_equation", "r_parallel", "codazzi",
        "r_derivative", "s_derivative", "t_derivative", "xi_gram", "z_norms", "z_orthogonality",
        "frenet_closed_form", "frenet_constancy", "frenet_equations", "frenet_frame",
        "regime_agreement", "product_split", "injectivity",
    }
    assert set(CHECKS) == expected


def test_z_norm_reference(ex1):
    assert z_norm_closed_form(ex1.params)[0] == pytest.approx(-3 / 16)


def test_checkspec_validation():
    with pytest.raises(ValueError):
        CheckSpec("umbilicity", 0.0)
    with pytest.raises(ValueError):
        CheckSpec("umbilicity", 1e-9, scope="global")
    with pytest.raises(ValueError):
        default_checks({"nonsense": 1.0})


def test_subset_and_disabled(ex1):
    checks = [CheckSpec("umbilicity", 1e-9), CheckSpec("membership", 1e-12), CheckSpec("codazzi", 1e-5, enabled=False)]
    report = run_suite(ex1, SMALL, checks)
    # executed in canonical order, disabled checks omitted
    assert [c.name for c in report.checks] == ["membership", "umbilicity"]
    assert "interior_points" not in report.stats


def test_below_roundoff_tolerance_fails(ex1):
    report = run_suite(ex1, SMALL, default_checks({"umbilicity": 1e-17}))
    assert report.failures == ["umbilicity"]
    assert report["umbilicity"].location is not None


@pytest.mark.parametrize("corrupt", [corrupted_b2, doubled_speed, mismatched_helix])
def test_corruptions_detected(ex1, corrupt):
    report = run_suite(corrupt(ex1), SMALL, on_error="record")
    failing = [c for c in report.checks if not c.passed and c.max_residual is not None]
    assert max(c.max_residual for c in failing) >= 1e-4


def test_corrupted_b2_fails_unit_speed_and_umbilicity(ex1):
    report = run_suite(corrupted_b2(ex1), SMALL, on_error="record")
    assert {"unit_speed", "umbilicity"} <= set(report.failures)


def test_raise_mode_names_the_check(ex1):
    with pytest.raises(CheckError) as info:
        run_suite(doubled_speed(ex1), SMALL, [CheckSpec("frenet_frame", 1e-9, "per-curve")])
    assert info.value.check == "frenet_frame"


def test_record_mode_keeps_going(ex1):
    report = run_suite(doubled_speed(ex1), SMALL, on_error="record")
    entry = report["frenet_frame"].to_dict()
    assert entry["pass"] is False and "unit-speed" in entry["error"]
    assert len(report.checks) == len(CHECKS)


def test_report_json_is_deterministic(ex2):
    a = run_suite(ex2, SMALL).to_json()
    b = run_suite(ex2, SMALL).to_json()
    assert a == b
    data = json.loads(a)
    assert data["family"] == "example2" and data["pass"] is True
    assert "elapsed" not in a
    assert data["stats"]["grid_points"] == 36


def test_coarse_grid_warning_in_report(ex1):
    report = run_suite(ex1, GridSpec(shape=(3, 3)), [CheckSpec("codazzi", 1e-5)])
    assert report.warnings
