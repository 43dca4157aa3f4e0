import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from umbilic.cli import main
from umbilic.families import build_family
from umbilic.product import membership_residual


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_small_grid(capsys):
    code, out, _ = run(capsys, "build", "--family", "example1", "--k1", "-1", "--lambda1", "0.25",
                       "--lambda2", "0.5", "--grid", "2x2", "--rect", "0,1,0,1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "s,t,x1,x2,x3,x4,x5,x6"
    assert len(lines) == 5
    assert lines[1].startswith("0,0,1.7320508")


def test_build_round_trip_membership(tmp_path):
    out = tmp_path / "ex2.csv"
    assert main(["build", "--family", "example2", "--k2", "-3", "--grid", "5x4", "--out", str(out)]) == 0
    fam = build_family("example2", k1=-1.0, k2=-3.0, lambda1=0.25, lambda2=0.5)
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20
    for row in rows:
        p = np.array([float(row[f"x{i}"]) for i in range(1, 9)])
        assert max(abs(r) for r in membership_residual(fam.space, p)) <= 1e-12
        # 17 significant digits reproduce the evaluated point exactly
        assert np.array_equal(p, fam.surface(float(row["s"]), float(row["t"])))


def test_build_obj_per_hyperbolic_factor(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["build", "--family", "example2", "--k2", "-3", "--grid", "4x3",
                 "--projection", "ball", "--out", str(out)]) == 0
    for i in (1, 2):
        text = (tmp_path / f"m_factor{i}.obj").read_text().splitlines()
        verts = [l for l in text if l.startswith("v ")]
        faces = [l for l in text if l.startswith("f ")]
        assert len(verts) == 12 and len(faces) == 3 * 2
        V = np.array([[float(x) for x in l.split()[1:]] for l in verts])
        assert np.linalg.norm(V, axis=1).max() < [1.0, 3**-0.5][i - 1]
    # flat factor of example1 gets no mesh
    out1 = tmp_path / "e1.csv"
    assert main(["build", "--grid", "3x3", "--projection", "ball", "--out", str(out1)]) == 0
    assert (tmp_path / "e1_factor1.obj").exists()
    assert not (tmp_path / "e1_factor2.obj").exists()


def test_thin_grid_rejected(capsys):
    code, out, err = run(capsys, "build", "--grid", "1x5")
    assert code == 2 and "grid" in err and out == ""


def test_invalid_moduli_names_field(capsys):
    code, _, err = run(capsys, "verify", "--lambda1", "0.7")
    assert code == 2 and "lambda2" in err
    code, _, err = run(capsys, "verify", "--k1", "1")
    assert code == 2 and "k1" in err


def test_verify_default_exit_zero(capsys):
    code, out, err = run(capsys, "verify")
    assert code == 0
    assert json.loads(out)["pass"] is True
    assert err == ""


def test_verify_tolerance_override_fails(capsys):
    code, out, err = run(capsys, "verify", "--grid", "6x6", "--tol", "umbilicity=1e-17")
    assert code == 1
    assert "umbilicity" in err
    assert json.loads(out)["pass"] is False


def test_malformed_config(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"family": "example1",')
    report = tmp_path / "r.json"
    code, out, err = run(capsys, "verify", "--config", str(cfg), "--out", str(report))
    assert code == 2
    assert "invalid JSON" in err
    assert out == "" and not report.exists()


def test_config_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "example2", "k1": -1, "k2": -3, "lambda1": 0.25,
                               "lambda2": 0.5, "grid": "5x5", "tolerances": {"umbilicity": 1e-17}}))
    code, out, _ = run(capsys, "verify", "--config", str(cfg))
    assert code == 1
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--tol", "umbilicity=1e-9")
    assert code == 0
    assert json.loads(out)["grid"]["shape"] == [5, 5]
    cfg.write_text(json.dumps({"lambda3": 0.1}))
    code, _, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 2 and "lambda3" in err


def test_verify_reports_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["verify", "--family", "example2", "--k2", "-3", "--grid", "6x6", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_curvature_table_example2(capsys):
    code, out, _ = run(capsys, "curvatures", "--family", "example2", "--k1", "-1", "--k2", "-3")
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert rows[0]["regime"] == "lightlike"
    assert float(rows[0]["k1_sq_closed"]) == 0.1875
    assert float(rows[0]["k2_sq_numeric"]) == pytest.approx(1 / 3, abs=1e-12)
    assert rows[0]["k3_sq_closed"] == ""
    assert rows[1]["regime"] == "generic"
    for r in rows:
        for j in (1, 2, 3):
            if r[f"k{j}_sq_absdiff"]:
                assert float(r[f"k{j}_sq_absdiff"]) <= 1e-7


def test_curvature_table_example1(capsys):
    code, out, _ = run(capsys, "curvatures")
    rows = list(csv.DictReader(out.splitlines()))
    assert [r["dim"] for r in rows] == ["3", "3"]
    assert all(r["k3_sq_closed"] == r["k3_sq_numeric"] == "" for r in rows)
    assert float(rows[0]["k2_sq_closed"]) == 0.0625


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "umbilic", "curvatures"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("curve,regime,dim")


def test_unwritable_output(capsys):
    code, _, err = run(capsys, "curvatures", "--out", "/nonexistent-dir/x.csv")
    assert code == 3 and "cannot write" in err
