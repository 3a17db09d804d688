import io
import json

import numpy as np
import pytest

from hypbc.cli import main
from hypbc.io import GridField, read_field, write_field


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def test_classify_maxwell():
    code, out = run(["classify", "--preset", "maxwell"])
    assert code == 0
    assert out.splitlines()[0] == "symmetric hyperbolic, characteristic boundary, μ=2"
    block = json.loads(out.split("\n", 1)[1])
    assert block["mu"] == 2


def test_classify_jordan_exit_2(tmp_path):
    spec = {
        "name": "jordan", "d": 1, "N": 2, "mu": 1,
        "A": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]], [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]],
        "B": [[[1, 0], [0, 0]]],
    }
    path = tmp_path / "j.json"
    path.write_text(json.dumps(spec))
    code, out = run(["classify", str(path)])
    assert code == 2 and "offending sample" in out


def test_parse_error_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"d": 1, "N": 1, "mu": 1, "A": [[[[1,0]]]], "B": [[[1,0]]]}')
    assert run(["classify", str(path)])[0] == 1
    assert "A" in capsys.readouterr().err
    assert run(["classify"])[0] == 1
    assert run(["power", "--preset", "maxwell", "--gamma-count", "3"])[0] == 1
    assert run(["bogus"])[0] == 1


def test_preset_export_and_list(tmp_path):
    code, out = run(["preset"])
    assert code == 0 and "maxwell" in out.split()
    path = tmp_path / "m.json"
    assert run(["preset", "maxwell", "--out", str(path)])[0] == 0
    code, out = run(["classify", str(path)])
    assert code == 0 and "μ=2" in out
    assert run(["preset", "wave_oblique", "--param", "b=[0.0]"])[0] == 1


def test_power_kernel_failure_exit_3(tmp_path):
    path = tmp_path / "m.json"
    run(["preset", "maxwell", "--out", str(path)])
    d = json.loads(path.read_text())
    del d["preset"]
    d["B"][1] = [[0, 0]] * 2 + [[1, 0]] + [[0, 0]] * 3
    path.write_text(json.dumps(d))
    code, out = run(["power", str(path)])
    assert code == 3 and "witness" in out


def test_power_csv_schema(tmp_path):
    csv = tmp_path / "p.csv"
    code, out = run(["power", "--preset", "wave_neumann", "--samples", "16", "--csv", str(csv)])
    assert code == 0 and out.startswith("s_hat=")
    lines = csv.read_text().splitlines()
    assert lines[0] == "gamma,rho_min,tau_worst,eta_worst_1"
    assert len(lines) == 13
    assert float(lines[1].split(",")[0]) == pytest.approx(1e-4)


def test_solve_manufactured_and_zero(tmp_path):
    out_path = tmp_path / "w.bin"
    code, out = run(["solve", "--preset", "symmetric_control", "--manufactured",
                     "--grid", "64,128", "--extent", "8,20", "--out", str(out_path)])
    assert code == 0
    err = float(out.split("recovery_error=")[1].split()[0])
    assert err <= 1e-3
    assert read_field(out_path).data.shape == (2, 64, 128)
    zero = tmp_path / "g.bin"
    write_field(zero, GridField(np.zeros((1, 32)), (0.25,)))
    code, out = run(["solve", "--preset", "symmetric_control", "--boundary", str(zero)])
    assert code == 0 and "ratio=0" in out


def test_solve_sweep_table(tmp_path):
    csv = tmp_path / "s.csv"
    code, _ = run(["solve", "--preset", "symmetric_control", "--manufactured", "--grid", "64,64",
                   "--extent", "8,20", "--gamma-sweep", "1,2", "--csv", str(csv)])
    assert code == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "gamma,lhs,rhs,ratio" and len(lines) == 3


def test_verify_exit_codes():
    code, out = run(["verify", "--preset", "wave_neumann", "--property", "wave_modulus", "--samples", "1000"])
    assert code == 0 and out.startswith("PASS wave_modulus")
    code, out = run(["verify", "--preset", "maxwell", "--property", "maxwell_bound", "--samples", "1000"])
    assert code == 5 and out.startswith("FAIL maxwell_bound")
    assert run(["verify", "--preset", "maxwell", "--property", "nope"])[0] == 1


def test_tolerance_override_validation():
    assert run(["classify", "--preset", "maxwell", "--tol", "nonsense=1"])[0] == 1
    assert run(["classify", "--preset", "maxwell", "--tol", "kernel=1e-9"])[0] == 0
