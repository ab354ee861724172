import csv
import io
import json
import subprocess
import sys

import pytest

from trinoid.cli import SWEEP_COLUMNS, main

STAR = "1/2,1/2,-1/8,1/8,1/8"
CRIT = "1/2,1/4,1/4,17/128,1/8"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_certify_example(capsys):
    code, out, _ = run(["certify", "--params", STAR, "--t0", "4/5"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "Unitarisable" and rep["k0"] == 4


def test_certify_not_certified_still_exits_zero(capsys):
    code, out, _ = run(["certify", "--params", CRIT], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "NotCertified"


def test_weights_example(capsys):
    code, out, _ = run(["weights", "--params", CRIT], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["w_inf"] == 0 and rep["balanced"] is False


def test_sign_assumption_exit_one(capsys):
    code, out, err = run(["certify", "--params", "1/2,1/2,-1/8,1/8,0"], capsys)
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "sign-assumption"


@pytest.mark.parametrize("argv", [
    ["certify", "--params", "0.5,1/2,-1/8,1/8,1/8"],
    ["certify", "--params", STAR, "--approx"],
    ["sweep", "--grid", "x.csv", "--approx"],
    ["connection", "--params", STAR],
    ["frobnicate"],
    ["sweep", "--grid", "x.csv", "--jobs", "0"],
    ["monodromy", "--params", STAR, "--t", "1/2", "--tol", "-1"],
    ["certify", "--params", "1/2,1/2"],
])
def test_malformed_arguments_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_connection_with_approx(capsys):
    code, out, _ = run(["connection", "--params", "0.5,0.5,-0.125,0.125,0.125", "--t", "0.5", "--approx"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["simultaneously_unitarisable"] is True
    assert rep["relative_difference"] < 1e-6


def test_connection_single_method(capsys):
    code, out, _ = run(["connection", "--params", STAR, "--t", "1/5", "--method", "frobenius"], capsys)
    rep = json.loads(out)
    assert "frobenius" in rep and "asymptotic" not in rep


def test_connection_domain_error(capsys):
    code, _, err = run(["connection", "--params", STAR, "--t", "1"], capsys)
    assert code == 1 and json.loads(err)["error"] == "domain"


def test_monodromy_report(capsys):
    code, out, _ = run(["monodromy", "--params", STAR, "--t", "1/2"], capsys)
    rep = json.loads(out)
    assert code == 0 and set(rep["loops"]) == {"0", "1", "inf"}
    assert rep["loops"]["0"]["trace_imag_residual"] < 1e-8


def test_deterministic_output(capsys):
    first = run(["certify", "--params", STAR], capsys)[1]
    second = run(["certify", "--params", STAR], capsys)[1]
    assert first == second
    assert list(json.loads(first)) == sorted(json.loads(first))


def test_out_file(tmp_path, capsys):
    target = tmp_path / "w.json"
    code, out, _ = run(["weights", "--params", STAR, "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["w_inf_over_pi"] == "1/16"


def _grid(tmp_path):
    path = tmp_path / "grid.csv"
    path.write_text("w0,w1,r0h,r1h,p\n" + "\n".join([STAR, CRIT, "1/2,1/2,-1/8,1/8,0", "1/2,1/2,-1/8,1/8,9/1000"]) + "\n")
    return path


def test_sweep_rows_and_columns(tmp_path, capsys):
    code, out, _ = run(["sweep", "--grid", str(_grid(tmp_path))], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == SWEEP_COLUMNS
    assert rows[0]["verdict"] == "Unitarisable" and rows[0]["parity"] == "3"
    assert [rows[0][f"sign_{s}"] for s in ("++", "+-", "-+", "--")] == ["-", "+", "+", "+"]
    assert rows[1]["verdict"] == "NotCertified" and rows[1]["balance_w0"] == "fail"
    assert rows[2]["verdict"] == "error" and rows[2]["error"].startswith("sign-assumption")


def test_sweep_independent_of_jobs(tmp_path, capsys):
    grid = str(_grid(tmp_path))
    one = run(["sweep", "--grid", grid, "--jobs", "1"], capsys)[1]
    three = run(["sweep", "--grid", grid, "--jobs", "3"], capsys)[1]
    assert one == three


def test_sweep_missing_columns(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    code, _, err = run(["sweep", "--grid", str(bad)], capsys)
    assert code == 1 and "missing" in json.loads(err)["message"]


def test_geom(capsys):
    m0 = json.dumps([[[0, 1], [0, 0]], [[0, 0], [0, -1]]])
    m1 = json.dumps([[0, 1], [-1, 0]])
    code, out, _ = run(["geom", "--m0", m0, "--m1", m1], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["pair"]["value"] is True
    assert rep["axes"]["intersection"] == [0.0, 0.0, 0.0]


def test_geom_bad_matrix(capsys):
    code, _, err = run(["geom", "--m0", "[[1, 2], [3, 4]]"], capsys)
    assert code == 1 and json.loads(err)["error"] == "domain"


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "trinoid.cli", "weights", "--params", STAR],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["balanced"] is True
