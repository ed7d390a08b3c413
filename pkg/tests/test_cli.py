import json

import pytest

from stp.cli import Report, main
from stp.hocolim import INCONCLUSIVE


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_homology_text(capsys):
    code, out, _ = run(capsys, "homology", "rp2_6", "Z/2", "2")
    assert code == 0
    assert "reduced homology: H~_0 = 0, H~_1 = Z/2, H~_2 = Z/2" in out
    assert out.splitlines()[0] == "$ stp homology rp2_6 Z/2 2"
    assert out.rstrip().endswith("result: PASS")


def test_homology_options_override_positionals(capsys):
    code, out, _ = run(capsys, "homology", "torus9", "--coeff", "Z+Z/2", "--max-degree", "1", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["groups"]["reduced homology"] == ["0", "Z^2 + Z/2 + Z/2"]
    assert data["command"] == "stp homology torus9 Z+Z/2 1"
    assert data["info"]["coefficients"] == "Z + Z/2"


def test_verify_text_and_json_agree(capsys):
    code, out, _ = run(capsys, "verify", "sphere_min", "Z", "2")
    code_j, out_j, _ = run(capsys, "verify", "sphere_min", "Z", "2", "--json")
    data = json.loads(out_j)
    assert code == code_j == 0
    assert data["result"] == "PASS"
    for c in data["checks"]:
        assert f"check {c['name']}: {c['verdict']}" in out
    assert "pi of A[X]/A[*]: pi_0 = 0, pi_1 = 0, pi_2 = Z" in out


def test_reports_are_byte_identical(capsys):
    _, a, _ = run(capsys, "hocolim", "circle3", "2", "Z", "1", "--check-svk", "--compare-space")
    _, b, _ = run(capsys, "hocolim", "circle3", "2", "Z", "1", "--check-svk", "--compare-space")
    assert a == b
    assert "time" not in a


def test_timings_only_on_request(capsys):
    _, out, _ = run(capsys, "homology", "circle3", "--timings")
    assert "time homology:" in out


def test_hocolim_checks(capsys):
    code, out, _ = run(capsys, "hocolim", "circle6", "2", "Z/2", "1", "--check-svk",
                       "--compare-space", "--compare-leq-k", "3", "--strict", "--json")
    data = json.loads(out)
    assert code == 0
    names = {c["name"]: c["verdict"] for c in data["checks"]}
    assert names == {"svk": "pass", "chain hocolim = space hocolim": "pass",
                     "restriction 2 vs 3": "pass", "hocolim = reduced homology": "pass"}
    assert data["groups"]["hocolim of H~_0"] == ["0", "Z/2"]


def test_strict_reports_failure(capsys):
    # one component per object cannot see the circle
    code, out, _ = run(capsys, "hocolim", "circle3", "1", "Z", "1", "--strict")
    assert code == 1
    assert "check hocolim = reduced homology: fail [witness: degree 1: 0 vs Z]" in out
    assert out.rstrip().endswith("result: FAIL")


def test_sympower(capsys):
    code, out, _ = run(capsys, "sympower", "circle3", "2", "2", "--stabilize")
    assert code == 0
    assert "SP^2 homology: H_0 = Z, H_1 = Z, H_2 = 0" in out
    assert "check stabilization iso through degree 1: pass" in out


def test_cell_limit_is_an_input_error(capsys):
    code, _, err = run(capsys, "sympower", "sphere_min", "3", "2", "--cell-limit", "10")
    assert code == 2 and "limit" in err


def test_file_input(tmp_path, capsys):
    path = tmp_path / "tri.json"
    path.write_text(json.dumps({"vertices": 3, "basepoint": 0,
                                "maximal_simplices": [[0, 1], [1, 2], [0, 2]]}))
    code, out, _ = run(capsys, "homology", str(path))
    assert code == 0 and "H~_1 = Z" in out


@pytest.mark.parametrize("argv", [
    ["homology", "nowhere"],
    ["homology", "circle3", "Q"],
    ["homology", "circle3", "Z", "-1"],
    ["sympower", "circle3", "0"],
    ["hocolim", "circle3", "0"],
    ["homology", "circle3", "--subdivide", "-1"],
])
def test_input_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and err.startswith("stp: error:") and out == ""


def test_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "homology", str(path))
    assert code == 2


def test_exit_code_policy():
    r = Report("x")
    r.check("a", "pass")
    assert r.exit_code(False) == 0
    r.check("b", INCONCLUSIVE)
    assert r.exit_code(False) == 1 and r.exit_code(True) == 0
    r.check("c", "fail")
    assert r.exit_code(True) == 1


def test_console_script_entry_point():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-m", "stp.cli", "homology", "point"], capture_output=True, text=True)
    assert out.returncode == 0 and "result: PASS" in out.stdout


def test_echo_and_restriction_flag(capsys):
    code, out, _ = run(capsys, "hocolim", "circle3", "3", "Z", "1", "--compare-leq-k", "2")
    assert code == 0
    assert out.splitlines()[0] == "$ stp hocolim circle3 3 Z 1 --compare-leq-k 2"
    assert "check restriction 3 vs 2: pass" in out


def test_strict_runs_svk(capsys):
    code, out, _ = run(capsys, "hocolim", "circle6", "2", "Z", "1", "--strict")
    assert code == 0
    assert "check svk: pass (12 certified, 0 refuted, 0 inconclusive)" in out
