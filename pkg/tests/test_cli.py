import json
import subprocess
import sys

import pytest

from siegel_gap.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv,expected", [
    (["verify", "7", "--q", "5", "--r", "7", "--t", "7", "--primes", "1000"], EXIT_OK),
    (["verify", "8", "--y", "2", "--b", "2", "--V", "10000"], EXIT_OK),
    (["verify", "3", "--R", "10"], EXIT_INCONCLUSIVE),
    (["verify", "3", "--R", "1000000"], EXIT_OK),
    (["verify", "5", "--x", "10"], EXIT_INCONCLUSIVE),
    (["verify", "5", "--x", "100000"], EXIT_OK),
    (["verify", "2", "--d", "-4", "--beta", "0.9"], EXIT_OK),
    (["verify", "6", "--d", "5", "--R", "35"], EXIT_FAIL),
    (["verify", "8", "--y", "2", "--V", "50", "--tail", "none"], EXIT_INCONCLUSIVE),
    (["scan", "zeros", "--d", "-4", "--lo", "0.6", "--hi", "0.99"], EXIT_OK),
    (["scan", "lemma4", "--d", "5", "--vmax", "20", "--samples", "101"], EXIT_OK),
    (["theorem", "bound", "--q", "1000003", "--c1", "3"], EXIT_OK),
    (["theorem", "aggregate", "--d", "5", "--beta", "0.9", "--R", "35", "--y", "10000"], EXIT_OK),
    (["verify", "9"], EXIT_USAGE),
    (["verify", "7", "--d", "6"], EXIT_USAGE),
    (["verify", "7", "--q", "8"], EXIT_USAGE),
    (["verify", "7", "--d", "5", "--r", "4"], EXIT_USAGE),
    (["theorem", "contour", "--beta", "0.5"], EXIT_USAGE),
    (["theorem", "bound", "--q", "2"], EXIT_USAGE),
    (["theorem", "aggregate", "--R", "10", "--y", "1e7", "--work-limit", "1e6"], EXIT_RESOURCE),
    (["theorem", "aggregate", "--R", "2", "--paper-choice"], EXIT_RESOURCE),
    (["verify", "5", "--x", "100000", "--sieve-limit", "1000"], EXIT_RESOURCE),
    (["verify", "3", "--precision", "0"], EXIT_USAGE),
])
def test_exit_codes(capsys, argv, expected):
    code, _, _ = run(capsys, *argv)
    assert code == expected


def test_json_schema_and_values(capsys):
    code, out, _ = run(capsys, "verify", "8", "--y", "2", "--b", "2", "--V", "10000")
    body = json.loads(out)
    assert body["schema"] == "siegel-gap/1"
    rep = body["reports"][0]
    assert rep["lemma"] == "8" and rep["verdict"] == "pass"
    assert float(rep["measured"]["numeric"]) == pytest.approx(0.5, abs=1e-8)


def test_verify_3_prints_exact_sum(capsys):
    _, out, _ = run(capsys, "verify", "3", "--R", "10", "--format", "pretty")
    assert "47/35" in out and "main_term" in out


def test_bound_output(capsys):
    _, out, _ = run(capsys, "theorem", "bound", "--q", "1000003", "--c1", "3", "--format", "pretty")
    assert "c = 0.0343316340209" in out and "EXPLORATORY" in out


def test_aggregate_csv(capsys):
    code, out, _ = run(capsys, "theorem", "aggregate", "--d", "5", "--R", "10", "35", "--y", "2", "1000",
                       "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "q,d,beta,R,y,lhs,lower_bound,rhs_main,defect"
    assert len(lines) == 5
    row = lines[1].split(",")
    assert row[5] == row[6]  # y = 2: lhs equals the lower bound


def test_zero_scan_empty(capsys):
    _, out, _ = run(capsys, "scan", "zeros", "--d", "-4", "--lo", "0.6", "--hi", "0.99")
    assert json.loads(out)["reports"][0]["zeros"] == []


def test_output_file_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", "7", "--d", "-4", "--r", "5", "--t", "35", "--primes", "200", "--N", "300",
                     "--output", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert capsys.readouterr().out == ""


def test_precision_controls_digits(capsys):
    _, out, _ = run(capsys, "verify", "2", "--d", "5", "--precision", "8")
    assert json.loads(out)["reports"][0]["measured"]["L1"] == "0.43040894"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "siegel_gap", "theorem", "bound", "--q", "101"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema"] == "siegel-gap/1"
