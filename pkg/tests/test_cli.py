import json
import subprocess
import sys

import pytest

from mbsc.cli import kappa_grid, main, parse_alpha
from mbsc.modular import SQRT_PI


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_alpha_token():
    assert parse_alpha("sqrt-pi") == SQRT_PI
    assert parse_alpha("1.5") == 1.5


def test_kappa_grid_endpoints():
    ks = kappa_grid(0.05, 2.0, 50, "log")
    assert len(ks) == 50 and ks[0] == 0.05 and ks[-1] == pytest.approx(2.0, rel=1e-15)
    assert kappa_grid(0.1, 0.3, 3, "linear") == pytest.approx([0.1, 0.2, 0.3])
    assert kappa_grid(0.7, 0.7, 1, "log") == [0.7]


def test_sweep_csv_is_byte_identical(tmp_path, capsys):
    flags = ["gkp-sweep", "--delta", "0.1", "--kappa-min", "0.5", "--kappa-max", "2",
             "--steps", "4", "--alpha", "sqrt-pi"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *flags, "-o", str(a))[0] == 0
    assert run(capsys, *flags, "--jobs", "2", "-o", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert len(lines) == 5 and lines[0].startswith("kappa,bloch_x")


def test_sweep_formats(capsys):
    code, out, _ = run(capsys, "gkp-sweep", "--kappa-min", "1", "--kappa-max", "2", "--steps", "2",
                       "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert [r["status"] for r in data["records"]] == ["ok", "ok"]
    code, out, _ = run(capsys, "gkp-sweep", "--kappa-min", "1", "--kappa-max", "2", "--steps", "2",
                       "--format", "svg")
    assert code == 0 and out.startswith("<svg") and out.rstrip().endswith("</svg>")


def test_sweep_reports_bad_points_on_stderr(capsys):
    code, out, err = run(capsys, "gkp-sweep", "--kappa-min", "1", "--kappa-max", "1", "--steps", "1",
                         "--K", "4")
    assert code == 0
    assert out.splitlines()[1].split(",")[-1].startswith("error:")
    assert "error:" in err


@pytest.mark.parametrize("argv", [
    ["gkp-sweep", "--steps", "0"],
    ["gkp-sweep", "--delta", "-1"],
    ["gkp-sweep", "--alpha", "banana"],
    ["logical"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_sweep_inverted_range(capsys):
    code, _, err = run(capsys, "gkp-sweep", "--kappa-min", "2", "--kappa-max", "1")
    assert code == 2 and "kappa-max" in err


def test_verify_cz(capsys):
    code, out, _ = run(capsys, "verify-cz", "--samples", "100000", "--seed", "42")
    report = json.loads(out)
    assert code == 0 and report["passed"] and report["max_mismatch"] <= 1e-10
    code, out, _ = run(capsys, "verify-cz", "--samples", "10")
    assert code == 0 and json.loads(out)["samples"] == 10
    code, _, err = run(capsys, "verify-cz", "--alpha", "1.0")
    assert code == 2 and "sqrt-pi" in err


def test_cluster2_outcome_class_and_seed_determinism(tmp_path, capsys):
    flags = ["cluster2", "--std-alpha", "1", "--K", "8"]
    code, out1, _ = run(capsys, *flags, "--seed", "7")
    _, out2, _ = run(capsys, *flags, "--seed", "7")
    assert code == 0 and out1 == out2
    code, out, _ = run(capsys, *flags, "--outcome-class", "0")
    report = json.loads(out)
    assert [m["class_index"] for m in report["measurements"]] == [0, 0]


def test_cluster2_guard_and_resolution_errors(capsys):
    code, _, err = run(capsys, "cluster2", "--max-amplitudes", "1000")
    assert code == 3 and "resource guard" in err
    code, _, _ = run(capsys, "cluster2", "--B", "8")
    assert code == 2


def test_logical_examples(capsys):
    code, out, _ = run(capsys, "logical", "--state", "gaussian(0, 0.001)")
    rho = json.loads(out)["rho_L"]["entries"]
    assert code == 0 and rho[0][0] == pytest.approx(1.0, abs=1e-10)
    code, out, _ = run(capsys, "logical", "--state", "psqueezed(0.001)")
    assert json.loads(out)["bloch"][0] == pytest.approx(1.0, abs=0.01)


def test_logical_file_round_trip(tmp_path, capsys):
    dump = tmp_path / "psi.txt"
    _, direct, _ = run(capsys, "logical", "--state", "gkp(1,1,0.1,0.75)", "--dump", str(dump))
    code, loaded, _ = run(capsys, "logical", "--file", str(dump))
    assert code == 0 and loaded == direct


@pytest.mark.parametrize("spec", ["gkp(1,1)", "circle(1)", "gaussian(0, x)", "nonsense"])
def test_logical_malformed_spec(spec, capsys):
    code, _, err = run(capsys, "logical", "--state", spec)
    assert code == 2 and err


def test_logical_missing_file(tmp_path, capsys):
    code, _, _ = run(capsys, "logical", "--file", str(tmp_path / "missing.txt"))
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mbsc", "verify-cz", "--samples", "10"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True
