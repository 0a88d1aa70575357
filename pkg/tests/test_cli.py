import csv
import io
import json
import subprocess
import sys

import pytest

from cqes import __version__
from cqes.cli import fmt, run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_analytic_example(capsys):
    code, out, _ = _run(capsys, "analytic", "--beta", "-5", "--kappa", "3", "--irrep", "A1")
    assert code == 0
    assert out.startswith(f"# cqes {__version__} command=analytic")
    rows = _rows(out)
    assert [float(r["E_t"]) for r in rows] == pytest.approx([-34.5125, -14.4875], abs=5e-5)
    assert list(rows[0])[:6] == ["kappa", "irrep", "n", "E_t", "E_h", "coeff_0"]
    assert rows[0]["coeff_1"] == "1"


def test_analytic_pads_coefficients(capsys):
    code, out, _ = _run(capsys, "analytic", "--beta", "-5", "--kappa", "5")
    rows = _rows(out)
    assert code == 0 and len(rows) == 5
    a2 = [r for r in rows if r["irrep"] == "A2"]
    assert all(r["coeff_2"] == "" for r in a2)


def test_analytic_hyp(capsys):
    code, out, _ = _run(capsys, "analytic", "--system", "hyp", "--beta", "-5", "--kappa", "2",
                        "--irrep", "B2")
    assert code == 0
    (row,) = _rows(out)
    assert row["irrep"] == "A''" and float(row["E_h"]) == pytest.approx(29.75)


def test_fgh_example(capsys):
    code, out, _ = _run(capsys, "fgh", "--system", "hyp", "--beta", "-5", "--kappa", "1",
                        "--levels", "1")
    assert code == 0
    (row,) = _rows(out)
    assert float(row["energy"]) == pytest.approx(25.0, abs=1e-6)
    assert (row["n"], row["irrep"], row["method"]) == ("0", "A'", "FGH")


def test_verify_example(capsys):
    code, out, _ = _run(capsys, "verify", "--beta", "-5", "--kappa", "2.5")
    assert code == 0
    assert json.loads(out)["holds"] is False
    code, out, _ = _run(capsys, "verify", "--beta", "-5", "--kappa", "3")
    assert code == 0 and json.loads(out)["holds"] is True


def test_spectrum_and_build_matrix(capsys):
    code, out, _ = _run(capsys, "spectrum", "--beta", "-5", "--kappa", "1", "--irrep", "B",
                        "--levels", "3")
    assert code == 0
    assert [float(r["energy"]) for r in _rows(out)] == pytest.approx(
        [-25.0, -15.5601, -15.5369], abs=5e-5)
    code, out, _ = _run(capsys, "spectrum", "--beta", "-5", "--kappa", "2.5", "--method", "fgh",
                        "--levels", "4", "--irrep", "A")
    assert code == 0 and {r["irrep"] for r in _rows(out)} <= {"A1", "A2"}
    code, out, _ = _run(capsys, "build-matrix", "--beta", "-5", "--kappa", "3", "--irrep", "A2",
                        "--dim", "6", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["split_index"] == 1 and len(d["diag"]) == 6
    assert set(d) >= {"irrep", "beta", "kappa", "dim", "diag", "sub", "sup", "split_index"}


def test_eta_zeta_source(capsys):
    code, out, _ = _run(capsys, "analytic", "--eta", "-15", "--zeta", "25", "--irrep", "A2")
    assert code == 0 and float(_rows(out)[0]["E_t"]) == pytest.approx(-24.0)


def test_wavefunction(capsys):
    code, out, _ = _run(capsys, "wavefunction", "--beta", "-5", "--kappa", "1", "--points", "64")
    rows = _rows(out)
    assert code == 0 and len(rows) == 64 and "energy=-25 source=analytic" in out.splitlines()[0]
    code, out, _ = _run(capsys, "wavefunction", "--beta", "-5", "--kappa", "2.5", "--n", "1",
                        "--points", "32")
    assert code == 0 and "source=truncated" in out
    code, out, _ = _run(capsys, "wavefunction", "--system", "hyp", "--beta", "-5", "--kappa",
                        "3", "--irrep", "A''", "--points", "32")
    assert code == 0 and "energy=24" in out


@pytest.mark.parametrize(
    "argv,code",
    [
        (["analytic", "--beta", "-5", "--kappa", "3", "--eta", "1", "--zeta", "1"], 1),
        (["analytic", "--beta", "-5"], 1),
        (["analytic", "--beta", "-5", "--kappa", "2.5"], 1),
        (["analytic", "--beta", "nan", "--kappa", "3"], 1),
        (["fgh", "--beta", "-5", "--kappa", "3", "--grid", "1000"], 1),
        (["spectrum", "--system", "hyp", "--beta", "-5", "--kappa", "3"], 1),
        (["bogus"], 1),
        ([], 1),
        (["wavefunction", "--system", "hyp", "--beta", "-5", "--kappa", "2.5"], 1),
        (["wavefunction", "--beta", "5", "--kappa", "2.5", "--n", "1"], 2),
        (["fgh", "--system", "hyp", "--beta", "-0.75", "--kappa", "3", "--box", "2.0",
          "--strict"], 2),
    ],
)
def test_exit_codes(capsys, argv, code):
    assert _run(capsys, *argv)[0] == code


def test_box_warning_without_strict(capsys):
    code, out, err = _run(capsys, "fgh", "--system", "hyp", "--beta", "-0.75", "--kappa", "3",
                          "--box", "2.0", "--levels", "3")
    assert code == 0 and "warning" in err and len(_rows(out)) == 3


def test_determinism(tmp_path):
    argv = ["fgh", "--beta", "-5", "--kappa", "2.5", "--levels", "6", "--grid", "256"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["-o", str(a)]) == 0
    assert run(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    proc = subprocess.run([sys.executable, "-m", "cqes", *argv], capture_output=True, check=True)
    assert proc.stdout == a.read_bytes()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"beta": -5, "kappa": 3, "irrep": "A2", "format": "json"}))
    code, out, _ = _run(capsys, "analytic", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["rows"][0]["E_t"] == pytest.approx(-24.0)
    # the command line wins
    code, out, _ = _run(capsys, "analytic", "--config", str(cfg), "--irrep", "A1")
    assert len(json.loads(out)["rows"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert _run(capsys, "analytic", "--config", str(bad))[0] == 1


def test_scan_outputs(tmp_path):
    out = tmp_path / "curves.csv"
    code = run(["scan", "--beta", "-5", "--kappa-min", "0.5", "--kappa-max", "2.5", "--steps",
                "5", "--levels", "3", "--grid", "256", "-o", str(out)])
    assert code == 0
    events = tmp_path / "curves_events.csv"
    assert out.read_text().splitlines()[1] == "kappa,level,irrep,E_t,minus_E_h"
    assert events.read_text().splitlines()[1] == "kind,kappa,irreps,gap"
    assert "Genuine" in events.read_text()


def test_reproduce_command(tmp_path, capsys):
    code, out, _ = _run(capsys, "reproduce", "table4-check", "-o", str(tmp_path), "--strict")
    assert code == 0 and out.startswith("PASS table4-check")
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["passed"] is True


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(float("nan")) == "" and fmt(None) == ""
    assert fmt(3) == "3" and fmt(True) == "true"
    assert float(fmt(-14.487517771980463)) == -14.487517771980463
