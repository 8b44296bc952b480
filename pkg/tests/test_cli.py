import csv
import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from entmoments import acceptance
from entmoments.analysis import CSV_COLUMNS, write_atomic
from entmoments.cli import main
from entmoments.linalg import DensityMatrix
from entmoments.states import parse_matrix_text, sigma_b_unnormalized


def run(capsys, *argv, ctx=None):
    code = main(list(argv), ctx=ctx)
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_check_werner_detected(capsys):
    code, out, _ = run(capsys, "check", "werner:0.5", "lambda1", "B", "5")
    assert code == 0
    assert any(line.split()[:2] == ["S1", "DETECTED"] for line in out.splitlines())
    assert "-> NPT" in out


def test_check_rho_alpha_separable_region(capsys):
    code, out, _ = run(capsys, "check", "rho_alpha:2.5", "phi1", "B", "5")
    assert code == 0
    assert "DETECTED" not in out and "-> PPT" in out


def test_check_upb_prints_closed_form(capsys):
    code, out, _ = run(capsys, "check", "upb_tiles", "reduction:3", "B", "5")
    assert code == 0
    assert "-9/[4(301+sqrt(91177))]" in out
    assert f"{acceptance.upb_closed_form():+.12e}" in out


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "upb_tiles", "reduction:3", "B", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["dims"] == [3, 3] and data["map"] == "reduction:3"
    assert data["verdicts"]["S1"]["detected"] is False
    cmp = data["closed_form_comparison"]
    assert cmp["closed_form"] == pytest.approx(-9 / (4 * (301 + np.sqrt(91177))))
    assert any(r["map"] == "hou:3:ordered" and r["matches"] for r in cmp["readings"])


def test_check_json_unnormalized_tripartite(capsys):
    code, out, _ = run(capsys, "check", "ghz:0.3", "lambda1", "C", "7", "--json", "--no-normalize")
    data = json.loads(out)
    assert code == 0 and data["party"] == 2 and not data["normalized"] and len(data["moments"]) == 7


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "werner:2", "lambda1", "B"],
        ["check", "nonsense", "lambda1", "B"],
        ["check", "werner:0.5", "phi1", "B"],
        ["check", "werner:0.5", "lambda9", "B"],
        ["check", "werner:0.5", "lambda1", "Z"],
        ["check", "werner:0.5", "lambda1", "2"],
        ["check", "werner:0.5", "lambda1", "B", "3"],
        ["state", "sigma_b:1.0"],
        ["report", "--only", "12"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert len(err.strip().splitlines()) == 1 and err.startswith("entmoments: error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "werner:0.5"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_scan_werner_crossing(capsys, tmp_path):
    out_csv = tmp_path / "werner.csv"
    code, _, _ = run(capsys, "scan", "--family", "werner", "--lo", "0", "--hi", "1", "--points", "101",
                     "--map", "lambda1", "--map", "lambda2", "-o", str(out_csv))
    assert code == 0
    text = out_csv.read_text()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    rows = read_rows(text)
    assert len(rows) == 202
    assert [r["map"] for r in rows[:2]] == ["lambda1", "lambda2"]
    l1 = [(float(r["param"]), float(r["min_eig_s1"])) for r in rows if r["map"] == "lambda1"]
    first_neg = next(w for w, v in l1 if v < 0)
    assert abs(first_neg - 1 / 3) <= 0.01
    assert all(r["convention"] == "na" for r in rows)


def test_scan_refine_rho_alpha(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--family", "rho_alpha", "--lo", "3", "--hi", "3.5", "--points", "11",
                       "--map", "phi1", "--party", "A", "--refine", "q3_minus_q2sq", "-o", str(tmp_path / "a.csv"))
    assert code == 0
    line = next(ln for ln in out.splitlines() if ln.startswith("threshold"))
    assert abs(float(line.split(":")[-1]) - 3.1658) <= 1e-3


def test_scan_stdout_and_conventions(capsys):
    code, out, err = run(capsys, "scan", "--family", "sigma_b", "--lo", "0.1", "--hi", "0.9", "--points", "3",
                         "--map", "hou:4:unordered", "--map", "hou:4:ordered", "--refine", "min_eig_s2")
    assert code == 0
    rows = read_rows(out)
    assert [r["convention"] for r in rows] == ["unordered", "ordered"] * 3
    assert "threshold min_eig_s2" in err


def test_scan_is_byte_stable(capsys, tmp_path):
    args = ["scan", "--family", "rho_alpha", "--lo", "2", "--hi", "5", "--points", "9", "--map", "phi1",
            "--map", "transpose", "--party", "0"]
    run(capsys, *args, "-o", str(tmp_path / "a.csv"))
    run(capsys, *args, "-o", str(tmp_path / "b.csv"))
    run(capsys, *args, "--jobs", "3", "-o", str(tmp_path / "c.csv"))
    a = (tmp_path / "a.csv").read_bytes()
    assert a == (tmp_path / "b.csv").read_bytes() == (tmp_path / "c.csv").read_bytes()


def test_scan_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "werner", "lo": 0.0, "hi": 1.0, "points": 5, "maps": ["lambda1"], "party": "B"}))
    code, out, _ = run(capsys, "scan", "--config", str(cfg))
    assert code == 0 and len(read_rows(out)) == 5
    code, out, _ = run(capsys, "scan", "--config", str(cfg), "--points", "3")
    assert code == 0 and len(read_rows(out)) == 3


@pytest.mark.parametrize(
    "content,extra",
    [
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5, "maps": ["lambda1"], "bogus": 1}', []),
        ("{not json", []),
        ("[1, 2]", []),
        ('{"family": "werner", "lo": 1, "hi": 0, "points": 5, "maps": ["lambda1"]}', []),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 1, "maps": ["lambda1"]}', []),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5, "maps": ["lambda1"], "n": 4}', []),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5, "maps": ["phi1"]}', []),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5, "maps": []}', []),
        ('{"family": "nope", "lo": 0, "hi": 1, "points": 5, "maps": ["lambda1"]}', []),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5}', []),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5, "maps": ["lambda1"]}', ["--refine", "param"]),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5, "maps": ["lambda1"]}', ["--jobs", "0"]),
        ('{"family": "werner", "lo": 0, "hi": 1, "points": 5, "maps": ["lambda1"]}', ["--party", "C"]),
    ],
)
def test_scan_config_errors_exit_2(capsys, tmp_path, content, extra):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    target = tmp_path / "out.csv"
    code, _, err = run(capsys, "scan", "--config", str(cfg), "-o", str(target), *extra)
    assert code == 2 and err.startswith("entmoments: error:")
    assert not target.exists()


def test_scan_failure_leaves_no_partial_file(capsys, tmp_path):
    # the open interval of sigma_b excludes the grid endpoint 0
    target = tmp_path / "out.csv"
    code, _, _ = run(capsys, "scan", "--family", "sigma_b", "--lo", "0", "--hi", "0.5", "--points", "4",
                     "--map", "reduction:4", "-o", str(target))
    assert code == 2
    assert os.listdir(tmp_path) == []


def test_write_atomic_cleans_up_on_error(tmp_path, monkeypatch):
    target = tmp_path / "keep.csv"
    target.write_text("old\n")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        write_atomic(target, "new\n")
    assert target.read_text() == "old\n"
    assert os.listdir(tmp_path) == ["keep.csv"]


def test_state_command(capsys, tmp_path):
    code, out, _ = run(capsys, "state", "rho_alpha:3.5")
    assert code == 0
    rho = parse_matrix_text(out)
    assert rho.dims == (3, 3)
    path = tmp_path / "rho.txt"
    code, _, _ = run(capsys, "state", "sep:2x2:2:5", "-o", str(path))
    assert code == 0
    code, out, _ = run(capsys, "check", f"file:{path}", "transpose", "A")
    assert code == 0 and "-> PPT" in out


def corrupted_sigma_b(b):
    # zero the fourth diagonal entry of the 2x4 family; the result is NPT
    m = sigma_b_unnormalized(b)
    m[3, 3] = 0.0
    return DensityMatrix(m / np.trace(m), (2, 4))


def test_report_negative_control(capsys):
    ctx = acceptance.Context(sigma_b=corrupted_sigma_b)
    code, out, _ = run(capsys, "report", "--only", "6,7", ctx=ctx)
    assert code == 1
    assert out.startswith("[FAIL] 6 ")
    assert "[PASS] 7 " in out and "hou:3:ordered" in out


def test_report_subset_passes(capsys):
    code, out, _ = run(capsys, "report", "--only", "5,7", "--families")
    assert code == 0
    assert "2/2 checks passed" in out
    assert "sigma_b(" in out and "hou:4:ordered" in out


def test_full_report_exit_code():
    proc = subprocess.run([sys.executable, "-m", "entmoments", "report"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith("[")]
    assert [ln.split()[1] for ln in lines] == [str(k) for k in range(1, 12)]
    assert all(ln.startswith("[PASS]") for ln in lines)
    assert "matched by:" in proc.stdout
