import subprocess
import sys

import pytest

from paramodular.cli import main
from paramodular.siegel import SiegelSeries


def records(text):
    return [dict(tok.split("=", 1) for tok in line.split()) for line in text.splitlines() if line.startswith("check=")]


def test_invalid_prime_exits_2(capsys):
    assert main(["verify-group", "--p", "2"]) == 2
    assert "InvalidPrime" in capsys.readouterr().err
    assert main(["verify-group", "--p", "9"]) == 2


def test_verify_group(capsys, tmp_path):
    out = tmp_path / "r.txt"
    assert main(["verify-group", "--samples", "30", "--out", str(out)]) == 0
    recs = records(capsys.readouterr().out)
    assert recs and all(r["status"] == "pass" for r in recs)
    assert out.read_text().count("check=") == len(recs)


def test_enumerate_stats(capsys):
    assert main(["enumerate-sp4f2", "--stats"]) == 0
    assert "order=720 derived=360 classes=11" in capsys.readouterr().out


@pytest.mark.parametrize("p", ["3", "5"])
def test_audit(capsys, p):
    assert main(["audit-uniqueness", "--p", p, "--samples", "50"]) == 0
    out = capsys.readouterr().out
    assert "survivors: swap" in out and "status=pass" in out


def test_build_delta_and_check_characters(tmp_path, capsys):
    path = tmp_path / "d.siegel"
    assert main(["build-delta", "--cap", "48", "--out", str(path)]) == 0
    assert SiegelSeries.load(path).cap == 48
    capsys.readouterr()
    assert main(["check-characters", "--series", str(path), "--group", "GammaStar", "--samples", "2"]) == 0
    out = capsys.readouterr().out
    assert "element=0" in out


def test_low_cap_skips_rather_than_fails(capsys):
    assert main(["check-characters", "--cap", "6", "--samples", "2"]) == 0
    rec, = records(capsys.readouterr().out)
    assert rec["status"] == "skip" and rec["measured"].startswith("evaluated=0")


def test_dual_identity(capsys):
    assert main(["check-dual-identity", "--p", "7", "--samples", "5"]) == 0
    assert "status=pass" in capsys.readouterr().out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "paramodular.cli", "enumerate-sp4f2"], capture_output=True, text=True)
    assert res.returncode == 0 and "sp4f2_order" in res.stdout


def test_run_all_at_cap_6_skips_characters(capsys, tmp_path):
    out = tmp_path / "a.txt"
    assert main(["run-all", "--cap", "6", "--samples", "50", "--out", str(out), "--cache", str(tmp_path)]) == 0
    recs = records(out.read_text())
    chars = {"ratio_vbar_cube", "ratio_kappa_cube", "ratio_identity", "level2_cube_trivial",
             "delta1_sixth_roots", "cube_equals_sign", "delta1_multiplicative"}
    assert {r["check"] for r in recs if r["status"] == "skip"} == chars
    assert all(r["status"] == "pass" for r in recs if r["check"] not in chars)
    assert (tmp_path / "delta1-cap6-i.siegel").exists()


def test_reports_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        assert main(["run-all", "--cap", "6", "--samples", "20", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
