"""Command-line surface."""
import json
import subprocess
import sys

import pytest

from cubictwists.cli import build_parser, code_hash, main


def test_invariants(capsys):
    assert main(["invariants", "0", "0", "1", "0", "1", "0", "0", "6"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:2] == ["A1=0", "A3=6"]


def test_invariants_json(tmp_path):
    out = tmp_path / "inv.json"
    main(["invariants", "1", "0", "0", "0", "0", "0", "0", "1", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert doc["result"]["A1"] == 1 and doc["code_hash"] == code_hash()
    assert doc["config"]["command"] == "invariants"


def test_enumerate_deterministic_and_resumable(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["enumerate", "--xmax", "120", "--out", str(a)])
    main(["enumerate", "--xmax", "120", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()
    main(["enumerate", "--xmax", "120", "--out", str(a), "--resume"])
    assert "nothing to do" in capsys.readouterr().out
    assert a.read_bytes() == b.read_bytes()


def test_sel2_single_and_guard(capsys):
    assert main(["sel2", "--d", "16", "--n", "19"]) == 0
    assert "sel2=4" in capsys.readouterr().out
    assert main(["sel2", "--d", "16", "--n", "6"]) == 2
    assert main(["sel2", "--d", "-432", "--n", "6", "--no-guard"]) == 0
    assert "sel2=2" in capsys.readouterr().out


def test_sel2_family_resume(tmp_path):
    out = tmp_path / "fam.json"
    assert main(["sel2", "--d", "16", "--xmax", "60", "--out", str(out)]) == 0
    first = (tmp_path / "fam.json.csv").read_bytes()
    doc1 = json.loads(out.read_text())
    assert main(["sel2", "--d", "16", "--xmax", "60", "--out", str(out), "--resume"]) == 0
    assert (tmp_path / "fam.json.csv").read_bytes() == first
    doc2 = json.loads(out.read_text())
    assert doc1["result"]["average"] == doc2["result"]["average"]
    assert doc1["result"]["parity"]["mismatches"] == []


def test_config_errors():
    with pytest.raises(SystemExit):
        main(["enumerate"])
    with pytest.raises(SystemExit):
        main(["invariants", "1", "2"])
    with pytest.raises(SystemExit):
        main(["sel2", "--d", "16", "--xmax", "50", "--sigma", "4:1"])


def test_report_subset(tmp_path):
    out = tmp_path / "rep.json"
    assert main(["report", "--only", "1,12,13", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["result"]["passed"] and [c["id"] for c in doc["result"]["criteria"]] == [1, 12, 13]


def test_report_exit_status_on_failure():
    # criterion 4 fails at X = 10^4 (see README); report must say so
    rc = subprocess.run([sys.executable, "-m", "cubictwists.cli", "report", "--only", "4"],
                        capture_output=True, text=True)
    assert rc.returncode == 1 and "[FAIL] criterion  4" in rc.stdout


def test_other_commands(capsys):
    assert main(["sel3-growth", "--d", "2", "--xmax", "10000"]) in (0, None)
    assert main(["equidist", "--d", "-432", "--xmax", "1000", "--modulus", "3"]) in (0, None)
    assert main(["densities", "--primes-upto", "7", "--level", "1"]) in (0, None)
    assert main(["rootnum", "--d", "16", "--n", "5"]) == 0
    text = capsys.readouterr().out
    assert "main_term=" in text and "w_{16,5}" in text


def test_parser_lists_commands():
    names = set(build_parser()._subparsers._group_actions[0].choices)
    assert names == {"invariants", "enumerate", "densities", "sel2", "rootnum", "equidist",
                     "sel3-growth", "report"}
