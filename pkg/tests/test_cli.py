import csv
import io
import json
import subprocess
import sys

import pytest

from accessauth.cli import build_parser, main

SMALL = ["--devices", "20", "--resources", "10", "--active", "4", "--slots", "8", "--trials", "2",
         "--snr-db", "0,20"]


def test_simulate_stdout(capsys):
    assert main(["simulate", *SMALL]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 2 and rows[0]["K"] == "20"


def test_simulate_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", *SMALL, "--seed", "9", "--output", str(a)]) == 0
    assert main(["simulate", *SMALL, "--seed", "9", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_json_and_verdicts(tmp_path):
    out, ver = tmp_path / "s.json", tmp_path / "v.csv"
    assert main(["simulate", *SMALL, "--baseline", "--format", "json", "--output", str(out),
                 "--verdicts", str(ver), "--verdict-trials", "2"]) == 0
    doc = json.loads(out.read_text())
    assert doc["campaigns"][0]["config"]["baseline_enabled"] is True
    lines = ver.read_text().splitlines()
    assert lines[0] == "trial,slot,device,gamma,reason" and len(lines) == 1 + 2 * 8 * 20


def test_sweep(capsys):
    assert main(["sweep", *SMALL, "--snr-db", "10", "--sweep-active", "2,4", "--sweep-schedule-len", "4 8"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [(r["S"], r["L"]) for r in rows] == [("2", "4"), ("2", "8"), ("4", "4"), ("4", "8")]


def test_validation_error_exit(capsys):
    assert main(["simulate", "--devices", "10", "--active", "30"]) == 2
    assert "error: S:" in capsys.readouterr().err


def test_config_file_overridden_by_flag(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"K": 20, "N": 10, "S": 4, "J": 8, "trials": 100, "snr_db": [10]}))
    assert main(["simulate", "--config", str(path), "--trials", "1", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["campaigns"][0]["config"]["trials"] == 1


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "accessauth", "simulate", *SMALL], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("campaign_id,")
