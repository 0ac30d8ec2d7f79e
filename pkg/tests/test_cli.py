import json
import subprocess
import sys

import pytest

from tidyscale import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_scale_padic(capsys):
    code, out, _ = run(["scale", "--backend", "padic", "--prime", "3"], capsys)
    assert code == 0 and out.startswith("scale = 3, certified")


def test_scale_tree(capsys):
    code, out, _ = run(["scale", "--backend", "tree", "--degree", "4", "--length", "1"], capsys)
    assert code == 0 and out.startswith("scale = 3, certified")


def test_scale_shift_json(capsys):
    code, out, _ = run(["scale", "--backend", "shift", "--group", "Z2", "--format", "json"], capsys)
    report = json.loads(out)
    assert code == 0 and report["scale"] == "1" and report["witness"] == "G"
    assert cli.dumps(report) == out


def test_config_file(tmp_path, capsys):
    cfg = {"backend": "tree", "degree": 3,
           "automorphism": {"preset": "translation", "length": 3},
           "subgroup": [[3], [3, 1]]}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(["scale", "--input", str(path), "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["scale"] == "8"


def test_shift_config_with_generators(tmp_path, capsys):
    cfg = {"backend": "shift", "group": "S3", "shift": 1,
           "subgroup": {"generators": {"0": [3], "2": []}}}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(["scale", "--input", str(path)], capsys)
    assert code == 0 and "scale = 1" in out


def test_big_integers_are_decimal_strings(capsys):
    code, out, _ = run(["scale", "--backend", "tree", "--degree", "9", "--length", "30",
                        "--format", "json"], capsys)
    report = json.loads(out)
    assert report["scale"] == str(8 ** 30) and int(report["scale"]) > 2 ** 64


def test_same_seed_same_bytes(capsys):
    a = run(["verify", "--suite", "tachar", "--cases", "40", "--seed", "9", "--format", "json"], capsys)
    b = run(["verify", "--suite", "tachar", "--cases", "40", "--seed", "9", "--format", "json"], capsys)
    assert a == b and a[0] == 0
    assert cli.dumps(json.loads(a[1])) == a[1]


def test_undecided_when_depth_runs_out(tmp_path, capsys):
    cfg = {"backend": "shift", "group": "Z2", "shift": 1, "subgroup": {"trivial_at": [0, 9]}}
    path = tmp_path / "u.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(["scale", "--input", str(path), "--max-depth", "2"], capsys)
    assert code == 2 and "undecided" in out


@pytest.mark.parametrize("argv", [
    ["scale", "--backend", "tree", "--degree", "2"],
    ["scale", "--input", "/nonexistent.json"],
    ["scale"],
])
def test_errors_exit_one(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and err.startswith("error:")


def test_bad_budget_env(monkeypatch, capsys):
    monkeypatch.setenv("TDLC_BUDGET_SCALE", "zero")
    code, _, err = run(["scale", "--backend", "padic"], capsys)
    assert code == 1 and "TDLC_BUDGET_SCALE" in err


def test_budget_env_multiplies(monkeypatch):
    monkeypatch.setenv("TDLC_BUDGET_SCALE", "3")
    args = cli.build_parser().parse_args(["scale", "--backend", "padic"])
    assert cli.budgets_from(args, {}).max_depth == 96


@pytest.mark.parametrize("suite", ["borel", "paper-table", "modular", "periodic"])
def test_verify_suites(suite, capsys):
    code, out, _ = run(["verify", "--suite", suite], capsys)
    assert code == 0 and "passed" in out


def test_example_table_rows(capsys):
    _, out, _ = run(["verify", "--suite", "paper-table"], capsys)
    assert "scale = 27" in out and "scale = 5" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tidyscale", "verify", "--suite", "borel"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "3/3" in res.stdout
