import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from toruslab import NumericalError, cli
from toruslab.cli import main
from toruslab.numerics import thread_count


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.fixture
def z2_spec(tmp_path):
    return write(tmp_path, "z2.json", '{"label": "z^2", "polynomials": [[[0, 0], [0, 0], [1, 0]]]}')


@pytest.fixture
def pair_spec(tmp_path):
    return write(tmp_path, "pair.json",
                 '{"polynomials": [[[0, 0], [0, 0], [1, 0]], [[0, 0], [1, 0]]]}')


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_json(capsys, z2_spec):
    code, out, _ = run(capsys, "analyze", z2_spec, "--rmax", "1e4")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "analyze" and doc["deterministic"] is True
    assert doc["inputs"]["spec"]["label"] == "z^2"
    res = doc["results"]
    assert res["m"] == 1 and res["verdict"] == "pass"
    assert abs(res["growth_slope"] - 1) <= 0.05
    assert abs(res["order_estimate"] - 2) <= 0.05


def test_analyze_csv_and_profile(capsys, tmp_path, z2_spec):
    prof = tmp_path / "prof.csv"
    code, out, _ = run(capsys, "analyze", z2_spec, "--rmax", "1e3", "--format", "csv",
                       "--profile", str(prof))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["quantity", "value"]
    assert dict(rows[1:])["m"] == "1"
    table = list(csv.reader(prof.open()))
    assert table[0] == ["r", "max_norm"] and float(table[1][0]) == 1.0


def test_analyze_constant(capsys, tmp_path):
    spec = write(tmp_path, "c.json", '{"polynomials": [[[7, 0]]]}')
    code, out, _ = run(capsys, "analyze", spec)
    assert code == 0
    res = json.loads(out)["results"]
    assert res["verdict"] == "constant map" and res["m"] == -1 and res["growth_slope"] is None


def test_output_is_deterministic(capsys, tmp_path, pair_spec):
    outs = []
    for threads in ("1", "3"):
        path = tmp_path / f"out{threads}.json"
        assert main(["--threads", threads, "characteristic", pair_spec, "--rmax", "100",
                     "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_levelset_csv_roundtrip(capsys):
    code, out, _ = run(capsys, "levelset", "--poly", "0,0,1", "--rmax", "1e3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    last = rows[-1]
    r, measure = float(last["r"]), float(last["measure"])
    assert r == 1000.0
    assert measure * r == pytest.approx(4.0, rel=1e-3)
    # shortest round-trip reprs parse back to the exact doubles
    assert repr(measure) == last["measure"]


def test_levelset_from_spec_index(capsys, pair_spec):
    code, out, _ = run(capsys, "levelset", "--spec", pair_spec, "--index", "0", "--rmax", "100")
    assert code == 0
    assert json.loads(out)["results"]["degree"] == 2


def test_characteristic_oracle(capsys, pair_spec):
    code, out, _ = run(capsys, "characteristic", pair_spec, "--rmax", "4", "--oracle",
                       "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["T"] == "0.0"
    assert all(float(row["rel_discrepancy"]) <= 1e-6 for row in rows[1:])


def test_recover_blackbox(capsys, pair_spec):
    code, out, _ = run(capsys, "recover", "--spec", pair_spec, "--blackbox",
                       "--radius", "2", "--radius", "5")
    assert code == 0
    res = json.loads(out)["results"]
    assert res["degrees"] == [2, 1] and res["max_degree_equals_m_plus_1"] is True


def test_recover_from_sample_files(capsys, tmp_path):
    paths = []
    for r in (2.0, 5.0):
        lines = ["theta_index,value"]
        for j in range(64):
            z = r * complex(math.cos(2 * math.pi * j / 64), math.sin(2 * math.pi * j / 64))
            lines.append(f"{j},{(z ** 3 + 2).real!r}")
        paths.append(write(tmp_path, f"s{r}.csv", "\n".join(lines) + "\n"))
    code, out, _ = run(capsys, "recover", "--samples", paths[0], "--radius", "2",
                       "--samples", paths[1], "--radius", "5", "--kmax", "8")
    assert code == 0
    comp = json.loads(out)["results"]["components"][0]
    assert comp["degree"] == 3
    assert comp["coefficients"][0][0] == pytest.approx(2.0)


@pytest.mark.parametrize("argv,fragment", [
    (["levelset", "--poly", "0,1"], "degree >= 2"),
    (["levelset", "--poly", "0,0,1", "--delta", "2"], "delta"),
    (["levelset"], "exactly one"),
    (["recover", "--radius", "2"], "two --radius"),
    (["analyze", "missing.json"], "cannot read"),
])
def test_input_errors(capsys, argv, fragment):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert fragment in err


def test_spec_error_has_position(capsys, tmp_path):
    spec = write(tmp_path, "bad.json", '{\n  "polynomials": [[[1, NaN]]]\n}')
    code, _, err = run(capsys, "analyze", spec)
    assert code == 2 and f"{spec}:2:" in err


def test_recover_kmax_too_large(capsys, pair_spec):
    code, _, err = run(capsys, "recover", "--spec", pair_spec, "--blackbox", "--radius", "2",
                       "--radius", "5", "--n", "64", "--kmax", "100")
    assert code == 2 and "alias" in err


@pytest.mark.parametrize("argv", [["analyze"], ["nope"], ["verify", "--seed", "x"],
                                  ["--threads", "0", "verify"]])
def test_argparse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_verify_unknown_check(capsys):
    code, _, err = run(capsys, "verify", "--only", "C99")
    assert code == 2 and "C99" in err


def test_verify_subset_passes(capsys):
    code, out, _ = run(capsys, "verify", "--only", "C9,C5")
    assert code == 0
    assert "C9   PASS" in out and "all 2 checks passed" in out


def test_threads_env_overrides(monkeypatch):
    monkeypatch.setenv("TORUSLAB_THREADS", "3")
    assert thread_count(8) == 3
    monkeypatch.delenv("TORUSLAB_THREADS")
    assert thread_count(5) == 5


def test_threads_env_invalid(capsys, monkeypatch, pair_spec):
    monkeypatch.setenv("TORUSLAB_THREADS", "many")
    code, _, err = run(capsys, "characteristic", pair_spec, "--rmax", "10")
    assert code == 2 and "TORUSLAB_THREADS" in err


def test_threads_after_subcommand(capsys, pair_spec):
    code, _, _ = run(capsys, "characteristic", pair_spec, "--rmax", "10", "--threads", "2")
    assert code == 0


def test_console_script_version():
    out = subprocess.run([sys.executable, "-m", "toruslab.cli", "--version"], capture_output=True,
                         text=True, check=True, env=dict(os.environ))
    assert out.stdout.strip().startswith("toruslab ")


def test_numerical_failure_exit_3(capsys, monkeypatch, pair_spec):
    def boom(*args, **kwargs):
        raise NumericalError("synthetic overflow", stage="characteristic_jensen")

    monkeypatch.setattr(cli, "characteristic_profile", boom)
    code, _, err = run(capsys, "characteristic", pair_spec, "--rmax", "10")
    assert code == 3 and "stage characteristic_jensen" in err
