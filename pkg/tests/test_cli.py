from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from perversity import cli, gamefile
from perversity.cli import CSV_HEADER, SweepConfig, UsageError, main
from perversity.worstcase import lemma3_instance, pigou_instance


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_degree_reproduces_curves(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    code, stdout, _ = run(["sweep", "--degree", "1..4", "--grid-step", "0.05", "--out", str(out)], capsys)
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(CSV_HEADER)
    assert len(rows) == 4 * 21
    for row in rows:
        p, r = int(row["param"]), float(row["r_s"])
        assert float(row["pi_empirical"]) == pytest.approx(1 + p * min(r, 1 - r), abs=1e-6)
    peaks = [float(r["pi_empirical"]) for r in rows if r["r_s"] == "0.5"]
    assert peaks == pytest.approx([1.5, 2.0, 2.5, 3.0], abs=1e-6)
    assert "p=4: peak PI 3.000000 at r_s=0.5" in stdout


def test_sweep_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["sweep", "--gamma", "1.5,3", "--grid-step", "0.1", "--out", str(path)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_gamma_examples(capsys):
    code, stdout, _ = run(["sweep", "--gamma", "1,3", "--grid-step", "0.25"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(stdout)))
    for row in rows:
        if row["param"] == "1":
            assert float(row["pi_empirical"]) == pytest.approx(1.0)
            assert float(row["pi_theoretical"]) == 1.0
    row = next(r for r in rows if r["param"] == "3" and r["r_s"] == "0.25")
    assert float(row["pi_theoretical"]) == 1.5
    assert row["poa_selfish_formula"] == ""


def test_sweep_numbers_use_twelve_significant_digits(capsys):
    _, stdout, _ = run(["sweep", "--degree", "2", "--grid-step", "0.5"], capsys)
    row = list(csv.DictReader(io.StringIO(stdout)))[0]
    assert row["poa_selfish_formula"] == f"{1.625752384583:.12g}"


def test_sweep_tolerance_breach_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(cli, "pi_theoretical", lambda g, r: 0.0)
    code, _, _ = run(["sweep", "--gamma", "2", "--grid-step", "0.5"], capsys)
    assert code == 1


def test_sweep_io_error(tmp_path, capsys):
    code, _, err = run(["sweep", "--gamma", "2", "--out", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == 2 and "cannot write" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--gamma", "0.5"],
        ["sweep", "--gamma", "2", "--grid-step", "0"],
        ["sweep", "--gamma", "2", "--tol", "-1"],
        ["bounds", "--gamma", "0.5"],
        ["bounds", "--degree", "0"],
    ],
)
def test_domain_errors_exit_two(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_sweep_config_validation():
    with pytest.raises(UsageError):
        SweepConfig("by_other", (1.0,))
    with pytest.raises(UsageError):
        SweepConfig("by_degree", (1.5,))
    assert SweepConfig("by_gamma", (2.0,), step=0.25).grid() == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_solve_pigou(tmp_path, capsys):
    path = tmp_path / "pigou.json"
    gamefile.dump(pigou_instance(1), path)
    code, stdout, _ = run(["solve", str(path)], capsys)
    assert code == 0
    assert "optimum: L* = 0.75" in stdout
    assert "PI = 1  PoA = 1.333333333" in stdout


def test_solve_lemma3_with_csv(tmp_path, capsys):
    path = tmp_path / "l3.json"
    gamefile.dump(lemma3_instance(2.0, 0.5), path)
    out = tmp_path / "report.csv"
    code, stdout, _ = run(["solve", str(path), "--format", "csv", "--out", str(out)], capsys)
    assert code == 0
    assert "PI = 1.5 " in stdout
    rows = read_csv(out)
    assert max(float(r["total_latency"]) for r in rows if r["kind"] == "nash") == pytest.approx(1.5)


def test_solve_single_edge(tmp_path, capsys):
    path = tmp_path / "one.json"
    path.write_text(json.dumps({
        "network": {"type": "edge", "latency": [{"coef": 1, "exp": 0}, {"coef": 1, "exp": 2}]},
        "selfish_paths": [0], "altruistic_paths": [0], "r_s": 0.5,
    }))
    code, stdout, _ = run(["solve", str(path)], capsys)
    assert code == 0
    assert "PI = 1  PoA = 1" in stdout


def test_solve_rs_override(tmp_path, capsys):
    path = tmp_path / "pigou.json"
    gamefile.dump(pigou_instance(1), path)
    code, stdout, _ = run(["solve", str(path), "--rs", "0"], capsys)
    assert code == 0
    assert "worst L = 0.75" in stdout


def test_solve_parse_and_io_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"network": {"type": "edge",\n "latency": [}}')
    code, _, err = run(["solve", str(bad)], capsys)
    assert code == 2 and "line 2" in err
    infeasible = tmp_path / "inf.json"
    infeasible.write_text(json.dumps({
        "network": {"type": "edge", "latency": [{"coef": 1, "exp": 1}]},
        "selfish_paths": [], "altruistic_paths": [0], "r_s": 0.5,
    }))
    code, _, err = run(["solve", str(infeasible)], capsys)
    assert code == 2 and "no paths" in err
    assert run(["solve", str(tmp_path / "nope.json")], capsys)[0] == 2


def test_solve_solver_failure_exit_three(tmp_path, monkeypatch, capsys):
    path = tmp_path / "pigou.json"
    gamefile.dump(pigou_instance(1, r_s=0.5), path)
    monkeypatch.setattr(cli, "solve_heterogeneous", lambda game, tol: [])
    assert run(["solve", str(path)], capsys)[0] == 3


def test_bounds_degree_one(capsys):
    code, stdout, _ = run(["bounds", "--degree", "1"], capsys)
    assert code == 0
    assert "1.333333" in stdout and "0.333333" in stdout and "1.500000" in stdout
    assert "(0.333333, 0.666667)" in stdout


def test_bounds_degree_two_r_star(capsys):
    _, stdout, _ = run(["bounds", "--degree", "2", "--rs", "0.4"], capsys)
    assert f"{1 / (3**1.5 - 2):.6f}" in stdout
    assert "PI(r_s=0.4)" in stdout and "1.800000" in stdout


def test_bounds_gamma_one_all_ones(capsys):
    _, stdout, _ = run(["bounds", "--gamma", "1", "--rs", "0.3"], capsys)
    values = [line.split()[-1] for line in stdout.splitlines()]
    assert values == ["1", "1.000000", "1.000000"]


def test_verify_small_run(tmp_path, capsys):
    code, stdout, _ = run(
        ["verify", "--gamma", "2", "--grid-step", "0.5", "--count", "4", "--seed", "1", "--out", str(tmp_path)],
        capsys,
    )
    assert "tightness: 3/3 within 1e-06" in stdout
    assert "seed=1" in stdout
    assert code == (0 if "FAIL" not in stdout else 1)


def test_verify_writes_counterexamples(tmp_path, capsys):
    # seed 42 instance 5 breaks the selfish-cost comparison (restricted path sets)
    code, stdout, _ = run(
        ["verify", "--gamma", "2", "--grid-step", "0.5", "--count", "6", "--out", str(tmp_path)], capsys
    )
    assert code == 1
    assert "FAIL selfish_cost" in stdout
    game = gamefile.load(tmp_path / "counterexample_42_5.json")
    assert game.selfish_paths != game.altruistic_paths


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "perversity", "bounds", "--degree", "1"], capture_output=True, text=True
    )
    assert res.returncode == 0 and "r*" in res.stdout
    res = subprocess.run([sys.executable, "-m", "perversity"], capture_output=True, text=True)
    assert res.returncode == 2
