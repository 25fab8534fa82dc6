"""Command-line contract: examples, precedence, exit codes, byte stability."""

import json
import os
import subprocess
import sys

import pytest

from thetagw import cli
from thetagw.errors import NumericError


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "thetagw.cli", *args],
        capture_output=True,
        text=True,
        env=env,
        timeout=120,
    )


def test_classify_example():
    r = run_cli("classify", "--theta", "1", "--a", "2", "--c", "1")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["case"]["case_id"] == "case1"
    assert doc["params"]["q"] == 1.0
    assert doc["summary"]["d"] == 1.0
    assert doc["summary"]["m"] == 0.5
    # wall time goes to stderr so stdout stays byte-stable
    assert "wall_time" not in r.stdout
    assert "wall_time_s=" in r.stderr


def test_iterate_example():
    r = run_cli("iterate", "--theta", "1", "--a", "1", "--c", "1",
                "--n", "3", "--s", "0")
    assert r.returncode == 0
    assert json.loads(r.stdout)["value"] == 0.75
    r2 = run_cli("iterate", "--theta", "1", "--a", "1", "--c", "1",
                 "--n", "3", "--s", "0", "--format", "text")
    assert r2.stdout == "0.75\n"


def test_verify_example():
    r = run_cli("verify", "--theta", "-0.5", "--a", "0.5", "--q", "0", "--A", "1")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["passed"] is True
    assert all(c["passed"] for c in doc["checks"])


def test_classify_round_trips():
    from thetagw import serialize, validate_classify

    r = run_cli("classify", "--theta", "0", "--a", "0.5", "--q", "0.25")
    doc = json.loads(r.stdout)
    p, tag = validate_classify(doc["params"])
    assert serialize(p) == doc["params"]
    assert tag.case_id == doc["case"]["case_id"]


def test_stdout_byte_identical_across_runs_and_workers():
    args = ("simulate", "--theta", "-1", "--a", "0.5", "--q", "0.3",
            "--replicates", "3000", "--seed", "11", "--n-max", "20",
            "--format", "csv")
    first = run_cli(*args, "--workers", "1")
    again = run_cli(*args, "--workers", "1")
    four = run_cli(*args, "--workers", "4")
    assert first.returncode == 0
    assert first.stdout == again.stdout
    assert first.stdout == four.stdout
    head, *rows = first.stdout.strip().split("\n")
    assert head == "n,emp_t0_tail,emp_t1_tail,emp_t_tail,se"
    # trailing summary line is a JSON object with the ks record
    summary = json.loads(rows[-1])
    assert set(summary) == {"ks", "censored_fraction", "seed"}
    assert summary["seed"] == 11


def test_csv_headers():
    r = run_cli("pmf", "--theta", "1", "--a", "0.5", "--q", "0.5",
                "--k-max", "3", "--format", "csv")
    assert r.stdout.splitlines()[0] == "k,p_k"
    r = run_cli("absorb", "--theta", "-1", "--a", "0.5", "--q", "0.3",
                "--n", "2", "--format", "csv")
    assert r.stdout.splitlines()[0] == "n,t0_tail,t1_tail,t_tail"
    r = run_cli("gumbel", "--a", "0.5", "--q", "0", "--r", "1", "--format", "csv")
    lines = r.stdout.splitlines()
    assert lines[0] == "y,exact,limit"
    assert lines[1].split(",")[1] == "nan"


def test_out_file(tmp_path):
    dest = tmp_path / "out.json"
    r = run_cli("classify", "--theta", "1", "--a", "2", "--c", "1",
                "--out", str(dest))
    assert r.returncode == 0 and r.stdout == ""
    assert json.loads(dest.read_text())["case"]["case_id"] == "case1"


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta": 1.0, "a": 1.0, "c": 1.0, "s": 0.5, "n": 3}))
    base = run_cli("iterate", "--config", str(cfg))
    assert json.loads(base.stdout)["s"] == 0.5
    override = run_cli("iterate", "--config", str(cfg), "--s", "0")
    doc = json.loads(override.stdout)
    assert doc["s"] == 0.0 and doc["value"] == 0.75


def test_env_seed_default():
    r = run_cli("simulate", "--theta", "-1", "--a", "0.5", "--q", "0.3",
                "--replicates", "200", "--n-max", "5",
                env_extra={"THETA_GW_SEED": "123"})
    assert json.loads(r.stdout)["seed"] == 123
    # explicit flag wins over the environment
    r2 = run_cli("simulate", "--theta", "-1", "--a", "0.5", "--q", "0.3",
                 "--replicates", "200", "--n-max", "5", "--seed", "9",
                 env_extra={"THETA_GW_SEED": "123"})
    assert json.loads(r2.stdout)["seed"] == 9


def test_usage_exit_codes():
    assert run_cli("nonsense").returncode == 2
    assert run_cli("classify", "--theta", "one").returncode == 2
    # csv is only defined for tabular subcommands
    assert run_cli("classify", "--theta", "1", "--a", "2", "--c", "1",
                   "--format", "csv").returncode == 2


def test_domain_exit_codes():
    assert run_cli("classify", "--theta", "3", "--a", "1", "--c", "1").returncode == 3
    assert run_cli("classify").returncode == 3
    assert run_cli("iterate", "--theta", "1", "--a", "2", "--c", "1",
                   "--s", "1.5").returncode == 3
    # unreadable config counts as a parameter problem, not a crash
    assert run_cli("classify", "--config", "/does/not/exist.json").returncode == 3


def test_numeric_exit_code(monkeypatch):
    def boom(opts):
        raise NumericError("forced")

    monkeypatch.setitem(cli._HANDLERS, "classify", boom)
    rc = cli.main(["classify", "--theta", "1", "--a", "2", "--c", "1"])
    assert rc == 4


def test_check_failure_exit_code(monkeypatch):
    def failing(opts):
        checks = [{"name": "x", "target": "y", "value": 1.0, "tol": 0.1,
                   "passed": False}]
        return {"checks": checks, "passed": False}, None, "FAIL\n", checks

    monkeypatch.setitem(cli._HANDLERS, "verify", failing)
    rc = cli.main(["verify"])
    assert rc == 5


def test_embed_reports_checks():
    r = run_cli("embed", "--theta", "-1", "--a", "0.5", "--q", "0.3")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["lambda"] == pytest.approx(0.6931471805599453)
    assert doc["checks"]["embed_sup_err"] < 1e-10
    assert doc["checks"]["semigroup_sup_err"] < 1e-10
    assert max(doc["checks"]["quad_residuals"]) < 1e-6


def test_qprocess_nulls():
    doc = json.loads(run_cli("qprocess", "--theta", "1", "--a", "1",
                             "--c", "1").stdout)
    assert doc["b"] is None and doc["stationary"] is None
    assert doc["w"] is not None
    doc2 = json.loads(run_cli("qprocess", "--theta", "1", "--a", "0.5",
                              "--q", "0.5").stdout)
    assert doc2["w"] is None
    assert doc2["b"][0] == pytest.approx(0.5)


def test_gumbel_lattice_rows():
    r = run_cli("gumbel", "--theta", "-0.01", "--a", "0.5", "--q", "0",
                "--format", "csv")
    rows = [line.split(",") for line in r.stdout.splitlines()[1:]]
    # lattice spacing is exactly 1 in y
    ys = [float(a) for a, _, _ in rows]
    assert all(abs((b - a) - 1.0) < 1e-12 for a, b in zip(ys, ys[1:]))
    devs = [abs(float(ex) - float(lim)) for _, ex, lim in rows]
    assert max(devs) < 0.01


def test_float_formatting_is_17g():
    r = run_cli("iterate", "--theta", "1", "--a", "2", "--c", "1",
                "--n", "2", "--s", "0.5", "--format", "text")
    assert r.stdout == f"{10.0 / 11.0:.17g}\n"
