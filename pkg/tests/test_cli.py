import json
import subprocess
import sys
import time

import numpy as np
import pytest

from sparse_detect.cli import build_parser, main, parse_grid
from sparse_detect.designs import make_weakly_correlated, save_design


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- boundary -------------------------------------------------------------


def test_boundary_linear_grid(capsys):
    code, out, _ = run(capsys, "boundary", "--family", "linear", "--alpha-grid", "0.6:1.0:0.05")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "alpha,family,value"
    assert len(lines) == 10
    assert lines[1] == "0.6,linear,0.1"
    assert lines[-1].startswith("1.0,linear,1.0")


def test_boundary_binary_logistic(capsys):
    code, out, _ = run(capsys, "boundary", "--family", "binary", "--link", "logistic",
                       "--alpha-grid", "0.75")
    assert code == 0 and out.strip().splitlines()[1] == "0.75,binary,1.0"


def test_boundary_domain_error(capsys):
    code, _, err = run(capsys, "boundary", "--family", "binomial", "--alpha-grid", "0.5")
    assert code == 2 and "alpha" in err


def test_boundary_to_file(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, stdout, _ = run(capsys, "boundary", "--family", "max-binary", "--alpha-grid",
                          "0.6,0.8", "--out", str(out))
    assert code == 0 and stdout == ""
    assert len(out.read_text().splitlines()) == 3


@pytest.mark.parametrize("text, want", [
    ("0.6:1.0:0.05", 9),
    ("0:6:1", 7),
    ("1,2,5", 3),
    ([0.1, 0.2], 2),
])
def test_parse_grid(text, want):
    assert len(parse_grid(text)) == want


# -- simulate -------------------------------------------------------------


def test_simulate_smoke_run(capsys, tmp_path):
    out = tmp_path / "risk.csv"
    start = time.perf_counter()
    code, _, err = run(capsys, "simulate", "--p", "100", "--r", "10", "--k", "5", "--trials",
                       "50", "--t-grid", "0,2", "--out", str(out))
    assert code == 0, err
    assert time.perf_counter() - start < 10
    rows = out.read_text().splitlines()
    assert rows[0] == "test,t,A,risk,stderr,n_trials,seed"
    assert len(rows) == 1 + 3 * 2
    assert json.loads(out.with_suffix(".json").read_text())["spec"]["n_trials"] == 50


def test_simulate_missing_k(capsys):
    code, _, err = run(capsys, "simulate", "--p", "100", "--r", "10")
    assert code == 2 and "--k" in err


def test_simulate_alpha_gives_k(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "simulate", "--p", "100", "--r", "4", "--alpha", "0.7",
                     "--trials", "5", "--t-grid", "1", "--out", str(out))
    assert code == 0
    assert json.loads(out.with_suffix(".json").read_text())["spec"]["k"] == round(100 ** 0.3)


def test_simulate_partial_availability_warns(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--p", "30", "--r", "1", "--k", "2", "--trials", "5",
                       "--t-grid", "1", "--out", str(tmp_path / "x.csv"))
    assert code == 0 and "warning" in err and "HC" in err


def test_simulate_config_file_and_override(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 60, "r": 6, "k": 3, "trials": 7, "t-grid": "0,1",
                               "tests": "GLRT,Max"}))
    out = tmp_path / "c.csv"
    monkeypatch.setenv("SPARSE_DETECT_SEED", "41")
    code, _, _ = run(capsys, "simulate", "--config", str(cfg), "--trials", "9", "--out", str(out))
    assert code == 0
    spec = json.loads(out.with_suffix(".json").read_text())["spec"]
    assert spec["n_trials"] == 9 and spec["k"] == 3 and spec["base_seed"] == 41
    assert spec["tests"] == ["GLRT", "Max"]


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 60, "colour": "blue"}))
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_simulate_is_deterministic(capsys, tmp_path):
    paths = []
    for name in ("a.csv", "b.csv"):
        paths.append(tmp_path / name)
        assert run(capsys, "simulate", "--p", "50", "--r", "6", "--k", "3", "--trials", "20",
                   "--seed", "5", "--t-grid", "0,3", "--out", str(paths[-1]))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_simulate_from_design_file(capsys, tmp_path):
    design = tmp_path / "d.txt"
    save_design(make_weakly_correlated(30, 3, 5, 4, 2, np.random.default_rng(0)), design,
                "sparse-triplet")
    out = tmp_path / "f.csv"
    code, _, err = run(capsys, "simulate", "--design", str(design), "--format", "sparse-triplet",
                       "--k", "2", "--trials", "5", "--t-grid", "1", "--out", str(out))
    assert code == 0, err
    assert len(out.read_text().splitlines()) == 4


# -- audit ----------------------------------------------------------------


def test_audit_identity(capsys, tmp_path):
    path = tmp_path / "eye.csv"
    path.write_text("1,0,0\n0,1,0\n0,0,1\n")
    code, out, _ = run(capsys, "audit", "--design", str(path))
    assert code == 0
    rep = json.loads(out)
    assert rep["q"] == 1 and rep["n_sub_star"] == 0


def test_audit_table_one(capsys, tmp_path):
    path = tmp_path / "t1.txt"
    save_design(make_weakly_correlated(93, 148, 148, 25, 2, np.random.default_rng(3)), path,
                "sparse-triplet")
    code, out, _ = run(capsys, "audit", "--design", str(path), "--format", "sparse-triplet")
    rep = json.loads(out)
    assert code == 0
    assert [round(rep[k], 2) for k in ("c3_ratio_p_quarter", "c3_ratio_sqrt_p", "c3_ratio_log_p")] \
        == [0.22, 0.07, 0.15]


def test_audit_non_binary(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,0\n0,3\n")
    code, _, err = run(capsys, "audit", "--design", str(path))
    assert code == 2 and ":2:" in err


def test_audit_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "audit", "--design", str(tmp_path / "nope.csv"))
    assert code == 2


# -- nondetect --------------------------------------------------------------


def test_nondetect_anova(capsys):
    code, out, _ = run(capsys, "nondetect", "--design", "anova", "--p", "30", "--r", "3",
                       "--k", "2", "--sigma", "0", "--pairs", "500", "--seed", "1")
    assert code == 0 and json.loads(out)["delta_hat"] == 3


def test_nondetect_anova_exhaustive(capsys):
    code, out, _ = run(capsys, "nondetect", "--design", "anova", "--p", "12", "--r", "3",
                       "--k", "2", "--exhaustive")
    est = json.loads(out)
    assert code == 0 and est["delta_hat"] == 3 and est["exhaustive"]


def test_nondetect_banded_verdict(capsys):
    code, out, _ = run(capsys, "nondetect", "--design", "banded", "--p", "10000", "--l1", "0",
                       "--l2", "2", "--k", "2", "--seed", "2")
    assert code == 0 and json.loads(out)["verdict"] is True


def test_nondetect_k_above_p(capsys):
    code, _, err = run(capsys, "nondetect", "--design", "anova", "--p", "5", "--r", "2",
                       "--k", "6")
    assert code == 2 and "exceeds" in err


# -- oracle -----------------------------------------------------------------


def test_oracle_identity(capsys):
    code, out, err = run(capsys, "oracle", "--p", "6", "--k", "2", "--r", "1", "--two-sided",
                         "--mc", "200")
    res = json.loads(out)
    assert code == 0
    assert res["r1_identity"]["verified"] and "verified" in err
    assert res["E0_L2_exact"] == pytest.approx(1.0)


def test_oracle_second_moment(capsys):
    code, out, _ = run(capsys, "oracle", "--p", "6", "--k", "2", "--r", "2", "--A", "0.3",
                       "--link", "uniform", "--mc", "20000", "--seed", "3")
    res = json.loads(out)
    assert code == 0 and res["r1_identity"] is None
    assert abs(res["mc_delta"]) < 4 * res["E0_L2_mc_stderr"]


def test_oracle_oversize(capsys):
    code, _, err = run(capsys, "oracle", "--p", "200", "--k", "5")
    assert code == 2 and "budget" in err


def test_oracle_conflicting_sides(capsys):
    assert run(capsys, "oracle", "--p", "4", "--k", "1", "--one-sided", "--two-sided")[0] == 2


# -- plumbing ---------------------------------------------------------------


def test_help_lists_every_flag(capsys):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    from sparse_detect.cli import _TABLES
    for name, table in _TABLES.items():
        text = sub[name].format_help()
        for flag, _, _ in table:
            assert f"--{flag}" in text


def test_unknown_subcommand(capsys):
    assert run(capsys, "plot")[0] == 2


def test_help_exit_zero(capsys):
    assert run(capsys, "boundary", "--help")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sparse_detect", "boundary", "--family",
                           "linear", "--alpha-grid", "0.8"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.8,linear" in proc.stdout


def test_internal_error_exit_code(capsys, monkeypatch):
    import sparse_detect.cli as cli

    def boom(opts):
        raise RuntimeError("unexpected")

    monkeypatch.setitem(cli._COMMANDS, "boundary", boom)
    code, _, err = run(capsys, "boundary", "--family", "linear", "--alpha-grid", "0.8")
    assert code == 1 and "RuntimeError" in err
