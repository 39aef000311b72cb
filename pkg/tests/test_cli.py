import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from meanbound import cli, half_bernoulli, lmt, methods
from meanbound import simharness as H


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def datafile(tmp_path):
    def make(values, name="d.txt"):
        f = tmp_path / name
        f.write_text("\n".join(str(v) for v in values) + "\n")
        return f
    return make


def _bound_json(argv, capsys):
    code, out, err = run(argv + ["--json"], capsys)
    assert code == 0, err
    return json.loads(out)


def test_bound_identity_rescale(datafile, capsys):
    x = [0.2, 0.5, 0.9, 0.4]
    got = _bound_json(["bound", datafile(x)], capsys)
    assert got["upper_bound"] == lmt.exact_upper_bound(x, 0.05).value
    assert got["method"] == "ours-exact"


def test_bound_text_output(datafile, capsys):
    code, out, _ = run(["bound", datafile([0.2, 0.5])], capsys)
    value = lmt.exact_upper_bound([0.2, 0.5], 0.05).value
    assert code == 0 and out.splitlines()[0] == f"upper_bound {value:.10g}"


def test_bound_affine_equivariance(datafile, capsys):
    ages = [3, 17, 25, 40, 41, 66, 84, 12]
    got = _bound_json(["bound", datafile(ages), "--lo", 0, "--hi", 84, "--method", "ours"], capsys)
    direct = lmt.exact_upper_bound(np.array(ages) / 84, 0.05).value
    assert got["upper_bound"] == pytest.approx(84 * direct, rel=1e-12)


@pytest.mark.parametrize("method", ["percentile-bootstrap", "bca", "student-t"])
def test_bound_constant_at_hi(datafile, capsys, method):
    got = _bound_json(["bound", datafile([7.5] * 6), "--lo", -2, "--hi", 7.5, "--method", method],
                      capsys)
    assert got["upper_bound"] == 7.5


def test_bound_global_flags_before_subcommand(datafile, capsys):
    f = datafile([0.1, 0.3, 0.35])
    a = _bound_json(["--alpha", 0.2, "--method", "anderson", "bound", f], capsys)
    b = _bound_json(["bound", f, "--alpha", 0.2, "--method", "anderson"], capsys)
    assert a == b and a["method"] == "anderson" and a["alpha"] == 0.2


def test_bound_seed_determines_output(datafile, capsys):
    f = datafile([0.1, 0.3, 0.35, 0.8])
    base = ["bound", f, "--method", "ours-mc", "--mc-samples", 2000]
    a = _bound_json(base + ["--seed", 3], capsys)
    b = _bound_json(base + ["--seed", 3], capsys)
    c = _bound_json(base + ["--seed", 4], capsys)
    assert a == b and a["upper_bound"] != c["upper_bound"]


def test_bound_csv_column(tmp_path, capsys):
    f = tmp_path / "d.csv"
    f.write_text("id,age\n1,30\n2,50\n3,20\n")
    by_name = _bound_json(["bound", f, "--column", "age", "--hi", 84], capsys)
    by_index = _bound_json(["bound", f, "--column", 1, "--hi", 84], capsys)
    assert by_name == by_index
    assert by_name["upper_bound"] == pytest.approx(
        84 * lmt.exact_upper_bound(np.array([30, 50, 20]) / 84, 0.05).value, rel=1e-12)


def test_bound_mc_warning(datafile, capsys):
    code, _, err = run(["bound", datafile([0.5, 0.6]), "--method", "ours-mc", "--alpha", 0.01,
                        "--mc-samples", 1000], capsys)
    assert code == 0 and "warning" in err


def test_config_file(tmp_path, datafile, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nalpha = 0.2\nmethod = hoeffding\n")
    f = datafile([0.4, 0.6])
    got = _bound_json(["bound", f, "--config", cfg], capsys)
    assert got["method"] == "hoeffding" and got["alpha"] == 0.2
    got = _bound_json(["bound", f, "--config", cfg, "--alpha", 0.1], capsys)
    assert got["alpha"] == 0.1
    cfg.write_text("colour = blue\n")
    code, _, err = run(["bound", f, "--config", cfg], capsys)
    assert code == 1 and "unknown key" in err


@pytest.mark.parametrize("content,extra,code", [
    ("0.5\n1.5\n", [], 1),                       # outside [lo, hi]
    ("0.5\nnan\n", [], 1),                       # NaN is never dropped
    ("0.5\nabc\n", [], 1),
    ("0.5\n0.7\n", ["--method", "anderson", "--alpha", 0.7], 1),
    ("0.5\n0.7\n", ["--method", "nope"], 2),
    ("0.5\n0.7\n", ["--lo", 1, "--hi", 0], 1),
    ("", [], 1),
])
def test_bound_errors(tmp_path, capsys, content, extra, code):
    f = tmp_path / "bad.txt"
    f.write_text(content)
    rc, out, err = run(["bound", f] + extra, capsys)
    assert rc == code and out == ""
    assert len(err.strip().splitlines()) == 1 and err.startswith("meanbound: error: ")


def test_missing_file_and_subcommand(capsys):
    rc, _, err = run(["bound", "/no/such/file"], capsys)
    assert rc == 1 and err.count("\n") == 1
    rc, _, err = run([], capsys)
    assert rc == 2 and err.count("\n") == 1


def test_coverage_defaults_pass_exact_check(tmp_path, capsys):
    out = tmp_path / "cov.csv"
    rc, _, _ = run(["coverage", "--dist", "bernoulli:0.5", "--n", 4, "--out", out], capsys)
    assert rc == 0
    rows = [r for r in H.read_results(out) if r.method == "ours"]
    assert rows and all(r.trials == 10_000 for r in rows)
    for r in rows:
        c = half_bernoulli.exact_bernoulli_coverage(0.5, 4, r.alpha)
        assert abs(r.value - c) <= 3 * math.sqrt(c * (1 - c) / r.trials) + 1e-12
    meta = json.loads((tmp_path / "cov.csv.meta.json").read_text())
    assert "choice" in meta["default_grids_note"] and meta["used_default_grids"] is True


def test_coverage_single_trial(capsys):
    rc, out, _ = run(["coverage", "--dist", "uniform", "--n", 5, "--trials", 1, "--methods",
                      "ours,hoeffding", "--json"], capsys)
    assert rc == 0
    assert {r["value"] for r in json.loads(out)} <= {0.0, 1.0}


def test_coverage_deterministic_files(tmp_path, capsys):
    args = ["coverage", "--dist", "beta:2,3", "--n", 6, "--trials", 200,
            "--methods", "ours,ours-mc,bca", "--mc-samples", 500, "--seed", 11]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", a], capsys)[0] == 0
    assert run(args + ["--out", b], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_tightness_uniform_ordering(tmp_path, capsys):
    out = tmp_path / "t.json"
    rc, _, _ = run(["tightness", "--dist", "uniform", "--n", "10,100,1000", "--trials", 100,
                    "--methods", "ours,anderson,hoeffding", "--out", out, "--format", "json"],
                   capsys)
    assert rc == 0
    rows = {(r.n, r.method): r.value for r in H.read_results(out) if r.metric == "mean_upper_bound"}
    for n in (10, 100, 1000):
        assert rows[(n, "ours")] < rows[(n, "anderson")] < rows[(n, "hoeffding")]


def test_tightness_single_method(tmp_path, capsys):
    out = tmp_path / "t.csv"
    rc, _, _ = run(["tightness", "--dist", "uniform", "--n", 5, "--trials", 20, "--methods", "ours",
                    "--out", out], capsys)
    assert rc == 0 and {r.method for r in H.read_results(out)} == {"ours"}


def test_tightness_age_like_ordering(capsys):
    rc, out, _ = run(["tightness", "--dist", "age-like", "--n", "5,10,20,30", "--json",
                      "--methods", "ours,hoeffding,maurer-pontil,anderson,student-t"], capsys)
    assert rc == 0
    rows = {(r["n"], r["method"]): r["value"] for r in json.loads(out)
            if r["metric"] == "mean_upper_bound"}
    for n in (5, 10, 20, 30):
        ours = rows[(n, "ours")]
        nearest_guaranteed = min(rows[(n, m)] for m in ("hoeffding", "maurer-pontil", "anderson"))
        assert ours < nearest_guaranteed
        # closer to Student-t than to any guaranteed baseline
        assert abs(ours - rows[(n, "student-t")]) < nearest_guaranteed - ours


@pytest.mark.parametrize("n,alpha", [(1, 0.05), (6, 0.05), (15, 0.25)])
def test_worstcase_saturation(capsys, n, alpha):
    rc, out, _ = run(["worstcase", "--n", n, "--alpha", alpha, "--json"], capsys)
    rows = json.loads(out)
    assert rc == 0 and len(rows) == n
    assert all(abs(r["failure_probability"] - alpha) <= 1e-8 for r in rows)


def test_worstcase_single_draw(capsys):
    rc, out, _ = run(["worstcase", "--n", 1, "--alpha", 0.05], capsys)
    lines = out.splitlines()
    assert rc == 0 and len(lines) == 2
    assert float(lines[1].split("\t")[2]) == pytest.approx(0.05, abs=1e-10)


def test_worstcase_table_matches_library(capsys):
    rc, out, _ = run(["worstcase", "--n", 4, "--alpha", 0.5, "--json", "--k", 0.2], capsys)
    rows = json.loads(out)
    lib = half_bernoulli.worst_case_table(4, 0.5, 0.2)
    assert [{k: v for k, v in r.items() if k != "n"} for r in rows] == lib


def test_worstcase_mu_and_sweep(capsys):
    rc, out, _ = run(["worstcase", "--n", 8, "--mu", 0.7, "--k", 0.1, "--json"], capsys)
    got = json.loads(out)
    spec = half_bernoulli.HalfBernoulliSpec(0.1, 0.7)
    assert got["j_min"] == half_bernoulli.j_min(spec, 8, 0.05)
    assert got["failure_probability"] == half_bernoulli.failure_probability(spec, 8, 0.05)
    rc, out, _ = run(["worstcase", "--n", 3, "--sweep", "--json"], capsys)
    assert [(r["n"], r["j"]) for r in json.loads(out)] == [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]
    for bad in (["worstcase"], ["worstcase", "--n", 0], ["worstcase", "--n", 3, "--alpha", 1.0]):
        assert run(bad, capsys)[0] == 1


@given(st.floats(-1e6, 1e6), st.floats(1e-3, 1e6), st.floats(0.0, 1.0))
def test_rescale_round_trip(lo, width, frac):
    rs = cli.RescaleSpec(lo, lo + width)
    x = lo + frac * width
    x = min(max(x, rs.lo), rs.hi)
    back = rs.from_unit(rs.to_unit([x]))[0]
    assert abs(back - x) <= 1e-12 * max(1.0, abs(rs.lo), abs(rs.hi))


def test_rescale_endpoints_exact():
    rs = cli.RescaleSpec(0.1, 0.3)
    assert rs.from_unit(1.0) == 0.3 and rs.from_unit(0.0) == 0.1


def test_console_script_and_module(datafile):
    f = datafile([0.2, 0.6])
    out = subprocess.run([sys.executable, "-m", "meanbound", "bound", str(f), "--json"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["upper_bound"] == lmt.exact_upper_bound([0.2, 0.6], 0.05).value
    bad = subprocess.run([sys.executable, "-m", "meanbound", "bound", str(f), "--alpha", "2"],
                         capture_output=True, text=True)
    assert bad.returncode != 0 and bad.stderr.count("\n") == 1


def test_methods_listed_in_help(capsys):
    with pytest.raises(SystemExit):
        cli.main(["bound", "--help"])
    out = capsys.readouterr().out
    assert all(m in out for m in methods.ALL_METHODS)
