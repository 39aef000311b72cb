"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (printed immediately and repeated in the
terminal summary) before asserting.  Runtime limits are measured after a
warm-up call so one-off JIT compilation is not counted.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import record_acceptance
from meanbound import baselines as bl
from meanbound import half_bernoulli as hb
from meanbound import lmt, rng
from meanbound import simharness as H
from meanbound.core import induced_mean, induced_mean_horizontal
from meanbound.special import BetaParams, beta_cdf, beta_inv_cdf

ALPHAS_1 = (0.01, 0.05, 0.1, 0.25, 0.5)


def test_01_half_bernoulli_saturation():
    hb.worst_case_failure(1, 1, 0.05)  # warm-up
    hb._order_stat_quantile.cache_clear()
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 21):
        for alpha in ALPHAS_1:
            for j in range(1, n + 1):
                pk = hb.worst_case_pk(j, n, alpha)
                spec = hb.HalfBernoulliSpec.from_pk(0.0, pk)
                fp = hb.failure_probability(spec, n, alpha, jmin=j)
                worst = max(worst, abs(fp - alpha))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 1.0
    record_acceptance(1, "half-Bernoulli worst case saturates at alpha", ok,
                      f"max |fp - alpha| = {worst:.2e}, {elapsed:.2f} s")
    assert worst <= 1e-8
    assert elapsed < 1.0


def test_02_bernoulli_coverage():
    hb.exact_bernoulli_coverage(0.5, 3, 0.05)
    t0 = time.perf_counter()
    slack = math.inf
    where = None
    for alpha in (0.01, 0.05, 0.1, 0.5):
        for n in range(1, 31):
            for p in np.arange(1, 100) / 100:
                c = hb.exact_bernoulli_coverage(float(p), n, alpha)
                if c - (1 - alpha) < slack:
                    slack, where = c - (1 - alpha), (float(p), n, alpha)
    elapsed = time.perf_counter() - t0
    ok = slack >= -1e-8 and elapsed < 5.0
    record_acceptance(2, "exact Bernoulli coverage >= 1 - alpha", ok,
                      f"min slack {slack:.2e} at (p, n, alpha) = {where}, {elapsed:.2f} s")
    assert slack >= -1e-8
    assert elapsed < 5.0


def test_03_all_zero_sample():
    v = lmt.exact_upper_bound([0.0, 0.0, 0.0, 0.0], 0.05).value
    want = 1 - 0.05 ** 0.25
    ok = abs(v - want) <= 1e-8 and v > 0.5
    record_acceptance(3, "bound of [0,0,0,0] is 1 - 0.05^(1/4) > 0.5", ok,
                      f"{v:.12f} vs {want:.12f}")
    assert abs(v - want) <= 1e-8
    assert v > 0.5


def _random_samples(g, count, n):
    kinds = g.integers(0, 4, size=count)
    out = np.empty((count, n))
    params = [(1.0, 1.0), (0.5, 0.5), (1.0, 5.0), (5.0, 1.0)]
    for k, (a, b) in enumerate(params):
        m = kinds == k
        out[m] = g.beta(a, b, size=(int(m.sum()), n))
    return np.sort(out, axis=1)


def test_04_dominance():
    alphas = (0.01, 0.05, 0.25, 0.5)
    g = np.random.default_rng(4)
    lmt.exact_upper_bounds(np.array([[0.5]]), [0.05])
    t0 = time.perf_counter()
    worst_excess = -math.inf
    min_gap = math.inf
    for n in (1, 2, 5, 10, 30, 100):
        z = _random_samples(g, 1000, n)
        ours = lmt.exact_upper_bounds(z, alphas)
        for r in range(z.shape[0]):
            for k, a in enumerate(alphas):
                anderson = bl.anderson_upper(z[r], a)
                hoeff = bl.hoeffding_upper(z[r], a)
                worst_excess = max(worst_excess, ours[r, k] - anderson)
                min_gap = min(min_gap, hoeff - anderson)
    elapsed = time.perf_counter() - t0
    ok = worst_excess <= 1e-9 and min_gap > 0 and elapsed < 30
    record_acceptance(4, "ours <= Anderson + 1e-9 and Anderson < Hoeffding", ok,
                      f"max(ours - Anderson) = {worst_excess:.2e}, "
                      f"min(Hoeffding - Anderson) = {min_gap:.2e}, {elapsed:.1f} s")
    assert worst_excess <= 1e-9
    assert min_gap > 0
    assert elapsed < 30


def _fidelity_cases():
    g = np.random.default_rng(5)
    cases = []
    for _ in range(20):
        z1 = float(g.uniform(0, 0.95))
        a = float(g.choice([0.01, 0.05, 0.1, 0.25, 0.5]))
        cases.append((np.array([z1]), a, 1 - a * (1 - z1)))
    for _ in range(30):
        n = int(g.integers(2, 11))
        j = int(g.integers(1, n + 1))
        k = float(g.uniform(0, 0.9))
        a = float(g.choice([0.01, 0.05, 0.1, 0.25, 0.5]))
        s = hb.StepSample(j, n, k)
        cases.append((s.values(), a, hb.step_sample_bound(s, a)))
    return cases


def test_05_algorithm_fidelity():
    lmt.mc_upper_bound([0.5], 0.05, lmt.McConfig(10))
    t0 = time.perf_counter()
    ratios = []
    for i, (z, a, closed) in enumerate(_fidelity_cases()):
        r = lmt.mc_upper_bound(z, a, lmt.McConfig(10**6, seed=i))
        ratios.append(abs(r.value - closed) / r.diagnostics["mc_std_error"])
    elapsed = time.perf_counter() - t0
    worst = max(ratios)
    ok = worst <= 3 and elapsed < 60
    record_acceptance(5, "Monte Carlo bound matches closed forms within 3 SE (50 cases)", ok,
                      f"worst {worst:.2f} SE, {sum(x > 3 for x in ratios)} cases over, "
                      f"{elapsed:.1f} s")
    assert worst <= 3
    assert elapsed < 60


def test_06_mc_exact_agreement():
    g = np.random.default_rng(6)
    t0 = time.perf_counter()
    ratios = []
    for i in range(100):
        n = int(g.integers(1, 21))
        z = _random_samples(g, 1, n)[0]
        a = float(g.choice([0.01, 0.05, 0.1, 0.25, 0.5]))
        ex = lmt.exact_upper_bound(z, a).value
        mc = lmt.mc_upper_bound(z, a, lmt.McConfig(10**6, seed=1000 + i))
        ratios.append(abs(mc.value - ex) / mc.diagnostics["mc_std_error"])
    elapsed = time.perf_counter() - t0
    worst = max(ratios)
    ok = worst <= 3 and elapsed < 120
    record_acceptance(6, "|mc - exact| <= 3 SE on 100 random samples", ok,
                      f"worst {worst:.2f} SE, {sum(x > 3 for x in ratios)} cases over, "
                      f"{elapsed:.1f} s")
    assert worst <= 3
    assert elapsed < 120


RQ1_SPECS = [H.uniform(), H.beta(1, 5), H.beta(5, 1), H.bernoulli(0.1), H.bernoulli(0.5)]
RQ1_NS = (5, 10, 30)
RQ1_ALPHAS = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
RQ1_TRIALS = 10_000


@pytest.fixture(scope="module")
def rq1_rows():
    t0 = time.perf_counter()
    rows = []
    for spec in RQ1_SPECS:
        methods = ("ours-exact", "student-t")
        for n in RQ1_NS:
            rows += H.coverage_experiment(spec, n, RQ1_ALPHAS, RQ1_TRIALS, methods, seed=2024)
    return rows, time.perf_counter() - t0


def _sigma(alpha, trials):
    return math.sqrt(alpha * (1 - alpha) / trials)


def test_07_rq1_coverage(rq1_rows):
    rows, elapsed = rq1_rows
    ours = [r for r in rows if r.method == "ours-exact"]
    margins = [(r.value - ((1 - r.alpha) - 3 * _sigma(r.alpha, r.trials)), r) for r in ours]
    worst, wr = min(margins, key=lambda t: t[0])
    ok = worst >= 0 and len(ours) == 90 and elapsed < 600
    record_acceptance(7, "observed coverage of ours >= (1 - alpha) - 3 sigma on the RQ1 grid", ok,
                      f"90 cells, tightest {wr.distribution} n={wr.n} alpha={wr.alpha}: "
                      f"{wr.value:.4f}, margin {worst:+.4f}; {elapsed:.0f} s incl. Student-t")
    assert worst >= 0
    assert len(ours) == 90
    assert elapsed < 600


def test_08_student_t_witness(rq1_rows):
    rows, _ = rq1_rows
    t_rows = [r for r in rows if r.method == "student-t" and r.distribution == "beta(1.0,5.0)"]
    shortfall = [((1 - r.alpha) - r.value) / _sigma(r.alpha, r.trials) for r in t_rows]
    witnesses = [(s, r) for s, r in zip(shortfall, t_rows) if s > 3]
    best = max(zip(shortfall, t_rows), key=lambda t: t[0])
    ok = bool(witnesses)
    record_acceptance(8, "Student-t undercovers beta(1,5) by > 3 sigma somewhere", ok,
                      f"{len(witnesses)} of {len(t_rows)} cells; largest at n={best[1].n} "
                      f"alpha={best[1].alpha}: coverage {best[1].value:.4f} ({best[0]:.1f} sigma)")
    assert witnesses


RQ2_SPECS = [H.uniform(), H.beta(1, 10), H.beta(10, 1), H.beta(5, 5), H.age_like_spec()]
RQ2_NS = (5, 10, 30, 100)


def test_09_rq2_tightness():
    t0 = time.perf_counter()
    problems = []
    for spec in RQ2_SPECS:
        rows = H.tightness_experiment(spec, RQ2_NS, 0.05, 1000, H.DEFAULT_METHODS, seed=99)
        mean = {(r.n, r.method): r for r in rows if r.metric == "mean_upper_bound"}
        for n in RQ2_NS:
            o, a, h, mp = (mean[(n, m)].value for m in ("ours", "anderson", "hoeffding",
                                                        "maurer-pontil"))
            if not (o < a < h):
                problems.append(f"{spec.name} n={n}: ours {o:.4f} anderson {a:.4f} hoeffding {h:.4f}")
            if not o < mp:
                problems.append(f"{spec.name} n={n}: ours {o:.4f} maurer-pontil {mp:.4f}")
        for m in H.DEFAULT_METHODS:
            seq = [mean[(n, m)] for n in RQ2_NS]
            for x, y in zip(seq, seq[1:]):
                if y.value > x.value + 3 * math.hypot(x.stderr, y.stderr):
                    problems.append(f"{spec.name} {m}: n={x.n}->{y.n} rises {x.value:.4f}->{y.value:.4f}")
    elapsed = time.perf_counter() - t0
    ok = not problems
    record_acceptance(9, "mean bound: ours < Anderson < Hoeffding, ours < Maurer-Pontil, "
                         "non-increasing in n", ok,
                      (f"{len(RQ2_SPECS)} specs x n {RQ2_NS}, {elapsed:.0f} s" if ok
                       else "; ".join(problems[:3])))
    assert not problems, problems


@st.composite
def _pairs(draw):
    n = draw(st.integers(1, 30))
    z = sorted(draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    u = sorted(draw(st.lists(st.floats(0, 1), min_size=n, max_size=n)))
    return np.array(z), np.array(u)


def _strip_forms():
    worst = [0.0]

    @settings(max_examples=500, deadline=None)
    @given(_pairs())
    def check(zu):
        d = abs(induced_mean(*zu) - induced_mean_horizontal(*zu))
        worst[0] = max(worst[0], d)
        assert d <= 1e-12

    check()
    return worst[0]


def _monotone_crn():
    worst = [0.0]

    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=1, max_size=15), st.lists(st.floats(0, 1), min_size=15,
                                                                     max_size=15),
           st.sampled_from([0.01, 0.05, 0.25, 0.5]), st.integers(0, 2**32))
    def check(x, bumps, alpha, seed):
        z = np.sort(x)
        z2 = np.sort(np.minimum(1.0, z + np.array(bumps[: z.size]) * (1 - z)))
        cfg = lmt.McConfig(2000, seed)
        d = lmt.mc_upper_bound(z2, alpha, cfg).value - lmt.mc_upper_bound(z, alpha, cfg).value
        worst[0] = min(worst[0], d)
        assert d >= -1e-12

    check()
    return worst[0]


def _beta_round_trip():
    worst = 0.0
    qs = np.arange(1, 1000) / 1000
    for a in (0.5, 1, 2, 5, 30):
        for b in (0.5, 1, 2, 5, 30):
            p = BetaParams(a, b)
            for q in qs:
                worst = max(worst, abs(beta_cdf(beta_inv_cdf(float(q), p), p) - q))
    assert worst <= 1e-9, f"worst round trip error {worst:.2e}"
    return worst


def _order_stat_ks(n=7, draws=100_000):
    u = np.sort(rng.uniforms_array(rng.stream_keys_array(77, np.arange(draws)), n), axis=1)
    worst = 0.0
    grid = np.arange(1, draws + 1) / draws
    for j in range(1, n + 1):
        col = np.sort(u[:, j - 1])
        cdf = np.array([beta_cdf(v, BetaParams(j, n - j + 1)) for v in col])
        worst = max(worst, float(np.max(np.maximum(grid - cdf, cdf - (grid - 1 / draws)))))
    return worst


def _thread_determinism(tmp_path):
    outs = []
    for threads in ("1", "8"):
        out = tmp_path / f"cov_{threads}.csv"
        env = dict(os.environ, NUMBA_NUM_THREADS=threads)
        subprocess.run([sys.executable, "-m", "meanbound", "coverage", "--dist", "beta:1,5;bernoulli:0.3",
                        "--n", "5,12", "--trials", "600", "--alphas", "0.05,0.3",
                        "--methods", "ours-exact,ours-mc,bca,percentile-bootstrap,student-t",
                        "--mc-samples", "1000", "--resamples", "300", "--seed", "5",
                        "--out", str(out)], env=env, check=True, capture_output=True)
        outs.append(out.read_bytes())
    return outs[0] == outs[1] and len(outs[0]) > 0


def test_10_property_suites(tmp_path):
    results = {}
    failures = []
    for name, fn in (("strip forms", _strip_forms), ("CRN monotonicity", _monotone_crn),
                     ("beta round trip", _beta_round_trip)):
        try:
            results[name] = fn()
        except AssertionError as exc:
            failures.append(f"{name}: {exc}")
    ks = _order_stat_ks()
    if ks >= 0.01:
        failures.append(f"order statistic KS {ks:.4f}")
    same = _thread_determinism(tmp_path)
    if not same:
        failures.append("thread count changed result bytes")
    detail = (f"strip {results.get('strip forms', float('nan')):.1e}, "
              f"CRN min diff {results.get('CRN monotonicity', float('nan')):.1e}, "
              f"round trip {results.get('beta round trip', float('nan')):.1e}, "
              f"KS {ks:.4f}, threads 1 vs 8 identical: {same}")
    record_acceptance(10, "property suites", not failures, detail)
    assert not failures, failures
