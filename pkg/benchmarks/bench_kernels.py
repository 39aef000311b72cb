"""Time the numba kernels against their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each line reports the best wall time of each flavour, the speedup, and the
largest absolute difference between their outputs.  The first numba call per
kernel (compilation or cache load) is excluded.
"""

import argparse
import time

import numpy as np

from meanbound import kernels as K
from meanbound import rng
from meanbound._accel import USE_NUMBA


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(quick):
    g = np.random.default_rng(0)
    scale = 10 if quick else 1
    z30 = np.sort(g.random(30))
    z300 = np.sort(g.random(300))
    rows = np.sort(g.random((2000 // scale, 10)), axis=1)
    seeds = rng.stream_keys_array(1, np.arange(rows.shape[0]))
    x50 = g.random(50)
    u = g.random(200_000 // scale)
    alpha = np.array([0.05])
    seed = rng.as_seed(7)
    return [
        ("exact_bound n=30", lambda: K.exact_bound_numba(1 - z30, z30[0], 0.05, 1e-10, 200)[0],
         lambda: K.exact_bound_numpy(1 - z30, z30[0], 0.05, 1e-10, 200)[0]),
        ("exact_bound n=300", lambda: K.exact_bound_numba(1 - z300, z300[0], 0.05, 1e-10, 200)[0],
         lambda: K.exact_bound_numpy(1 - z300, z300[0], 0.05, 1e-10, 200)[0]),
        (f"exact_bounds_rows {rows.shape}",
         lambda: K.exact_bounds_rows_numba(rows, alpha, 1e-10, 200)[0],
         lambda: K.exact_bounds_rows_numpy(rows, alpha, 1e-10, 200)[0]),
        (f"mc_means n=30 l={10**6 // scale}",
         lambda: K.mc_means_numba(np.diff(z30, append=1.0), seed, 10**6 // scale),
         lambda: K.mc_means_numpy(np.diff(z30, append=1.0), seed, 10**6 // scale)),
        (f"mc_bounds_rows {rows.shape} l=1000",
         lambda: K.mc_bounds_rows_numba(rows, alpha, seeds, 1000),
         lambda: K.mc_bounds_rows_numpy(rows, alpha, seeds, 1000)),
        ("bootstrap_means n=50 b=20000", lambda: K.bootstrap_means_numba(x50, seed, 20000),
         lambda: K.bootstrap_means_numpy(x50, seed, 20000)),
        (f"beta_ppf {u.size} draws", lambda: K.beta_ppf_numba(u, 1.0, 5.0),
         lambda: K.beta_ppf_numpy(u, 1.0, 5.0)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="shrink every problem tenfold")
    args = ap.parse_args(argv)
    if not USE_NUMBA:
        raise SystemExit("numba is disabled (MEANBOUND_DISABLE_NUMBA); nothing to compare")
    print(f"{'kernel':<36}{'numba s':>10}{'numpy s':>10}{'speedup':>9}{'max |diff|':>12}")
    for name, fast, slow in cases(args.quick):
        fast()  # warm up
        tf, a = best_time(fast, args.repeat)
        ts, b = best_time(slow, args.repeat)
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{name:<36}{tf:>10.4f}{ts:>10.4f}{ts / tf:>9.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
