"""Command-line front end.

Subcommands::

    meanbound bound DATA [--column K] [--lo A --hi B]
    meanbound coverage [--dist SPEC ...] [--n 5,10,30] [--alphas ...] [--out FILE]
    meanbound tightness [--dist SPEC ...] [--n 5,10,30,100] [--out FILE]
    meanbound worstcase --n N [--k K] [--mu MU | --sweep]

Global flags (--alpha, --method, --seed, --mc-samples, --json, --config) are
accepted before or after the subcommand.  A ``--config`` file holds flat
``key = value`` lines named after the long flags; explicit flags win over it.
Failures print one line ``meanbound: error: <message>`` to stderr and exit
non-zero.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, half_bernoulli, methods, simharness
from .baselines import BootstrapConfig
from .lmt import ConvergenceError, McConfig

PROG = "meanbound"
DEFAULTS = {
    "alpha": 0.05,
    "method": "ours-exact",
    "seed": 0,
    "mc_samples": 10_000,
    "json": False,
    "resamples": 2_000,
    "exact_max_n": methods.DEFAULT_EXACT_MAX_N,
}


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def fmt(v) -> str:
    """Ten significant digits, the format used for every number on stdout."""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


@dataclass(frozen=True)
class RescaleSpec:
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError(f"need finite lo < hi, got lo={self.lo}, hi={self.hi}")

    def to_unit(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        bad = (x < self.lo) | (x > self.hi)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValueError(f"datum {float(x[i])!r} at position {i} outside [{self.lo}, {self.hi}]")
        if self.lo == 0.0 and self.hi == 1.0:
            return x.copy()
        return (x - self.lo) / (self.hi - self.lo)

    def from_unit(self, b):
        # convex combination is exact at both endpoints
        return self.lo * (1.0 - b) + self.hi * b


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _method_list(text: str) -> list[str]:
    out = [v.strip() for v in text.split(",") if v.strip()]
    for m in out:
        if m not in methods.ALL_METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {m!r}")
    return out


def _dist_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(";") if v.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--alpha", type=float, default=S, help="1 - confidence level (default 0.05)")
    p.add_argument("--method", default=S, choices=methods.ALL_METHODS,
                   help="bound method for 'bound' (default ours-exact)")
    p.add_argument("--seed", type=int, default=S, help="seed for all stochastic output (default 0)")
    p.add_argument("--mc-samples", type=int, default=S, dest="mc_samples",
                   help="Monte Carlo repetitions l (default 10000)")
    p.add_argument("--resamples", type=int, default=S, help="bootstrap resamples (default 2000)")
    p.add_argument("--exact-max-n", type=int, default=S, dest="exact_max_n",
                   help="'ours' uses the exact computation up to this n (default 1000)")
    p.add_argument("--json", action="store_const", const=True, default=S,
                   help="machine-readable stdout")
    p.add_argument("--config", default=S, help="flat key=value file mirroring the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="High-confidence bounds on the mean of bounded data.")
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    S = argparse.SUPPRESS

    b = sub.add_parser("bound", help="bound the mean of a data file")
    _add_common(b)
    b.add_argument("data", help="newline-delimited numbers, or CSV with --column ('-' for stdin)")
    b.add_argument("--column", default=S,
                   help="CSV column: zero-based index or header name")
    b.add_argument("--lo", type=float, default=S, help="lower support limit (default 0)")
    b.add_argument("--hi", type=float, default=S, help="upper support limit (default 1)")

    for name, helptext in (("coverage", "estimate coverage by simulation"),
                           ("tightness", "estimate the mean upper bound by simulation")):
        e = sub.add_parser(name, help=helptext)
        _add_common(e)
        e.add_argument("--dist", type=_dist_list, action="append", default=S,
                       help="uniform | beta:a,b | bernoulli:p | half_bernoulli:k,mu | age-like | "
                            "file:path.csv (repeatable, or ';'-separated)")
        e.add_argument("--n", type=_int_list, default=S, help="comma-separated sample sizes")
        e.add_argument("--methods", type=_method_list, default=S,
                       help="comma-separated method ids (default: all)")
        e.add_argument("--trials", type=int, default=S)
        e.add_argument("--out", default=S, help="result file (default: CSV on stdout)")
        e.add_argument("--format", choices=("csv", "json"), default=S)
        if name == "coverage":
            e.add_argument("--alphas", type=_float_list, default=S,
                           help="comma-separated alpha grid (default 0.05,0.1,0.2,0.3,0.4,0.5)")

    w = sub.add_parser("worstcase", help="worst-case half-Bernoulli failure probabilities")
    _add_common(w)
    w.add_argument("--n", type=int, default=S, required=False)
    w.add_argument("--k", type=float, default=S, help="low support point (default 0)")
    w.add_argument("--mu", type=float, default=S,
                   help="report j_min and failure probability for this mean instead of the table")
    w.add_argument("--sweep", action="store_const", const=True, default=S,
                   help="tables for every sample size 1..n")
    return parser


# conversions for config-file values, keyed by destination
_CONFIG_TYPES = {
    "alpha": float, "method": str, "seed": int, "mc_samples": int, "resamples": int,
    "exact_max_n": int, "json": _bool, "column": str, "lo": float, "hi": float,
    "dist": _dist_list, "n": str, "methods": _method_list, "trials": int, "out": str,
    "format": str, "alphas": _float_list, "k": float, "mu": float, "sweep": _bool,
}


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key = key.strip().lstrip("-").replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _CONFIG_TYPES[key](value.strip())
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if "dist" in out:
        out["dist"] = [out["dist"]]
    return out


def resolve_args(argv=None) -> argparse.Namespace:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise CliError("missing subcommand (bound, coverage, tightness, worstcase)")
    merged = dict(DEFAULTS)
    if getattr(ns, "config", None):
        merged.update(read_config(ns.config))
    merged.update(vars(ns))
    if isinstance(merged.get("n"), str):
        merged["n"] = int(merged["n"]) if ns.command == "worstcase" else _int_list(merged["n"])
    if "dist" in merged:
        merged["dist"] = [d for group in merged["dist"] for d in group]
    return argparse.Namespace(**merged)


def read_data(path: str, column: str | None = None) -> np.ndarray:
    """Numbers from a newline-delimited file or one CSV column; blank lines are skipped.

    Anything unparsable or non-finite is an error rather than being dropped.
    """
    fh = sys.stdin if path == "-" else open(path, newline="")
    try:
        if column is None:
            vals = []
            for lineno, line in enumerate(fh, 1):
                tok = line.strip()
                if not tok:
                    continue
                vals.append(_datum(tok, path, lineno))
        else:
            vals = _read_column(fh, column, path)
    finally:
        if fh is not sys.stdin:
            fh.close()
    if not vals:
        raise ValueError(f"{path}: no data")
    return np.array(vals, dtype=np.float64)


def _datum(tok: str, path: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ValueError(f"{path}:{lineno}: not a number: {tok!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"{path}:{lineno}: non-finite value {tok!r}")
    return v


def _read_column(fh, column: str, path: str) -> list[float]:
    rows = [r for r in csv.reader(fh)]
    if not rows:
        return []
    start = 0
    if column.isdigit():
        idx = int(column)
        try:
            float(rows[0][idx])
        except (ValueError, IndexError):
            start = 1
    else:
        header = [h.strip() for h in rows[0]]
        if column not in header:
            raise ValueError(f"{path}: no column named {column!r}")
        idx = header.index(column)
        start = 1
    vals = []
    for lineno, row in enumerate(rows[start:], start + 1):
        if not row:
            continue
        if idx >= len(row):
            raise ValueError(f"{path}:{lineno}: missing column {column}")
        vals.append(_datum(row[idx].strip(), path, lineno))
    return vals


def _warn(msg: str) -> None:
    print(f"{PROG}: warning: {msg}", file=sys.stderr)


def _mc_warning(alpha: float, l: int) -> None:
    if alpha < 0.02 and l < 200.0 / alpha:
        _warn(f"alpha={alpha:g} with only {l} Monte Carlo samples; "
              f"the quantile estimate is noisy below l = {math.ceil(200.0 / alpha)}")


def cmd_bound(a) -> int:
    rs = RescaleSpec(a.lo if "lo" in a else 0.0, a.hi if "hi" in a else 1.0)
    x = read_data(a.data, getattr(a, "column", None))
    unit = rs.to_unit(x)
    method = methods.resolve_ours(a.method, unit.size, a.exact_max_n)
    if method == "ours-mc":
        _mc_warning(a.alpha, a.mc_samples)
    res = methods.compute_bound(unit, a.method, a.alpha,
                                mc=McConfig(a.mc_samples, a.seed),
                                boot=BootstrapConfig(a.resamples, a.seed),
                                exact_max_n=a.exact_max_n)
    value = float(rs.from_unit(res.value))
    diag = dict(res.diagnostics)
    diag["unit_value"] = res.value
    if "mc_std_error" in diag:
        diag["mc_std_error"] = diag["mc_std_error"] * (rs.hi - rs.lo)
    if a.json:
        out = {"upper_bound": value, "method": res.method, "alpha": a.alpha, "n": res.n,
               "lo": rs.lo, "hi": rs.hi, "diagnostics": diag}
        print(json.dumps(out, sort_keys=True, default=float))
    else:
        print(f"upper_bound {fmt(value)}")
        print(f"method {res.method}  alpha {fmt(a.alpha)}  n {res.n}  range [{fmt(rs.lo)}, {fmt(rs.hi)}]")
    return 0


def _experiment(a, kind: str) -> int:
    dists = [simharness.parse_distribution(d) for d in
             (a.dist if "dist" in a else
              ["uniform", "beta:1,5", "beta:5,1", "bernoulli:0.1", "bernoulli:0.5"])]
    method_list = a.methods if "methods" in a else list(simharness.DEFAULT_METHODS)
    cfg = simharness.RunConfig(mc_samples=a.mc_samples, resamples=a.resamples,
                               exact_max_n=a.exact_max_n)
    default_ns = (5, 10, 30) if kind == "coverage" else simharness.DEFAULT_NS
    ns = a.n if "n" in a else list(default_ns)
    if "trials" in a:
        trials = a.trials
    else:
        trials = simharness.COVERAGE_TRIALS if kind == "coverage" else simharness.TIGHTNESS_TRIALS
    alphas = (a.alphas if "alphas" in a else list(simharness.DEFAULT_ALPHAS)) \
        if kind == "coverage" else [a.alpha]
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if any(n < 1 for n in ns):
        raise ValueError("every n must be >= 1")
    if any(methods.resolve_ours(m, n, a.exact_max_n) == "ours-mc" for m in method_list for n in ns):
        for al in alphas:
            _mc_warning(al, a.mc_samples)

    rows = []
    for spec in dists:
        if kind == "coverage":
            for n in ns:
                rows += simharness.coverage_experiment(spec, n, alphas, trials, method_list,
                                                       a.seed, cfg)
        else:
            rows += simharness.tightness_experiment(spec, ns, a.alpha, trials, method_list,
                                                    a.seed, cfg)

    fmt_name = a.format if "format" in a else "csv"
    if "out" in a:
        meta = simharness.grid_metadata(
            kind, distributions=[d.name for d in dists], ns=list(ns), alphas=alphas,
            methods=list(method_list), trials=trials, seed=a.seed, mc_samples=a.mc_samples,
            resamples=a.resamples, exact_max_n=a.exact_max_n,
            used_default_grids=("dist" not in a) or ("n" not in a)
            or (kind == "coverage" and "alphas" not in a))
        simharness.write_results(rows, a.out, fmt_name, metadata=meta)
    if a.json:
        print(json.dumps([{c: _json_num(getattr(r, c)) for c in simharness.COLUMNS} for r in rows]))
    elif "out" in a:
        for r in rows:
            if r.metric == "mean_upper_bound_raw":
                continue
            print(f"{r.distribution}\tn={r.n}\talpha={fmt(r.alpha)}\t{r.method}\t"
                  f"{r.metric}={fmt(r.value)}\tse={fmt(r.stderr)}")
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(simharness.COLUMNS)
        for r in rows:
            w.writerow([fmt(getattr(r, c)) for c in simharness.COLUMNS])
    return 0


def _json_num(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def cmd_worstcase(a) -> int:
    if "n" not in a:
        raise ValueError("worstcase needs --n")
    n = a.n
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < a.alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {a.alpha}")
    k = a.k if "k" in a else 0.0
    if "mu" in a:
        spec = half_bernoulli.HalfBernoulliSpec(k, a.mu)
        jm = half_bernoulli.j_min(spec, n, a.alpha)
        out = {"n": n, "alpha": a.alpha, "k": k, "mu": a.mu, "pk": spec.pk, "j_min": jm,
               "failure_probability": half_bernoulli.failure_probability(spec, n, a.alpha, jm)}
        if a.json:
            print(json.dumps(out, sort_keys=True))
        else:
            print("\t".join(f"{key}={fmt(v)}" for key, v in out.items()))
        return 0
    sizes = range(1, n + 1) if getattr(a, "sweep", False) else [n]
    rows = []
    for m in sizes:
        for r in half_bernoulli.worst_case_table(m, a.alpha, k):
            rows.append({"n": m, **r})
    if a.json:
        print(json.dumps(rows))
    else:
        cols = ("n", "j", "pk", "k", "mu", "failure_probability")
        print("\t".join(cols))
        for r in rows:
            print("\t".join(fmt(r[c]) for c in cols))
    return 0


COMMANDS = {
    "bound": cmd_bound,
    "coverage": lambda a: _experiment(a, "coverage"),
    "tightness": lambda a: _experiment(a, "tightness"),
    "worstcase": cmd_worstcase,
}


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format=f"{PROG}: warning: %(message)s")
    try:
        a = resolve_args(argv)
        return COMMANDS[a.command](a)
    except CliError as exc:
        print(f"{PROG}: error: usage: {_one_line(exc)}", file=sys.stderr)
        return 2
    except (ValueError, OSError, ConvergenceError) as exc:
        print(f"{PROG}: error: {_one_line(exc)}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
