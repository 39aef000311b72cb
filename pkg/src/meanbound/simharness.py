"""Coverage and tightness experiments over synthetic distributions on [0, 1].

Every stochastic quantity comes from a counter-based stream keyed by the
experiment seed and the trial index, so results do not depend on how many
threads the kernels use:

* trial ``t`` draws its sample from stream ``t`` of ``derive_seed(seed, 0)``
* its Monte Carlo bound uses stream ``t`` of ``derive_seed(seed, 1)``
* its bootstrap resamples use stream ``t`` of ``derive_seed(seed, 2)``
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import kernels, methods, rng
from .half_bernoulli import pk_of

log = logging.getLogger(__name__)

COVERAGE_TRIALS = 10_000
TIGHTNESS_TRIALS = 1_000
DEFAULT_ALPHAS = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_NS = (5, 10, 30, 100)
DEFAULT_METHODS = ("ours", "hoeffding", "maurer-pontil", "anderson",
                   "student-t", "percentile-bootstrap", "bca")

COLUMNS = ("distribution", "n", "alpha", "method", "trials", "metric", "value", "stderr", "seed")
KINDS = ("uniform", "beta", "bernoulli", "half_bernoulli", "discrete")

_SAMPLE_PURPOSE, _MC_PURPOSE, _BOOT_PURPOSE = 0, 1, 2
AGE_LIKE_VERSION = "age-like-v1"


@dataclass(frozen=True)
class DistributionSpec:
    kind: str
    params: tuple = ()
    support: tuple = ()
    probs: tuple = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        p = self.params
        if self.kind == "uniform":
            if p:
                raise ValueError("uniform takes no parameters")
        elif self.kind == "beta":
            if len(p) != 2 or not (p[0] > 0 and p[1] > 0) or not all(map(math.isfinite, p)):
                raise ValueError(f"beta needs two positive finite parameters, got {p}")
        elif self.kind == "bernoulli":
            if len(p) != 1 or not 0.0 <= p[0] <= 1.0:
                raise ValueError(f"bernoulli needs p in [0, 1], got {p}")
        elif self.kind == "half_bernoulli":
            if len(p) != 2:
                raise ValueError(f"half_bernoulli needs (k, mu), got {p}")
            pk_of(p[0], p[1])
        else:
            s = np.asarray(self.support, dtype=np.float64)
            q = np.asarray(self.probs, dtype=np.float64)
            if s.ndim != 1 or s.size == 0 or s.shape != q.shape:
                raise ValueError("discrete needs matching non-empty support and probability lists")
            if not np.all(np.isfinite(s)) or s.min() < 0.0 or s.max() > 1.0:
                raise ValueError("discrete support must lie in [0, 1]")
            if not np.all(np.isfinite(q)) or q.min() < 0.0:
                raise ValueError("discrete probabilities must be non-negative")
            if abs(math.fsum(self.probs) - 1.0) > 1e-12:
                raise ValueError(f"discrete probabilities sum to {math.fsum(self.probs)!r}, not 1")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind == "discrete":
            return f"discrete({len(self.support)})"
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(repr(float(v)) for v in self.params)})"

    @property
    def true_mean(self) -> float:
        p = self.params
        if self.kind == "uniform":
            return 0.5
        if self.kind == "beta":
            return p[0] / (p[0] + p[1])
        if self.kind == "bernoulli":
            return float(p[0])
        if self.kind == "half_bernoulli":
            return float(p[1])
        return math.fsum(s * q for s, q in zip(self.support, self.probs))


def uniform() -> DistributionSpec:
    return DistributionSpec("uniform")


def beta(a: float, b: float) -> DistributionSpec:
    return DistributionSpec("beta", (float(a), float(b)))


def bernoulli(p: float) -> DistributionSpec:
    return DistributionSpec("bernoulli", (float(p),))


def half_bernoulli(k: float, mu: float) -> DistributionSpec:
    return DistributionSpec("half_bernoulli", (float(k), float(mu)))


def discrete(support, probs, label: str = "") -> DistributionSpec:
    return DistributionSpec("discrete", support=tuple(float(v) for v in support),
                            probs=tuple(float(v) for v in probs), label=label)


def age_like_spec() -> DistributionSpec:
    """Synthetic stand-in for an age distribution on 0..84 years, scaled to [0, 1].

    Weights are flat through middle age and taper off past 60 along a
    logistic curve, giving a mild right skew.  The table is fixed; changing it
    requires bumping ``AGE_LIKE_VERSION``.
    """
    ages = np.arange(85)
    w = 1.0 / (1.0 + np.exp((ages - 62.0) / 7.0))
    probs = w / w.sum()
    # absorb rounding so the probabilities sum to 1 under fsum
    probs[0] += 1.0 - math.fsum(probs)
    return discrete(ages / 84.0, probs, label=AGE_LIKE_VERSION)


def load_discrete_csv(path, lo: float | None = None, hi: float | None = None,
                      normalize: bool = False, label: str = "") -> DistributionSpec:
    """Two-column CSV (value in original units, probability) rescaled onto [0, 1].

    ``lo`` and ``hi`` default to the smallest and largest listed value.  A
    header row is skipped if its first cell is not numeric.
    """
    values, probs = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}:{lineno}: expected two columns")
            try:
                v, q = float(row[0]), float(row[1])
            except ValueError:
                if lineno == 1:
                    continue
                raise ValueError(f"{path}:{lineno}: non-numeric entry {row!r}") from None
            values.append(v)
            probs.append(q)
    if not values:
        raise ValueError(f"{path}: no data rows")
    lo = min(values) if lo is None else float(lo)
    hi = max(values) if hi is None else float(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    if any(v < lo or v > hi for v in values):
        raise ValueError(f"{path}: support value outside [{lo}, {hi}]")
    if normalize:
        total = math.fsum(probs)
        probs = [q / total for q in probs]
        probs[int(np.argmax(probs))] += 1.0 - math.fsum(probs)
    return discrete([(v - lo) / (hi - lo) for v in values], probs,
                    label=label or Path(path).stem)


def parse_distribution(text: str) -> DistributionSpec:
    """``uniform``, ``beta:a,b``, ``bernoulli:p``, ``half_bernoulli:k,mu``, ``age-like``,
    or ``file:path.csv``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower().replace("-", "_")
    if kind == "age_like":
        return age_like_spec()
    if kind == "file":
        return load_discrete_csv(rest)
    args = tuple(float(v) for v in rest.split(",") if v.strip()) if rest else ()
    if kind == "uniform":
        return DistributionSpec("uniform", args)
    if kind in ("beta", "bernoulli", "half_bernoulli"):
        return DistributionSpec(kind, args)
    raise ValueError(f"cannot parse distribution {text!r}")


def _inverse_cdf(spec: DistributionSpec, u: np.ndarray) -> np.ndarray:
    p = spec.params
    if spec.kind == "uniform":
        return u
    if spec.kind == "beta":
        return kernels.beta_ppf(u, p[0], p[1])
    if spec.kind == "bernoulli":
        return (u < p[0]).astype(np.float64)
    if spec.kind == "half_bernoulli":
        return np.where(u < pk_of(p[0], p[1]), p[0], 1.0)
    support = np.asarray(spec.support)
    order = np.argsort(support, kind="stable")
    cdf = np.cumsum(np.asarray(spec.probs)[order])
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), support.size - 1)
    return support[order][idx]


def sample_trials(spec: DistributionSpec, n: int, trials: int, seed, first: int = 0) -> np.ndarray:
    """``(trials, n)`` block; row ``r`` is trial ``first + r``."""
    if n < 1 or trials < 0:
        raise ValueError("need n >= 1 and trials >= 0")
    keys = rng.stream_keys_array(rng.derive_seed(seed, _SAMPLE_PURPOSE),
                                 np.arange(first, first + trials))
    return _inverse_cdf(spec, rng.uniforms_array(keys, n))


def sample_distribution(spec: DistributionSpec, n: int, seed=0, stream: int = 0) -> np.ndarray:
    """``n`` i.i.d. draws for trial ``stream`` of an experiment seeded with ``seed``."""
    return sample_trials(spec, n, 1, seed, first=stream)[0]


@dataclass
class ExperimentRow:
    distribution: str
    n: int
    alpha: float
    method: str
    trials: int
    metric: str
    value: float
    stderr: float
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.metric == "coverage" and not math.isnan(self.value) and not 0.0 <= self.value <= 1.0:
            raise ValueError(f"coverage {self.value} outside [0, 1]")


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by both experiments."""
    mc_samples: int = 10_000
    resamples: int = 2_000
    exact_max_n: int = methods.DEFAULT_EXACT_MAX_N
    chunk: int = 2_000


def _trial_bounds(spec, n, alphas, trials, method_list, seed, cfg: RunConfig):
    """Raw bounds per (method, alpha), as ``{(method, alpha): array | None}``.

    Samples are generated and consumed in chunks of trials; each chunk's rows
    and seeds are addressed by absolute trial index.
    """
    mc_base = rng.derive_seed(seed, _MC_PURPOSE)
    boot_base = rng.derive_seed(seed, _BOOT_PURPOSE)
    out = {}
    for m in method_list:
        for a in alphas:
            try:
                methods._validate_alpha(methods.resolve_ours(m, n, cfg.exact_max_n), a, n)
                out[(m, a)] = np.empty(trials)
            except ValueError as exc:
                log.warning("skipping %s at alpha=%g, n=%d: %s", m, a, n, exc)
                out[(m, a)] = None
    for start in range(0, trials, cfg.chunk):
        stop = min(start + cfg.chunk, trials)
        z = np.sort(sample_trials(spec, n, stop - start, seed, first=start), axis=1)
        idx = np.arange(start, stop)
        mc_seeds = rng.stream_keys_array(mc_base, idx)
        boot_seeds = rng.stream_keys_array(boot_base, idx)
        for (m, a), arr in out.items():
            if arr is None:
                continue
            arr[start:stop] = methods.batch_bounds(
                z, m, a, mc_seeds=mc_seeds, boot_seeds=boot_seeds,
                mc_samples=cfg.mc_samples, resamples=cfg.resamples,
                exact_max_n=cfg.exact_max_n)
    return out


def coverage_experiment(spec: DistributionSpec, n: int, alphas=DEFAULT_ALPHAS,
                        trials: int = COVERAGE_TRIALS, method_list=("ours",), seed=0,
                        cfg: RunConfig | None = None) -> list[ExperimentRow]:
    """Fraction of trials whose upper bound reaches the true mean, per (alpha, method).

    Combinations a method cannot evaluate (such as alpha = 1 for methods that
    need alpha < 1) still produce a row, with nan value and standard error.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = cfg or RunConfig()
    alphas = [float(a) for a in np.atleast_1d(alphas)]
    for m in method_list:
        methods.check_method(m)
    bounds = _trial_bounds(spec, n, alphas, trials, method_list, seed, cfg)
    mu = spec.true_mean
    rows = []
    for a in alphas:
        for m in method_list:
            b = bounds[(m, a)]
            if b is None:
                c = se = float("nan")
            else:
                c = float(np.count_nonzero(b >= mu)) / trials
                se = math.sqrt(c * (1.0 - c) / trials)
            rows.append(ExperimentRow(spec.name, n, a, m, trials, "coverage", c, se, int(seed)))
    return rows


def tightness_experiment(spec: DistributionSpec, ns=DEFAULT_NS, alpha: float = 0.05,
                         trials: int = TIGHTNESS_TRIALS, method_list=DEFAULT_METHODS, seed=0,
                         cfg: RunConfig | None = None) -> list[ExperimentRow]:
    """Mean upper bound per (n, method), clamped to [0, 1] and unclamped.

    Emits two rows per pair: ``mean_upper_bound`` averages bounds clamped to
    [0, 1] and ``mean_upper_bound_raw`` averages the unclamped values.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = cfg or RunConfig()
    for m in method_list:
        methods.check_method(m)
    rows = []
    for n in [int(v) for v in np.atleast_1d(ns)]:
        bounds = _trial_bounds(spec, n, [float(alpha)], trials, method_list, seed, cfg)
        for m in method_list:
            b = bounds[(m, float(alpha))]
            for metric, vals in (("mean_upper_bound", None if b is None else np.clip(b, 0.0, 1.0)),
                                 ("mean_upper_bound_raw", b)):
                if vals is None:
                    v = se = float("nan")
                else:
                    v = float(vals.mean())
                    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
                rows.append(ExperimentRow(spec.name, n, float(alpha), m, trials, metric, v, se,
                                          int(seed)))
    return rows


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results(rows, path, fmt: str = "csv", metadata: dict | None = None) -> None:
    """Write rows with a fixed column order; optional metadata goes to ``<path>.meta.json``."""
    path = Path(path)
    dicts = [asdict(r) if isinstance(r, ExperimentRow) else dict(r) for r in rows]
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(COLUMNS)
            for d in dicts:
                w.writerow([_cell(d[c]) for c in COLUMNS])
    elif fmt == "json":
        out = [{c: (None if isinstance(d[c], float) and math.isnan(d[c]) else d[c])
                for c in COLUMNS} for d in dicts]
        with open(path, "w") as fh:
            json.dump(out, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; use 'csv' or 'json'")
    if metadata is not None:
        with open(path.with_name(path.name + ".meta.json"), "w") as fh:
            json.dump(metadata, fh, indent=1, sort_keys=True)
            fh.write("\n")


_INT_COLS = ("n", "trials", "seed")
_FLOAT_COLS = ("alpha", "value", "stderr")


def read_results(path, fmt: str | None = None) -> list[ExperimentRow]:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    if fmt == "json":
        with open(path) as fh:
            raw = json.load(fh)
        recs = [{c: (float("nan") if d[c] is None else d[c]) for c in COLUMNS} for d in raw]
    else:
        with open(path, newline="") as fh:
            recs = list(csv.DictReader(fh))
    rows = []
    for d in recs:
        d = dict(d)
        for c in _INT_COLS:
            d[c] = int(d[c])
        for c in _FLOAT_COLS:
            d[c] = float(d[c])
        rows.append(ExperimentRow(**{c: d[c] for c in COLUMNS}))
    return rows


def grid_metadata(kind: str, **settings) -> dict:
    """Provenance record for a result file; flags the default grids as a local choice."""
    return {
        "experiment": kind,
        "generator": f"{rng.GENERATOR_NAME}-v{rng.GENERATOR_VERSION}",
        "default_grids_note": "default distribution/n/alpha grids are this package's choice",
        "default_alphas": list(DEFAULT_ALPHAS),
        "default_ns": list(DEFAULT_NS),
        "age_like_version": AGE_LIKE_VERSION,
        **settings,
    }
