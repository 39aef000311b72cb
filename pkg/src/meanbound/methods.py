"""Method registry: one entry point per bound, for single samples and batches.

Method ids::

    ours                 exact for n <= exact_max_n, Monte Carlo above
    ours-exact, ours-mc
    hoeffding, hoeffding-tightened, maurer-pontil, anderson     (guaranteed)
    student-t, percentile-bootstrap, bca                        (not guaranteed)
"""

from __future__ import annotations

import math

import numpy as np

from . import baselines as bl
from . import kernels, lmt
from .core import order_statistics, quantile_index
from .special import student_t_quantile

GUARANTEED = ("hoeffding", "hoeffding-tightened", "maurer-pontil", "anderson")
UNGUARANTEED = ("student-t", "percentile-bootstrap", "bca")
OURS = ("ours", "ours-exact", "ours-mc")
ALL_METHODS = OURS + GUARANTEED + UNGUARANTEED

DEFAULT_EXACT_MAX_N = 1000
_BOOT_CHUNK = 256


def check_method(method: str) -> str:
    if method not in ALL_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(ALL_METHODS)}")
    return method


def resolve_ours(method: str, n: int, exact_max_n: int) -> str:
    if method == "ours":
        return "ours-exact" if n <= exact_max_n else "ours-mc"
    return method


def compute_bound(x, method: str, alpha: float, *, mc: lmt.McConfig | None = None,
                  boot: bl.BootstrapConfig | None = None,
                  exact_max_n: int = DEFAULT_EXACT_MAX_N) -> lmt.BoundResult:
    """Upper bound on the mean of ``x`` (values in [0, 1]) by ``method``.

    ``value`` is clamped to [0, 1]; the unclamped number is kept in
    ``diagnostics['raw']``.
    """
    check_method(method)
    z = order_statistics(x)
    method = resolve_ours(method, z.size, exact_max_n)
    if method == "ours-exact":
        res = lmt.exact_upper_bound(z, alpha)
        res.diagnostics["raw"] = res.value
        return res
    if method == "ours-mc":
        res = lmt.mc_upper_bound(z, alpha, mc)
        res.diagnostics["raw"] = res.value
        return res
    diag = {}
    if method == "hoeffding":
        raw = bl.hoeffding_upper(z, alpha)
    elif method == "hoeffding-tightened":
        raw = bl.hoeffding_upper_tightened(z, alpha)
    elif method == "maurer-pontil":
        raw = bl.maurer_pontil_upper(z, alpha)
    elif method == "anderson":
        raw = bl.anderson_upper(z, alpha)
    elif method == "student-t":
        raw = bl.student_t_upper(z, alpha)
    elif method == "percentile-bootstrap":
        boot = boot or bl.BootstrapConfig()
        raw = bl.percentile_bootstrap_upper(z, alpha, boot)
        diag.update(resamples=boot.resamples, seed=boot.seed)
    else:
        boot = boot or bl.BootstrapConfig()
        raw, info = bl.bca_upper_result(z, alpha, boot)
        diag.update(info, resamples=boot.resamples, seed=boot.seed)
    diag["raw"] = raw
    return lmt.BoundResult(min(max(raw, 0.0), 1.0), method, alpha, z.size, diag)


def _validate_alpha(method: str, alpha: float, n: int) -> None:
    """Raise ValueError for (method, alpha, n) combinations a method cannot evaluate."""
    if method in OURS or method in ("student-t", "percentile-bootstrap", "bca"):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"{method} requires 0 < alpha < 1, got {alpha}")
    elif method == "hoeffding":
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"hoeffding requires 0 < alpha <= 1, got {alpha}")
    elif method == "maurer-pontil":
        if not 0.0 < alpha <= 2.0:
            raise ValueError(f"maurer-pontil requires 0 < alpha <= 2, got {alpha}")
    elif not 0.0 < alpha <= 0.5:
        raise ValueError(f"{method} requires 0 < alpha <= 0.5, got {alpha}")
    if n < 2 and method in ("maurer-pontil", "student-t", "bca"):
        raise ValueError(f"{method} needs n >= 2")


def batch_bounds(z_rows: np.ndarray, method: str, alpha: float, *,
                 mc_seeds: np.ndarray | None = None, boot_seeds: np.ndarray | None = None,
                 mc_samples: int = lmt.DEFAULT_MC_SAMPLES,
                 resamples: int = bl.DEFAULT_RESAMPLES,
                 exact_max_n: int = DEFAULT_EXACT_MAX_N) -> np.ndarray:
    """Unclamped upper bounds for each row of a ``(trials, n)`` array of sorted samples."""
    check_method(method)
    z_rows = np.ascontiguousarray(z_rows, dtype=np.float64)
    trials, n = z_rows.shape
    method = resolve_ours(method, n, exact_max_n)
    _validate_alpha(method, alpha, n)
    alphas = np.array([alpha])

    if method == "ours-exact":
        return lmt.exact_upper_bounds(z_rows, alphas)[:, 0]
    if method == "ours-mc":
        return lmt.mc_upper_bounds(z_rows, alphas, mc_seeds, mc_samples)[:, 0]

    mean = z_rows.mean(axis=1)
    const = z_rows[:, 0] == z_rows[:, -1]
    mean[const] = z_rows[const, 0]
    if method == "hoeffding":
        return mean + math.sqrt(math.log(1.0 / alpha) / (2.0 * n))
    if method == "hoeffding-tightened":
        return mean + (1.0 - z_rows[:, 0]) * math.sqrt(math.log(1.0 / alpha) / (2.0 * n))
    if method == "anderson":
        s = np.diff(z_rows, axis=1, append=1.0)
        return 1.0 - s @ bl.dkw_envelope(n, alpha)
    if method in ("maurer-pontil", "student-t"):
        var = z_rows.var(axis=1, ddof=1)
        var[const] = 0.0
        if method == "student-t":
            return mean + np.sqrt(var / n) * student_t_quantile(1.0 - alpha, n - 1)
        log_term = math.log(2.0 / alpha)
        return mean + np.sqrt(2.0 * var * log_term / n) + 7.0 * log_term / (3.0 * (n - 1))

    out = np.empty(trials)
    for start in range(0, trials, _BOOT_CHUNK):
        stop = min(start + _BOOT_CHUNK, trials)
        means = kernels.bootstrap_means_rows(z_rows[start:stop], np.asarray(boot_seeds[start:stop], dtype=np.uint64), int(resamples))
        means.sort(axis=1)
        for r in range(stop - start):
            level = 1.0 - alpha
            if method == "bca":
                adj, _ = bl.bca_level(means[r], z_rows[start + r], alpha)
                if not math.isnan(adj):
                    level = adj
            out[start + r] = _sorted_quantile(means[r], level)
    return out


def _sorted_quantile(sorted_vals: np.ndarray, level: float) -> float:
    if level >= 1.0:
        return float(sorted_vals[-1])
    return float(sorted_vals[quantile_index(level, sorted_vals.size) - 1])
