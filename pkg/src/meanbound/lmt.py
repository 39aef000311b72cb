"""High-confidence bounds on the mean from the quantile of induced means.

For a sorted sample ``z`` and sorted uniforms ``U``, the upper bound is the
(1 - alpha)-quantile of ``m(z, U) = 1 - U . s`` where ``s`` are the spacings
of ``z``.  Two estimators are provided:

* :func:`mc_upper_bound` draws ``l`` sorted-uniform vectors and reads off an
  order statistic of the resulting induced means.
* :func:`exact_upper_bound` bisects on the bound, evaluating the exact
  fraction of the order-statistic simplex where ``U . s >= 1 - mu``.

Lower bounds come from reflecting the sample, ``1 - m_alpha(1 - x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels, rng
from .core import order_statistics, quantile_index, spacings

DEFAULT_MC_SAMPLES = 10_000
DEFAULT_TOL = 1e-10
DEFAULT_MAXITER = 200


class ConvergenceError(RuntimeError):
    """Bisection did not reach the requested tolerance."""


@dataclass(frozen=True)
class McConfig:
    l: int = DEFAULT_MC_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 1:
            raise ValueError(f"l must be a positive integer, got {self.l}")


@dataclass
class BoundResult:
    value: float
    method: str
    alpha: float
    n: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method, "alpha": self.alpha,
                "n": self.n, "diagnostics": dict(self.diagnostics)}


def _clamp01(v: float) -> float:
    return min(max(float(v), 0.0), 1.0)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")


def quantile_with_stderr(sorted_values: np.ndarray, level: float) -> tuple[float, float]:
    """Order-statistic quantile of a sorted MC sample and its standard error.

    The error uses the asymptotic law of a sample quantile,
    ``sqrt(p (1 - p) / l) / f(q)``, with the density ``f`` estimated by a
    symmetric difference of order statistics ``ceil(sqrt(l))`` ranks away.
    """
    l = sorted_values.size
    k = quantile_index(level, l)
    value = float(sorted_values[k - 1])
    h = max(1, math.ceil(math.sqrt(l)))
    lo = max(1, k - h)
    hi = min(l, k + h)
    width = float(sorted_values[hi - 1] - sorted_values[lo - 1])
    if hi == lo or width <= 0.0:
        return value, 0.0
    # f ~ (hi - lo) / (l * width)
    se = math.sqrt(level * (1.0 - level) / l) * l * width / (hi - lo)
    return value, se


def induced_means_mc(z, cfg: McConfig) -> np.ndarray:
    """The ``l`` Monte Carlo induced means ``1 - u . s`` (unsorted, repetition order)."""
    s = spacings(z)
    return kernels.mc_means(s, rng.as_seed(cfg.seed), int(cfg.l))


def mc_upper_bound(x, alpha: float, cfg: McConfig | None = None) -> BoundResult:
    """Monte Carlo estimate of the upper bound (Algorithm 1)."""
    _check_alpha(alpha)
    cfg = cfg or McConfig()
    z = order_statistics(x)
    ms = np.sort(induced_means_mc(z, cfg))
    value, se = quantile_with_stderr(ms, 1.0 - alpha)
    return BoundResult(_clamp01(value), "ours-mc", alpha, z.size,
                       {"l": int(cfg.l), "seed": int(cfg.seed), "mc_std_error": se,
                        "generator": f"{rng.GENERATOR_NAME}-v{rng.GENERATOR_VERSION}"})


def simplex_upper_fraction(c, t: float) -> float:
    """Fraction of ``{0 <= u_1 <= ... <= u_n <= 1}`` where ``sum_i c'_i v_i >= t``.

    ``v_i = u_i - u_{i-1}`` are the spacings of ``u`` (with ``v_{n+1} = 1 - u_n``)
    and ``c' = (c_1, ..., c_n, 0)``.  Taking ``c_i = 1 - z_i`` makes the sum equal
    to ``u . s``.
    """
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("c must be a non-empty vector")
    if c.min() < 0.0 or c.max() > 1.0:
        raise ValueError("c must lie in [0, 1]")
    return float(kernels.upper_fraction(c, float(t)))


def exact_upper_bound(z, alpha: float, tol: float = DEFAULT_TOL,
                      maxiter: int = DEFAULT_MAXITER) -> BoundResult:
    """Smallest ``mu`` (to within ``tol``) with ``P(U . s >= 1 - mu) >= 1 - alpha``."""
    _check_alpha(alpha)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    z = order_statistics(z)
    value, iters, ok = kernels.exact_bound(1.0 - z, float(z[0]), float(alpha), float(tol), int(maxiter))
    if not ok:
        raise ConvergenceError(
            f"bisection stalled after {iters} iterations; tol={tol} is below float resolution")
    return BoundResult(_clamp01(value), "ours-exact", alpha, z.size,
                       {"tol": tol, "iterations": int(iters)})


def exact_upper_bounds(z_rows, alphas, tol: float = DEFAULT_TOL,
                       maxiter: int = DEFAULT_MAXITER) -> np.ndarray:
    """Exact bounds for every row of a ``(trials, n)`` array of sorted samples and every alpha."""
    z_rows = np.ascontiguousarray(z_rows, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    out, ok = kernels.exact_bounds_rows(z_rows, alphas, float(tol), int(maxiter))
    if not ok:
        raise ConvergenceError(f"bisection did not converge for tol={tol}")
    return np.clip(out, 0.0, 1.0)


def mc_upper_bounds(z_rows, alphas, seeds, l: int = DEFAULT_MC_SAMPLES) -> np.ndarray:
    """Monte Carlo bounds for every row; row ``r`` uses ``seeds[r]``."""
    z_rows = np.ascontiguousarray(z_rows, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    seeds = np.asarray(seeds, dtype=np.uint64)
    return np.clip(kernels.mc_bounds_rows(z_rows, alphas, seeds, int(l)), 0.0, 1.0)


def upper_bound(x, alpha: float, estimator: str = "exact", cfg: McConfig | None = None,
                tol: float = DEFAULT_TOL) -> BoundResult:
    if estimator == "exact":
        return exact_upper_bound(x, alpha, tol)
    if estimator == "mc":
        return mc_upper_bound(x, alpha, cfg)
    raise ValueError(f"unknown estimator {estimator!r}; use 'exact' or 'mc'")


def lower_bound(x, alpha: float, cfg: McConfig | None = None, estimator: str = "mc",
                tol: float = DEFAULT_TOL) -> BoundResult:
    """``1 - m_alpha(1 - x)``: the upper bound of the reflected sample, reflected back."""
    z = order_statistics(x)
    reflected = upper_bound(1.0 - z, alpha, estimator, cfg, tol)
    diag = dict(reflected.diagnostics)
    diag["reflected_upper"] = reflected.value
    return BoundResult(_clamp01(1.0 - reflected.value), f"{reflected.method}-lower",
                       alpha, z.size, diag)


def two_sided_interval(x, alpha: float, cfg: McConfig | None = None, estimator: str = "mc",
                       tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Lower and upper bound at ``alpha / 2`` each."""
    _check_alpha(alpha)
    lo = lower_bound(x, alpha / 2.0, cfg, estimator, tol).value
    hi = upper_bound(x, alpha / 2.0, estimator, cfg, tol).value
    return lo, hi
