"""Comparison bounds on the mean of a [0, 1] random variable.

Methods with guaranteed coverage: Hoeffding, its variant with the smallest
sample in place of the lower support bound, Maurer & Pontil's empirical
Bernstein bound, and Anderson's bound built on the DKW envelope with
Massart's constant.  Methods without it: Student-t, percentile bootstrap,
and BCa bootstrap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from . import kernels, rng
from .core import empirical_quantile, induced_mean, order_statistics
from .special import student_t_quantile

DEFAULT_RESAMPLES = 2000
_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class SampleStats:
    mean: float
    variance: float
    n: int

    @classmethod
    def of(cls, x) -> "SampleStats":
        x = np.asarray(x, dtype=np.float64)
        if np.all(x == x[0]):
            # exact for constant samples, where summation would round
            return cls(float(x[0]), 0.0 if x.size > 1 else float("nan"), int(x.size))
        return cls(float(x.mean()), float(x.var(ddof=1)) if x.size > 1 else float("nan"), int(x.size))


@dataclass(frozen=True)
class BootstrapConfig:
    resamples: int = DEFAULT_RESAMPLES
    seed: int = 0

    def __post_init__(self):
        if int(self.resamples) != self.resamples or self.resamples < 1:
            raise ValueError(f"resamples must be a positive integer, got {self.resamples}")


def _check_massart(alpha: float, name: str) -> None:
    if not 0.0 < alpha <= 0.5:
        raise ValueError(f"{name} requires 0 < alpha <= 0.5, got {alpha}")


def _slack(n: int, alpha: float) -> float:
    return math.sqrt(math.log(1.0 / alpha) / (2.0 * n))


def hoeffding_upper(x, alpha: float) -> float:
    """``mean + sqrt(ln(1/alpha) / 2n)``, unclamped."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    x = order_statistics(x)
    return float(x.mean()) + _slack(x.size, alpha)


def hoeffding_upper_tightened(z, alpha: float) -> float:
    """Hoeffding with the slack scaled by ``1 - z_1``; valid for alpha <= 0.5."""
    _check_massart(alpha, "tightened Hoeffding")
    z = order_statistics(z)
    return float(z.mean()) + (1.0 - float(z[0])) * _slack(z.size, alpha)


def maurer_pontil_upper(x, alpha: float) -> float:
    """Empirical Bernstein bound of Maurer & Pontil, unclamped."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must be in (0, 2], got {alpha}")
    x = order_statistics(x)
    n = x.size
    if n < 2:
        raise ValueError("Maurer-Pontil needs n >= 2")
    st = SampleStats.of(x)
    log_term = math.log(2.0 / alpha)
    return st.mean + math.sqrt(2.0 * st.variance * log_term / n) + 7.0 * log_term / (3.0 * (n - 1))


def dkw_envelope(n: int, alpha: float) -> np.ndarray:
    """``max(0, i/n - sqrt(ln(1/alpha) / 2n))`` for i = 1..n."""
    _check_massart(alpha, "DKW envelope")
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(1, n + 1, dtype=np.float64)
    return np.maximum(0.0, i / n - _slack(n, alpha))


def anderson_upper(z, alpha: float) -> float:
    """Induced mean at the DKW envelope."""
    z = order_statistics(z)
    return induced_mean(z, dkw_envelope(z.size, alpha))


def student_t_upper(x, alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    x = order_statistics(x)
    if x.size < 2:
        raise ValueError("Student-t needs n >= 2")
    st = SampleStats.of(x)
    return st.mean + math.sqrt(st.variance / st.n) * student_t_quantile(1.0 - alpha, st.n - 1)


def bootstrap_means(x, cfg: BootstrapConfig | None = None) -> np.ndarray:
    """Means of ``cfg.resamples`` resamples drawn with replacement."""
    cfg = cfg or BootstrapConfig()
    x = np.ascontiguousarray(x, dtype=np.float64)
    return kernels.bootstrap_means(x, rng.as_seed(cfg.seed), int(cfg.resamples))


def percentile_bootstrap_upper(x, alpha: float, cfg: BootstrapConfig | None = None) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    x = order_statistics(x)
    return empirical_quantile(bootstrap_means(x, cfg), 1.0 - alpha)


def jackknife_acceleration(x) -> float:
    """Acceleration constant from the skewness of leave-one-out means (nan if undefined)."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    loo = (x.sum() - x) / (n - 1)
    d = loo.mean() - loo
    den = float((d * d).sum())
    if den == 0.0:
        return float("nan")
    return float((d ** 3).sum()) / (6.0 * den ** 1.5)


def bca_level(means: np.ndarray, x, alpha: float) -> tuple[float, dict]:
    """Adjusted quantile level for the BCa upper bound.

    Returns ``(level, info)``; ``level`` is nan when BCa is undefined
    (all samples equal, every resample on one side of the mean, or zero
    jackknife spread).
    """
    x = np.asarray(x, dtype=np.float64)
    info = {"z0": float("nan"), "acceleration": float("nan")}
    if np.all(x == x[0]):
        return float("nan"), info
    # Resamples that permute the original sample tie with its mean in exact
    # arithmetic; a summation-error margin keeps rounding from deciding them.
    margin = 4.0 * x.size * np.finfo(np.float64).eps * float(np.max(np.abs(x)))
    frac = float(np.count_nonzero(means < x.mean() - margin)) / means.size
    if frac <= 0.0 or frac >= 1.0:
        return float("nan"), info
    z0 = _STD_NORMAL.inv_cdf(frac)
    acc = jackknife_acceleration(x)
    info.update(z0=z0, acceleration=acc)
    if not math.isfinite(acc):
        return float("nan"), info
    zq = z0 + _STD_NORMAL.inv_cdf(1.0 - alpha)
    denom = 1.0 - acc * zq
    if denom <= 0.0:
        return float("nan"), info
    level = _STD_NORMAL.cdf(z0 + zq / denom)
    if not 0.0 < level <= 1.0:
        return float("nan"), info
    return level, info


def bca_upper_result(x, alpha: float, cfg: BootstrapConfig | None = None) -> tuple[float, dict]:
    """BCa upper bound plus diagnostics; falls back to the percentile bootstrap."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    x = order_statistics(x)
    if x.size < 2:
        raise ValueError("BCa needs n >= 2")
    means = bootstrap_means(x, cfg)
    level, info = bca_level(means, x, alpha)
    if math.isnan(level):
        info["fallback"] = True
        return empirical_quantile(means, 1.0 - alpha), info
    info["fallback"] = False
    info["level"] = level
    return empirical_quantile(means, level), info


def bca_upper(x, alpha: float, cfg: BootstrapConfig | None = None) -> float:
    return bca_upper_result(x, alpha, cfg)[0]
