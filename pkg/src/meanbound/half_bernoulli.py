"""Exact coverage analysis for two-point distributions on ``{k, 1}``.

A half-Bernoulli ``H(k, mu)`` puts mass ``p_k = (1 - mu) / (1 - k)`` on ``k``
and the rest on 1.  Its sorted samples are step vectors ``[k]*j + [1]*(n-j)``
whose bound has the closed form ``1 - (1 - k) Q_j(alpha)`` with ``Q_j`` the
Beta(j, n - j + 1) quantile, so the probability of a bound below ``mu`` can be
computed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .special import BetaParams, beta_cdf, beta_inv_cdf


def pk_of(k: float, mu: float) -> float:
    if not 0.0 <= k < 1.0:
        raise ValueError(f"k must be in [0, 1), got {k}")
    if not k <= mu <= 1.0:
        raise ValueError(f"mu must be in [k, 1], got mu={mu}, k={k}")
    return (1.0 - mu) / (1.0 - k)


@dataclass(frozen=True)
class HalfBernoulliSpec:
    k: float
    mu: float

    def __post_init__(self):
        pk_of(self.k, self.mu)

    @property
    def pk(self) -> float:
        return pk_of(self.k, self.mu)

    @classmethod
    def from_pk(cls, k: float, pk: float) -> "HalfBernoulliSpec":
        return cls(k, 1.0 - pk * (1.0 - k))


@dataclass(frozen=True)
class StepSample:
    j: int
    n: int
    k: float

    def __post_init__(self):
        if not 0 <= self.j <= self.n:
            raise ValueError(f"need 0 <= j <= n, got j={self.j}, n={self.n}")

    def values(self) -> np.ndarray:
        return np.concatenate((np.full(self.j, float(self.k)), np.ones(self.n - self.j)))


@lru_cache(maxsize=65536)
def _order_stat_quantile(alpha: float, j: int, n: int) -> float:
    return beta_inv_cdf(alpha, BetaParams(j, n - j + 1))


def step_sample_bound(s: StepSample, alpha: float) -> float:
    """Closed-form bound ``1 - (1 - k) * BetaInv(alpha; j, n - j + 1)``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if s.j == 0:
        raise ValueError("j = 0 is the all-ones sample; its bound is trivially 1")
    return 1.0 - (1.0 - s.k) * _order_stat_quantile(float(alpha), s.j, s.n)


def j_min(spec: HalfBernoulliSpec, n: int, alpha: float) -> int:
    """Smallest count of ``k``'s whose step sample bound falls below ``mu`` (n + 1 if none)."""
    for j in range(1, n + 1):
        if step_sample_bound(StepSample(j, n, spec.k), alpha) < spec.mu:
            return j
    return n + 1


def failure_probability(spec: HalfBernoulliSpec, n: int, alpha: float,
                        jmin: int | None = None) -> float:
    """Probability that ``n`` draws give a bound below ``mu``: ``I_{p_k}(j_min, n - j_min + 1)``."""
    jm = j_min(spec, n, alpha) if jmin is None else int(jmin)
    if jm > n:
        return 0.0
    return beta_cdf(spec.pk, BetaParams(jm, n - jm + 1))


def failure_probability_binomial(spec: HalfBernoulliSpec, n: int, alpha: float,
                                 jmin: int | None = None) -> float:
    """The same probability summed term by term over binomial counts."""
    jm = j_min(spec, n, alpha) if jmin is None else int(jmin)
    p = spec.pk
    return math.fsum(math.comb(n, i) * p ** i * (1.0 - p) ** (n - i) for i in range(jm, n + 1))


def worst_case_pk(j: int, n: int, alpha: float) -> float:
    """Largest ``p_k`` for which the step sample with ``j`` k's is still infeasible."""
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}, n={n}")
    return _order_stat_quantile(float(alpha), int(j), int(n))


def worst_case_failure(j: int, n: int, alpha: float) -> float:
    """Failure rate of the worst-case half-Bernoulli with ``j_min = j``.

    At exactly ``p_k = worst_case_pk`` the step sample's bound equals ``mu``
    and so is feasible; the worst case is the limit from below, where
    ``j_min = j`` and the failure rate is ``I_{p_k}(j, n - j + 1)``.
    """
    pk = worst_case_pk(j, n, alpha)
    return beta_cdf(pk, BetaParams(j, n - j + 1))


def exact_bernoulli_coverage(p: float, n: int, alpha: float) -> float:
    """``P(bound >= p)`` for ``n`` Bernoulli(p) draws, enumerating the number of zeros."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if p == 0.0:
        return 1.0
    return 1.0 - failure_probability(HalfBernoulliSpec(0.0, p), n, alpha)


def worst_case_table(n: int, alpha: float, k: float = 0.0) -> list[dict]:
    """Per ``j``: worst-case ``p_k``, the implied ``(k, mu)``, and the failure rate."""
    rows = []
    for j in range(1, n + 1):
        pk = worst_case_pk(j, n, alpha)
        rows.append({"j": j, "pk": pk, "k": k, "mu": 1.0 - pk * (1.0 - k),
                     "failure_probability": worst_case_failure(j, n, alpha)})
    return rows
