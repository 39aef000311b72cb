"""Special functions: log-gamma, regularized incomplete beta and its inverse,
Student-t quantiles.

The ``_kernel`` functions are numba-compilable so samplers running inside
jitted loops can call them; the public wrappers validate arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._accel import jit_or_plain

_TINY = 1e-300
_EPS = 2.220446049250313e-16
_CF_MAX_ITER = 20000
_INV_MAX_ITER = 2000


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"beta parameters must be positive, got a={self.a}, b={self.b}")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


@jit_or_plain()
def _log_beta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


@jit_or_plain()
def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


@jit_or_plain()
def betainc_kernel(x, a, b):
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


@jit_or_plain()
def beta_pdf_kernel(x, a, b):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - _log_beta(a, b))


@jit_or_plain()
def _betaincinv_solve(q, a, b):
    """Root of ``I_x(a, b) = q``: Newton steps kept inside a shrinking bracket,
    bisection whenever a step leaves it."""
    lo = 0.0
    hi = 1.0
    x = a / (a + b)
    for _ in range(_INV_MAX_ITER):
        f = betainc_kernel(x, a, b) - q
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        d = beta_pdf_kernel(x, a, b)
        xn = -1.0
        if d > 0.0 and math.isfinite(d):
            xn = x - f / d
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 2.0 * _EPS * max(abs(xn), 1e-290):
            return xn
        if hi - lo <= 2.0 * _EPS * max(hi, 1e-290):
            return xn
        x = xn
    return x


@jit_or_plain()
def betaincinv_kernel(q, a, b):
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return 1.0
    if q > betainc_kernel(0.5, a, b):
        # root above 1/2: solve I_y(b, a) = 1 - q for y = 1 - x, which keeps
        # full relative precision where x itself has none left
        return 1.0 - _betaincinv_solve(1.0 - q, b, a)
    return _betaincinv_solve(q, a, b)


def beta_cdf(x: float, p: BetaParams) -> float:
    """Regularized incomplete beta ``I_x(a, b)``."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    return float(betainc_kernel(float(x), float(p.a), float(p.b)))


def beta_inv_cdf(q: float, p: BetaParams) -> float:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    x = float(betaincinv_kernel(float(q), float(p.a), float(p.b)))
    return min(max(x, 0.0), 1.0)


@jit_or_plain()
def student_t_quantile_kernel(level, dof):
    if level == 0.5:
        return 0.0
    # 1 - level is exact for level >= 0.5, so no precision is lost either way
    tail = 2.0 * (1.0 - level) if level > 0.5 else 2.0 * level
    nu = float(dof)
    if tail < 0.5:
        x = betaincinv_kernel(tail, 0.5 * nu, 0.5)
        t = math.sqrt(nu * (1.0 - x) / x)
    else:
        # near the median x -> 1; solve for 1 - x directly
        y = betaincinv_kernel(1.0 - tail, 0.5, 0.5 * nu)
        t = math.sqrt(nu * y / (1.0 - y))
    return t if level > 0.5 else -t


def student_t_quantile(level: float, dof: int) -> float:
    """``level``-quantile of Student's t with ``dof`` degrees of freedom."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if int(dof) != dof or dof < 1:
        raise ValueError(f"dof must be a positive integer, got {dof}")
    return float(student_t_quantile_kernel(float(level), int(dof)))
