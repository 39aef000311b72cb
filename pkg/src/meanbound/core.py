"""Order-statistic primitives and the induced mean of ordered CDF pairs.

A sample ``z`` sorted ascending is paired with a non-decreasing vector ``u``
in [0, 1].  The stairstep CDF through the points ``(z_i, u_i)`` that pushes
all mass as far right as possible has mean

    m(z, u) = 1 - sum_i u_i (z_{i+1} - z_i),   z_{n+1} = 1,

which is the quantity every bound in this package is built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfidenceSpec:
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")

    @property
    def level(self) -> float:
        return 1.0 - self.alpha


def _as_vector(x, name="x") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


def order_statistics(x) -> np.ndarray:
    """Sort a sample in [0, 1] ascending.

    Raises ``ValueError`` for an empty sample or any value outside [0, 1];
    data on another interval must be rescaled by the caller first.
    """
    arr = _as_vector(x)
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("sample values must lie in [0, 1]; rescale first")
    return np.sort(arr)


def spacings(z) -> np.ndarray:
    """Successive differences ``z_{i+1} - z_i`` with the sentinel ``z_{n+1} = 1``."""
    z = np.asarray(z, dtype=np.float64)
    return np.diff(z, append=1.0)


def induced_mean(z, u) -> float:
    """Mean of the conservative completion of the pairs ``(z_i, u_i)``."""
    z = np.asarray(z, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if z.shape != u.shape:
        raise ValueError(f"length mismatch: len(z)={z.size}, len(u)={u.size}")
    return float(1.0 - np.dot(u, spacings(z)))


def induced_mean_horizontal(z, u) -> float:
    """Same quantity summed over horizontal strips, ``sum z_i (u_i - u_{i-1})``."""
    z = np.asarray(z, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if z.shape != u.shape:
        raise ValueError(f"length mismatch: len(z)={z.size}, len(u)={u.size}")
    z_ext = np.append(z, 1.0)
    du = np.diff(np.concatenate(([0.0], u, [1.0])))
    return float(np.dot(z_ext, du))


def conservative_cdf(z, u, t: float) -> float:
    """Value at ``t`` of the right-continuous stairstep CDF through ``(z_i, u_i)``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t}")
    if t >= 1.0:
        return 1.0
    z = np.asarray(z, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    k = int(np.searchsorted(z, t, side="right"))
    return 0.0 if k == 0 else float(u[k - 1])


def quantile_index(level: float, count: int) -> int:
    """One-based index ``ceil(level * count)`` clamped to ``[1, count]``.

    The product is nudged down by 1e-9 before rounding up so representation
    error (``0.95 * 100 == 95.00000000000001``) cannot skip an order statistic.
    """
    k = math.ceil(level * count - 1e-9)
    return min(max(k, 1), count)


def empirical_quantile(values, level: float) -> float:
    """Order-statistic quantile used throughout: ascending sort, element ``ceil(level * l)``."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("values is empty")
    if not 0.0 < level <= 1.0:
        raise ValueError(f"level must be in (0, 1], got {level}")
    if level == 1.0:
        return float(arr.max())
    k = quantile_index(level, arr.size)
    return float(np.partition(arr, k - 1)[k - 1])
