"""Hot loops, each in a numba flavour and a pure-numpy flavour.

The unsuffixed names are the ones the rest of the package calls; they point
at the numba versions unless ``MEANBOUND_DISABLE_NUMBA`` is set.  Both
flavours use the same counter-based streams (see :mod:`meanbound.rng`) and
sum left to right, so the Monte Carlo and bootstrap kernels give identical
bits; the exact bound differs only in the table evaluation order.

Parallel kernels write each repetition / row to its own slot and never
reduce across threads, so results do not depend on the thread count.
"""

from __future__ import annotations

import numpy as np

from . import rng, special
from ._accel import USE_NUMBA, njit, prange

# ---------------------------------------------------------------------------
# Fraction of the order-statistic simplex above a hyperplane
#
# In spacings coordinates v_i = u_i - u_{i-1} (i = 1..n+1, sum v = 1) the
# statistic u . s equals sum_i c_i v_i with c_i = 1 - z_i and c_{n+1} = 0,
# and v is uniform on the probability simplex.  Writing a_i = c_i - t,
#
#     P(sum a_i v_i > 0) = [a_1, ..., a_{n+1}] x_+^n      (divided difference)
#
# Split the nodes into positives x_1..x_p and non-positives -y_1..-y_q.  With
# g(i, j) the divided difference over the first i positives and j
# non-positives, Leibniz' rule gives the convex recursion
#
#     g(i, j) = (x_i g(i, j-1) + y_j g(i-1, j)) / (x_i + y_j),
#     g(i, 0) = 1,  g(0, j) = 0,
#
# which is Varsi's algorithm.  No differences of nearly equal nodes are ever
# formed, so repeated sample values need no special handling.
# ---------------------------------------------------------------------------


def _upper_fraction_py(c, t):
    if t <= 0.0:
        return 1.0
    n = c.shape[0]
    p = 0
    for i in range(n):
        if c[i] > t:
            p += 1
    if p == 0:
        return 0.0
    q = n + 1 - p
    x = np.empty(p)
    y = np.empty(q)
    ip = 0
    iq = 0
    for i in range(n):
        a = c[i] - t
        if a > 0.0:
            x[ip] = a
            ip += 1
        else:
            y[iq] = -a
            iq += 1
    y[iq] = t
    g = np.zeros(q + 1)
    for i in range(p):
        xi = x[i]
        g[0] = 1.0
        for j in range(1, q + 1):
            yj = y[j - 1]
            g[j] = (xi * g[j - 1] + yj * g[j]) / (xi + yj)
    return g[q]


def upper_fraction_numpy(c, t):
    """Same recursion, vectorized along anti-diagonals of the (p+1, q+1) table."""
    if t <= 0.0:
        return 1.0
    a = np.append(np.asarray(c, dtype=np.float64), 0.0) - t
    x = a[a > 0.0]
    y = -a[a <= 0.0]
    p, q = x.size, y.size
    if p == 0:
        return 0.0
    g = np.zeros((p + 1, q + 1))
    g[1:, 0] = 1.0
    for d in range(2, p + q + 1):
        i = np.arange(max(1, d - q), min(p, d - 1) + 1)
        j = d - i
        xi = x[i - 1]
        yj = y[j - 1]
        g[i, j] = (xi * g[i, j - 1] + yj * g[i - 1, j]) / (xi + yj)
    return float(g[p, q])


# ---------------------------------------------------------------------------
# Exact bound: smallest mu with P(u . s >= 1 - mu) >= 1 - alpha, by bisection
# ---------------------------------------------------------------------------


def _make_bisect(fraction):
    def bisect(c, z1, alpha, tol, maxiter):
        target = 1.0 - alpha
        lo = z1
        hi = 1.0
        if hi - lo <= tol:
            return hi, 0, True
        for it in range(1, maxiter + 1):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                return hi, it, False
            if fraction(c, 1.0 - mid) >= target:
                hi = mid
            else:
                lo = mid
            if hi - lo <= tol:
                return hi, it, True
        return hi, maxiter, False
    return bisect


exact_bound_numpy = _make_bisect(upper_fraction_numpy)


def exact_bounds_rows_numpy(z_rows, alphas, tol, maxiter):
    out = np.empty((z_rows.shape[0], alphas.shape[0]))
    ok = True
    for r in range(z_rows.shape[0]):
        c = 1.0 - z_rows[r]
        for k in range(alphas.shape[0]):
            v, _, conv = exact_bound_numpy(c, z_rows[r, 0], alphas[k], tol, maxiter)
            out[r, k] = v
            ok = ok and conv
    return out, ok


# ---------------------------------------------------------------------------
# Monte Carlo induced means (Algorithm 1): repetition i uses stream (seed, i)
# ---------------------------------------------------------------------------

_MC_CHUNK = 1 << 15


def mc_means_numpy(s, seed, l):
    s = np.asarray(s, dtype=np.float64)
    n = s.size
    ms = np.empty(l)
    for start in range(0, l, _MC_CHUNK):
        stop = min(start + _MC_CHUNK, l)
        keys = rng.stream_keys_array(seed, np.arange(start, stop))
        u = rng.uniforms_array(keys, n)
        u.sort(axis=1)
        # sequential sum, matching the compiled loop bit for bit
        ms[start:stop] = 1.0 - np.cumsum(u * s, axis=1)[:, -1]
    return ms


def mc_bounds_rows_numpy(z_rows, alphas, seeds, l):
    out = np.empty((z_rows.shape[0], alphas.shape[0]))
    for r in range(z_rows.shape[0]):
        s = np.diff(z_rows[r], append=1.0)
        ms = np.sort(mc_means_numpy(s, seeds[r], l))
        for k in range(alphas.shape[0]):
            out[r, k] = ms[_qindex(1.0 - alphas[k], l) - 1]
    return out


def _qindex(level, count):
    # one-based ceil(level * count) with a guard against representation error
    k = int(np.ceil(level * count - 1e-9))
    if k < 1:
        k = 1
    if k > count:
        k = count
    return k


# ---------------------------------------------------------------------------
# Bootstrap resample means: resample b draws indices from stream (seed, b)
# ---------------------------------------------------------------------------


def bootstrap_means_numpy(x, seed, b):
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    keys = rng.stream_keys_array(seed, np.arange(b))
    idx = np.minimum((rng.uniforms_array(keys, n) * n).astype(np.int64), n - 1)
    return np.cumsum(x[idx], axis=1)[:, -1] / n


def bootstrap_means_rows_numpy(x_rows, seeds, b):
    out = np.empty((x_rows.shape[0], b))
    for r in range(x_rows.shape[0]):
        out[r] = bootstrap_means_numpy(x_rows[r], seeds[r], b)
    return out


def beta_ppf_numpy(u, a, b):
    """Inverse-CDF transform of an array of uniforms (elementwise Python loop)."""
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    flat_u = u.ravel()
    flat_out = out.ravel()
    for i in range(flat_u.size):
        flat_out[i] = special.betaincinv_kernel(flat_u[i], a, b)
    return out


# ---------------------------------------------------------------------------
# Numba flavours (only defined when numba is in use, so nothing is compiled
# under MEANBOUND_DISABLE_NUMBA)
# ---------------------------------------------------------------------------

if USE_NUMBA:
    upper_fraction_numba = njit(cache=True)(_upper_fraction_py)
    exact_bound_numba = njit(cache=True)(_make_bisect(upper_fraction_numba))

    @njit(cache=True, parallel=True)
    def exact_bounds_rows_numba(z_rows, alphas, tol, maxiter):
        rows = z_rows.shape[0]
        m = alphas.shape[0]
        out = np.empty((rows, m))
        conv = np.ones(rows, dtype=np.bool_)
        for r in prange(rows):
            c = 1.0 - z_rows[r]
            for k in range(m):
                v, _, ok = exact_bound_numba(c, z_rows[r, 0], alphas[k], tol, maxiter)
                out[r, k] = v
                if not ok:
                    conv[r] = False
        return out, conv.all()

    @njit(cache=True)
    def _insertion_sort(u):
        for j in range(1, u.shape[0]):
            v = u[j]
            k = j - 1
            while k >= 0 and u[k] > v:
                u[k + 1] = u[k]
                k -= 1
            u[k + 1] = v

    @njit(cache=True)
    def _mc_fill(s, seed, start, stop, ms):
        n = s.shape[0]
        u = np.empty(n)
        for i in range(start, stop):
            key = rng.stream_key(seed, i)
            for j in range(n):
                u[j] = rng.draw_uniform(key, j)
            if n <= 48:
                _insertion_sort(u)
            else:
                u.sort()
            acc = 0.0
            for j in range(n):
                acc += u[j] * s[j]
            ms[i] = 1.0 - acc

    @njit(cache=True, parallel=True)
    def mc_means_numba(s, seed, l):
        ms = np.empty(l)
        blocks = (l + 4095) // 4096
        for blk in prange(blocks):
            start = blk * 4096
            stop = min(start + 4096, l)
            _mc_fill(s, seed, start, stop, ms)
        return ms

    @njit(cache=True, parallel=True)
    def mc_bounds_rows_numba(z_rows, alphas, seeds, l):
        rows = z_rows.shape[0]
        n = z_rows.shape[1]
        m = alphas.shape[0]
        out = np.empty((rows, m))
        for r in prange(rows):
            s = np.empty(n)
            for j in range(n - 1):
                s[j] = z_rows[r, j + 1] - z_rows[r, j]
            s[n - 1] = 1.0 - z_rows[r, n - 1]
            ms = np.empty(l)
            _mc_fill(s, seeds[r], 0, l, ms)
            ms.sort()
            for k in range(m):
                out[r, k] = ms[_qindex_nb(1.0 - alphas[k], l) - 1]
        return out

    @njit(cache=True)
    def _qindex_nb(level, count):
        k = int(np.ceil(level * count - 1e-9))
        if k < 1:
            k = 1
        if k > count:
            k = count
        return k

    @njit(cache=True)
    def _boot_fill(x, seed, start, stop, out):
        n = x.shape[0]
        for b in range(start, stop):
            key = rng.stream_key(seed, b)
            acc = 0.0
            for j in range(n):
                k = int(rng.draw_uniform(key, j) * n)
                if k >= n:
                    k = n - 1
                acc += x[k]
            out[b] = acc / n

    @njit(cache=True, parallel=True)
    def bootstrap_means_numba(x, seed, b):
        out = np.empty(b)
        blocks = (b + 1023) // 1024
        for blk in prange(blocks):
            start = blk * 1024
            _boot_fill(x, seed, start, min(start + 1024, b), out)
        return out

    @njit(cache=True, parallel=True)
    def bootstrap_means_rows_numba(x_rows, seeds, b):
        rows = x_rows.shape[0]
        out = np.empty((rows, b))
        for r in prange(rows):
            _boot_fill(x_rows[r], seeds[r], 0, b, out[r])
        return out


    @njit(cache=True, parallel=True)
    def _beta_ppf_flat(u, a, b, out):
        for i in prange(u.shape[0]):
            out[i] = special.betaincinv_kernel(u[i], a, b)

    def beta_ppf_numba(u, a, b):
        u = np.ascontiguousarray(u, dtype=np.float64)
        out = np.empty_like(u)
        _beta_ppf_flat(u.ravel(), float(a), float(b), out.ravel())
        return out


if USE_NUMBA:
    upper_fraction = upper_fraction_numba
    exact_bound = exact_bound_numba
    exact_bounds_rows = exact_bounds_rows_numba
    mc_means = mc_means_numba
    mc_bounds_rows = mc_bounds_rows_numba
    bootstrap_means = bootstrap_means_numba
    bootstrap_means_rows = bootstrap_means_rows_numba
    beta_ppf = beta_ppf_numba
else:
    upper_fraction = upper_fraction_numpy
    exact_bound = exact_bound_numpy
    exact_bounds_rows = exact_bounds_rows_numpy
    mc_means = mc_means_numpy
    mc_bounds_rows = mc_bounds_rows_numpy
    bootstrap_means = bootstrap_means_numpy
    bootstrap_means_rows = bootstrap_means_rows_numpy
    beta_ppf = beta_ppf_numpy
