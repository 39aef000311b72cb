"""Counter-based uniform generator, ``smx64`` version 1.

Every draw is a pure function of ``(seed, stream, counter)``::

    base   = mix(seed ^ SEED_SALT)
    key    = mix(base + (stream + 1) * STREAM_GAMMA)
    draw_k = mix(key + (k + 1) * GOLDEN_GAMMA)
    u_k    = (draw_k >> 11) * 2**-53            # in [0, 1)

``mix`` is the SplitMix64 finalizer.  Streams are independent of the order in
which they are evaluated, so Monte Carlo repetitions, bootstrap resamples and
simulation trials can be computed in any order or in parallel and still give
bit-identical results.  The scalar functions below are numba-compilable; the
``*_array`` variants are their vectorized numpy twins and produce the same bits.
Compiled scalars return plain Python ints; wrap keys in ``np.uint64`` before
passing them back in from Python.
"""

import numpy as np

from ._accel import USE_NUMBA, jit_or_plain

GENERATOR_NAME = "smx64"
GENERATOR_VERSION = 1

_MASK = (1 << 64) - 1
SEED_SALT = np.uint64(0x6A09E667F3BCC909)
STREAM_GAMMA = np.uint64(0xD1B54A32D192ED03)
GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


def as_seed(seed) -> np.uint64:
    """Fold any Python int (negative or > 64 bits) into a uint64 seed."""
    return np.uint64(int(seed) & _MASK)


@jit_or_plain()
def _mix64_kernel(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


if USE_NUMBA:
    mix64 = _mix64_kernel
else:
    def mix64(z):
        # uint64 wraparound is intended
        with np.errstate(over="ignore"):
            return _mix64_kernel(np.uint64(z))


@jit_or_plain()
def _add_mul_kernel(a, b, c):
    return a + b * c


if USE_NUMBA:
    _wrap_add_mul = _add_mul_kernel
else:
    def _wrap_add_mul(a, b, c):
        with np.errstate(over="ignore"):
            return _add_mul_kernel(np.uint64(a), np.uint64(b), np.uint64(c))


@jit_or_plain()
def stream_key(seed, stream):
    # explicit casts: numba hands uint64 results back as Python ints, which
    # would otherwise be typed int64 and promote to float in mixed arithmetic
    base = mix64(np.uint64(seed) ^ SEED_SALT)
    return mix64(_wrap_add_mul(base, np.uint64(stream) + _ONE, STREAM_GAMMA))


@jit_or_plain()
def draw_u64(key, counter):
    return mix64(_wrap_add_mul(np.uint64(key), np.uint64(counter) + _ONE, GOLDEN_GAMMA))


@jit_or_plain()
def draw_uniform(key, counter):
    return np.float64(draw_u64(key, counter) >> _S11) * _INV53


def _mix64_array(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_keys_array(seed, streams) -> np.ndarray:
    """Keys for a vector of stream indices (numpy twin of :func:`stream_key`)."""
    streams = np.asarray(streams, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = _mix64_array(np.array([as_seed(seed) ^ SEED_SALT], dtype=np.uint64))[0]
        return _mix64_array(base + (streams + _ONE) * STREAM_GAMMA)


def uniforms_array(keys, count: int) -> np.ndarray:
    """``(len(keys), count)`` block of uniforms; row r uses counters 0..count-1 of key r."""
    keys = np.asarray(keys, dtype=np.uint64).reshape(-1, 1)
    counters = np.arange(count, dtype=np.uint64).reshape(1, -1)
    with np.errstate(over="ignore"):
        bits = _mix64_array(keys + (counters + _ONE) * GOLDEN_GAMMA)
    return (bits >> _S11).astype(np.float64) * _INV53


def uniforms(seed, stream: int, count: int) -> np.ndarray:
    """Convenience: ``count`` uniforms from one stream."""
    return uniforms_array(stream_keys_array(seed, [stream]), count)[0]


def derive_seed(seed, stream: int) -> np.uint64:
    """A fresh uint64 seed for a nested stochastic computation."""
    key = stream_keys_array(seed, [stream])
    with np.errstate(over="ignore"):
        return _mix64_array(key + GOLDEN_GAMMA)[0]
