"""Numba dispatch.

Set ``MEANBOUND_DISABLE_NUMBA=1`` before import to run every kernel through
its pure-numpy / pure-Python path.  The numpy flavours are always
importable; the numba flavours exist whenever numba is enabled, so
benchmarks and agreement tests can call each one explicitly.
"""

import os

_FLAG = os.environ.get("MEANBOUND_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _FLAG not in ("", "0", "false", "no")

# The bundled TBB is often too old for numba and triggers a warning on every
# parallel call; prefer the built-in workqueue layer unless the user chose one.
_USER_LAYER = "NUMBA_THREADING_LAYER" in os.environ
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

if _numba is not None and not _USER_LAYER:
    # numba may have been imported (and configured) before this module
    _numba.config.THREADING_LAYER = "workqueue"

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not DISABLED_BY_ENV


def _identity(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


if NUMBA_AVAILABLE:
    njit = _numba.njit
    prange = _numba.prange
else:  # pragma: no cover
    njit = _identity
    prange = range


def jit_or_plain(parallel=False):
    """Compile with numba when enabled, otherwise return the function unchanged."""
    def deco(f):
        if USE_NUMBA:
            return njit(cache=True, parallel=parallel)(f)
        return f
    return deco


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
