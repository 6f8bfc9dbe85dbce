"""Backend and thread-count selection.

The hot kernels exist twice: a numba version and a pure-numpy version. The
environment variable ``SPIN_RELAX_BACKEND`` (``numba`` or ``numpy``) picks the
default at import time; :func:`set_backend` switches at run time. If numba is
not importable the numpy path is used silently.

``SPIN_RELAX_THREADS`` sets the default numba thread count (0 or unset means
one thread per CPU).
"""
from __future__ import annotations

import os

_THREADS_ENV = "SPIN_RELAX_THREADS"
_BACKEND_ENV = "SPIN_RELAX_BACKEND"


def _env_threads() -> int:
    raw = os.environ.get(_THREADS_ENV, "").strip()
    if not raw:
        return 0
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{_THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{_THREADS_ENV} must be >= 0, got {n}")
    return n


# numba fixes its pool size at first import; leave room for explicit
# oversubscription (scaling benchmarks) without changing the default count.
if "numba" not in __import__("sys").modules and "NUMBA_NUM_THREADS" not in os.environ:
    os.environ["NUMBA_NUM_THREADS"] = str(max(os.cpu_count() or 1, 8, _env_threads()))
if "numba" not in __import__("sys").modules and "NUMBA_THREADING_LAYER" not in os.environ:
    os.environ["NUMBA_THREADING_LAYER"] = "omp"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_backend = os.environ.get(_BACKEND_ENV, "numba" if HAVE_NUMBA else "numpy").strip().lower()
if _backend not in ("numba", "numpy"):
    raise ValueError(f"{_BACKEND_ENV} must be 'numba' or 'numpy', got {_backend!r}")
if _backend == "numba" and not HAVE_NUMBA:
    _backend = "numpy"


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    name = name.lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    _backend = name


def max_threads() -> int:
    if not HAVE_NUMBA:
        return 1
    return int(numba.config.NUMBA_NUM_THREADS)


def set_threads(n: int) -> int:
    """Set the kernel thread count; ``0`` means one per CPU. Returns the count used."""
    if n < 0:
        raise ValueError("thread count must be >= 0")
    if n == 0:
        n = os.cpu_count() or 1
    if not HAVE_NUMBA:
        return 1
    n = min(n, max_threads())
    numba.set_num_threads(n)
    return n


def get_threads() -> int:
    if not HAVE_NUMBA:
        return 1
    return int(numba.get_num_threads())


set_threads(_env_threads())
