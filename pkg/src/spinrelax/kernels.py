"""Hot kernel: signed log of a product of cosines.

For a fixed vector of angular frequencies ``a`` and a grid of times ``t`` the
kernel returns, per time point,

    sign[n]   = prod_k sgn(cos(a_k t_n))          in {-1, 0, +1}
    logmag[n] = sum_k log|cos(a_k t_n)|            (-inf when sign == 0)

Every correlator in the library reduces to one or two calls of this kernel,
and for lattices with 10**5 - 10**6 sites it dominates the run time.

Two implementations are provided and must agree:

* ``log_cos_product_numba``: compiled, parallel over time points. Cosines are
  evaluated by an inlined Cody-Waite reduction plus Taylor polynomial (accurate
  to ~1 ulp for ``|a t| < 1e5``; larger arguments fall back to libm), and the
  product is accumulated linearly in blocks of 64 factors so ``log`` is called
  once per block instead of once per factor.
* ``log_cos_product_numpy``: plain numpy with libm ``cos`` and one ``log`` per
  factor, processed in memory-bounded tiles.

:func:`log_cos_product` dispatches according to :mod:`spinrelax._backend`.
"""
from __future__ import annotations

import math

import numpy as np

from . import _backend

_BLOCK = 64
# below this floor a block product could have lost digits to underflow
_BLOCK_FLOOR = 1e-280
POLY_ARG_LIMIT = 1e5

# pi/2 split into two 33-bit heads and a tail (fdlibm constants)
_PIO2_1 = 1.57079632673412561417e00
_PIO2_2 = 6.07710050630396597660e-11
_PIO2_2T = 2.02226624879595063154e-21
_TWO_OVER_PI = 6.36619772367581382433e-01
_ROUND_MAGIC = 6755399441055744.0  # 1.5 * 2**52

_C = tuple((-1.0) ** k / math.factorial(2 * k) for k in range(1, 9))
_S = tuple((-1.0) ** k / math.factorial(2 * k + 1) for k in range(1, 8))


def _cos_poly(x):
    n = (x * _TWO_OVER_PI + _ROUND_MAGIC) - _ROUND_MAGIC
    r = ((x - n * _PIO2_1) - n * _PIO2_2) - n * _PIO2_2T
    z = r * r
    c = 1.0 + z * (_C[0] + z * (_C[1] + z * (_C[2] + z * (_C[3] + z * (
        _C[4] + z * (_C[5] + z * (_C[6] + z * _C[7])))))))
    s = r * (1.0 + z * (_S[0] + z * (_S[1] + z * (_S[2] + z * (_S[3] + z * (
        _S[4] + z * (_S[5] + z * _S[6])))))))
    q = np.int64(n) & 3
    v = c if (q & 1) == 0 else s
    return -v if (q == 1 or q == 2) else v


def _fold(p, buf, count, state):
    """Fold a block product ``p`` of ``buf[:count]`` into ``state``.

    ``state = [logmag, negatives, zero]``. Falls back to per-factor logs when
    the block product is too small to trust.
    """
    if abs(p) > _BLOCK_FLOOR:
        state[0] += math.log(abs(p))
        if p < 0.0:
            state[1] += 1.0
        return
    for m in range(count):
        v = buf[m]
        if v == 0.0:
            state[2] = 1.0
        else:
            state[0] += math.log(abs(v))
            if v < 0.0:
                state[1] += 1.0


def _block_product(buf):
    p0 = p1 = p2 = p3 = p4 = p5 = p6 = p7 = 1.0
    for m in range(0, _BLOCK, 8):
        p0 *= buf[m]
        p1 *= buf[m + 1]
        p2 *= buf[m + 2]
        p3 *= buf[m + 3]
        p4 *= buf[m + 4]
        p5 *= buf[m + 5]
        p6 *= buf[m + 6]
        p7 *= buf[m + 7]
    return ((p0 * p1) * (p2 * p3)) * ((p4 * p5) * (p6 * p7))


def _kernel_poly(a, ts, logmag, sign):
    n_a = a.size
    n_full = n_a // _BLOCK
    for it in _prange(ts.size):
        t = ts[it]
        buf = np.empty(_BLOCK)
        state = np.zeros(3)
        for b in range(n_full):
            base = b * _BLOCK
            for m in range(_BLOCK):
                buf[m] = _cos_poly_jit(a[base + m] * t)
            _fold_jit(_block_product_jit(buf), buf, _BLOCK, state)
        rest = n_a - n_full * _BLOCK
        p = 1.0
        for m in range(rest):
            buf[m] = _cos_poly_jit(a[n_full * _BLOCK + m] * t)
            p *= buf[m]
        _fold_jit(p, buf, rest, state)
        _finish(state, logmag, sign, it)


def _kernel_libm(a, ts, logmag, sign):
    n_a = a.size
    n_full = n_a // _BLOCK
    for it in _prange(ts.size):
        t = ts[it]
        buf = np.empty(_BLOCK)
        state = np.zeros(3)
        for b in range(n_full):
            base = b * _BLOCK
            for m in range(_BLOCK):
                buf[m] = math.cos(a[base + m] * t)
            _fold_jit(_block_product_jit(buf), buf, _BLOCK, state)
        rest = n_a - n_full * _BLOCK
        p = 1.0
        for m in range(rest):
            buf[m] = math.cos(a[n_full * _BLOCK + m] * t)
            p *= buf[m]
        _fold_jit(p, buf, rest, state)
        _finish(state, logmag, sign, it)


def _finish_py(state, logmag, sign, it):
    if state[2] != 0.0:
        logmag[it] = -np.inf
        sign[it] = 0
    else:
        logmag[it] = state[0]
        sign[it] = -1 if (np.int64(state[1]) & 1) else 1


if _backend.HAVE_NUMBA:
    import numba

    _prange = numba.prange
    _cos_poly_jit = numba.njit(inline="always", cache=True)(_cos_poly)
    _fold_jit = numba.njit(inline="always", cache=True)(_fold)
    _block_product_jit = numba.njit(inline="always", cache=True)(_block_product)
    _finish = numba.njit(inline="always", cache=True)(_finish_py)
    # refer to the jitted helpers through module globals
    _kernel_poly_nb = numba.njit(parallel=True, cache=True)(_kernel_poly)
    _kernel_libm_nb = numba.njit(parallel=True, cache=True)(_kernel_libm)
else:  # pragma: no cover
    _prange = range
    _cos_poly_jit = _cos_poly
    _fold_jit = _fold
    _block_product_jit = _block_product
    _finish = _finish_py
    _kernel_poly_nb = _kernel_libm_nb = None


def _prepare(a, ts):
    a = np.ascontiguousarray(a, dtype=np.float64).ravel()
    # ascontiguousarray would promote a 0-d grid to 1-d
    ts = np.array(ts, dtype=np.float64, order="C", ndmin=0)
    return a, ts


def log_cos_product_numba(a, ts):
    """Numba implementation; see module docstring. ``ts`` may have any shape."""
    if not _backend.HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    a, ts = _prepare(a, ts)
    flat = np.ascontiguousarray(ts.ravel())
    logmag = np.empty(flat.size)
    sign = np.empty(flat.size, dtype=np.int8)
    if flat.size and a.size:
        biggest = float(np.max(np.abs(a))) * float(np.max(np.abs(flat)))
        kernel = _kernel_poly_nb if biggest < POLY_ARG_LIMIT else _kernel_libm_nb
        kernel(a, flat, logmag, sign)
    else:
        logmag[:] = 0.0
        sign[:] = 1
    return sign.reshape(ts.shape), logmag.reshape(ts.shape)


def log_cos_product_numpy(a, ts, tile=1 << 21):
    """Reference numpy implementation; see module docstring."""
    a, ts = _prepare(a, ts)
    flat = ts.ravel()
    logmag = np.zeros(flat.size)
    sign = np.ones(flat.size, dtype=np.int8)
    if a.size == 0:
        return sign.reshape(ts.shape), logmag.reshape(ts.shape)
    step = max(1, tile // a.size)
    with np.errstate(divide="ignore"):
        for lo in range(0, flat.size, step):
            c = np.cos(np.multiply.outer(flat[lo:lo + step], a))
            zero = (c == 0.0).any(axis=1)
            neg = np.count_nonzero(c < 0.0, axis=1) & 1
            lm = np.log(np.abs(c)).sum(axis=1)
            sign[lo:lo + step] = np.where(zero, 0, 1 - 2 * neg)
            logmag[lo:lo + step] = np.where(zero, -np.inf, lm)
    return sign.reshape(ts.shape), logmag.reshape(ts.shape)


def log_cos_product(a, ts):
    """Signed log of ``prod_k cos(a_k t)`` on the active backend."""
    if _backend.get_backend() == "numba":
        return log_cos_product_numba(a, ts)
    return log_cos_product_numpy(a, ts)
