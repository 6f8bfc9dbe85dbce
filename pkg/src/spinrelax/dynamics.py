"""Exact time evolution of one-, two- and three-spin correlators.

The Hamiltonian is

    H = - sum_{i<j} J_ij sz_i sz_j - B sum_i sz_i          (hbar = 1)

and the initial state is any density operator diagonal in the sigma^x
product basis. For such states every correlator below is a moment of the
initial state times a product of cosines, e.g. with

    Pminus(t) = prod_{k != i,j} cos(2 (J_ki - J_kj) t)
    Pplus(t)  = prod_{k != i,j} cos(2 (J_ki + J_kj) t)

one has <x_i x_j>(t) = s_ij/2 * (Pminus + cos(4Bt) Pplus). Products are
accumulated in log space (:class:`~spinrelax.signedlog.SignedLogValue`) and
only linearised at the API boundary, so values far below 1e-300 survive in
series form.

Sign conventions follow from the Hamiltonian above and are pinned by the
brute-force checks in :mod:`spinrelax.oracle`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .kernels import log_cos_product
from .lattice import CouplingMatrix
from .signedlog import SignedLogValue, from_kernel

OBSERVABLES = ("xx", "yy", "xy", "xz", "yz", "zz", "x", "y", "Pplus", "Pminus", "Pz", "ppp")
_ARITY = {"xx": 2, "yy": 2, "xy": 2, "xz": 2, "yz": 2, "zz": 2, "x": 1, "y": 1,
          "Pplus": 2, "Pminus": 2, "Pz": 2, "ppp": 3}


class InitialMoments:
    """x-moments of an initial state diagonal in the sigma^x product basis.

    Only the moments the formulas consume are stored:

    * ``sx``: per-site <x_i>, shape ``(N,)``
    * ``sxx``: ``None`` (product state, s_ij = s_i s_j), a scalar (same value
      for every pair) or a symmetric ``(N, N)`` array
    * ``sxxx``: ``None`` (product rule), a scalar, or a mapping from sorted
      index triples to values
    """

    def __init__(self, sx, sxx=None, sxxx=None):
        sx = np.array(sx, dtype=np.float64).ravel()
        _check_unit(sx, "sx")
        self.sx = sx
        if sxx is not None and np.ndim(sxx) == 2:
            sxx = np.array(sxx, dtype=np.float64)
            if sxx.shape != (sx.size, sx.size):
                raise InvalidArgumentError(f"sxx must have shape {(sx.size, sx.size)}")
            if not np.allclose(sxx, sxx.T, rtol=0, atol=1e-14):
                raise InvalidArgumentError("sxx must be symmetric")
            _check_unit(sxx, "sxx")
        elif sxx is not None:
            sxx = float(sxx)
            _check_unit(np.array([sxx]), "sxx")
        self._sxx = sxx
        if isinstance(sxxx, dict):
            sxxx = {tuple(sorted(k)): float(v) for k, v in sxxx.items()}
            _check_unit(np.array(list(sxxx.values()) or [0.0]), "sxxx")
        elif sxxx is not None:
            sxxx = float(sxxx)
            _check_unit(np.array([sxxx]), "sxxx")
        self._sxxx = sxxx

    @classmethod
    def uniform(cls, N: int, sx: float = 1.0, sxx: float | None = None,
                sxxx: float | None = None) -> InitialMoments:
        """Same moments on every site/pair/triple; defaults follow the product rule."""
        sxx = sx * sx if sxx is None else sxx
        sxxx = sx ** 3 if sxxx is None else sxxx
        return cls(np.full(N, float(sx)), sxx, sxxx)

    @property
    def N(self) -> int:
        return self.sx.size

    def x(self, i: int) -> float:
        return float(self.sx[i])

    def xx(self, i: int, j: int) -> float:
        if i == j:
            return 1.0
        if self._sxx is None:
            return float(self.sx[i] * self.sx[j])
        if isinstance(self._sxx, float):
            return self._sxx
        return float(self._sxx[i, j])

    def xxx(self, i: int, j: int, k: int) -> float:
        if self._sxxx is None:
            return float(self.sx[i] * self.sx[j] * self.sx[k])
        if isinstance(self._sxxx, float):
            return self._sxxx
        key = tuple(sorted((i, j, k)))
        if key not in self._sxxx:
            raise InvalidArgumentError(f"no third moment stored for sites {key}")
        return self._sxxx[key]

    def scaled(self, factor: float) -> InitialMoments:
        """Same first moments, pair moments multiplied by ``factor``."""
        N = self.N
        sxx = np.array([[self.xx(i, j) * factor if i != j else 0.0 for j in range(N)] for i in range(N)])
        return InitialMoments(self.sx, sxx, self._sxxx)


def _check_unit(arr, name):
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > 1.0 + 1e-12):
        raise InvalidArgumentError(f"{name} moments must lie in [-1, 1]")


def _check_pair(c: CouplingMatrix, *sites):
    for s in sites:
        if not (0 <= s < c.N):
            raise InvalidArgumentError(f"site index {s} out of range for N={c.N}")
    if len(set(sites)) != len(sites):
        raise InvalidArgumentError(f"sites must be distinct, got {sites}")


def _as_times(t):
    ts = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(ts)):
        raise InvalidArgumentError("times must be finite")
    return ts


def _product(freqs, t) -> SignedLogValue:
    sign, logmag = log_cos_product(freqs, _as_times(t))
    return from_kernel(sign, logmag)


def _exclude(row, *sites):
    keep = np.ones(row.size, dtype=bool)
    keep[list(sites)] = False
    return row[keep]


def pair_frequencies(c: CouplingMatrix, i: int, j: int, sign: int) -> np.ndarray:
    """``2 (J_ki +/- J_kj)`` for all ``k != i, j``."""
    _check_pair(c, i, j)
    Ji, Jj = c.row(i), c.row(j)
    return 2.0 * _exclude(Ji + sign * Jj, i, j)


def p_plus(c: CouplingMatrix, i: int, j: int, t) -> SignedLogValue:
    """Bare product prod_{k != i,j} cos(2 (J_ki + J_kj) t); no moment prefactor."""
    return _product(pair_frequencies(c, i, j, +1), t)


def p_minus(c: CouplingMatrix, i: int, j: int, t) -> SignedLogValue:
    """Bare product prod_{k != i,j} cos(2 (J_ki - J_kj) t)."""
    return _product(pair_frequencies(c, i, j, -1), t)


def _site_product(c, i, t, *excluded):
    return _product(2.0 * _exclude(c.row(i), i, *excluded), t)


def _scale(value: SignedLogValue, factor) -> SignedLogValue:
    return value * SignedLogValue.from_linear(factor)


# --- log-domain building blocks (series form) ---------------------------------

def _xx_yy(m, c, i, j, t, B, sign):
    t = _as_times(t)
    pm = p_minus(c, i, j, t)
    pp = p_plus(c, i, j, t)
    total = pm + sign * _scale(pp, np.cos(4.0 * B * t))
    return _scale(total, 0.5 * m.xx(i, j))


def _xy(m, c, i, j, t, B):
    t = _as_times(t)
    return _scale(p_plus(c, i, j, t), -0.5 * m.xx(i, j) * np.sin(4.0 * B * t))


def _pz(m, c, i, j, t):
    _check_pair(c, i, j)
    t = _as_times(t)
    core = _site_product(c, i, t, j)
    return _scale(core, -m.x(i) * np.sin(2.0 * t * c[i, j]))


def _one_spin(m, c, i, t, B, component):
    if not (0 <= i < c.N):
        raise InvalidArgumentError(f"site index {i} out of range for N={c.N}")
    t = _as_times(t)
    core = _site_product(c, i, t)
    phase = np.cos(2.0 * B * t) if component == "x" else -np.sin(2.0 * B * t)
    return _scale(core, m.x(i) * phase)


def _ppp_core(m, c, i, j, k, t):
    _check_pair(c, i, j, k)
    row = c.row(i) + c.row(j) + c.row(k)
    core = _product(2.0 * _exclude(row, i, j, k), t)
    return _scale(core, m.xxx(i, j, k) / 8.0)


# --- public linear-valued correlators -----------------------------------------

def corr_xx(m: InitialMoments, c: CouplingMatrix, i: int, j: int, t, B: float = 0.0):
    return _xx_yy(m, c, i, j, t, B, +1).to_linear()


def corr_yy(m: InitialMoments, c: CouplingMatrix, i: int, j: int, t, B: float = 0.0):
    return _xx_yy(m, c, i, j, t, B, -1).to_linear()


def corr_xy(m: InitialMoments, c: CouplingMatrix, i: int, j: int, t, B: float = 0.0):
    """<x_i y_j>(t) = -sin(4Bt) s_ij/2 Pplus; symmetric under i <-> j."""
    return _xy(m, c, i, j, t, B).to_linear()


def p_z(m: InitialMoments, c: CouplingMatrix, i: int, j: int, t):
    """-s_i sin(2 t J_ij) prod_{k != i,j} cos(2 t J_ik)."""
    return _pz(m, c, i, j, t).to_linear()


def corr_xz(m: InitialMoments, c: CouplingMatrix, i: int, j: int, t, B: float = 0.0):
    """<x_i z_j>(t) = sin(2Bt) Pz."""
    t = _as_times(t)
    return _scale(_pz(m, c, i, j, t), np.sin(2.0 * B * t)).to_linear()


def corr_yz(m: InitialMoments, c: CouplingMatrix, i: int, j: int, t, B: float = 0.0):
    """<y_i z_j>(t) = cos(2Bt) Pz.

    At B = 0 this is ``-s_i sin(2tJ_ij) prod cos(2tJ_ik)``; the minus sign is
    confirmed by brute-force evolution for the Hamiltonian in the module
    docstring.
    """
    t = _as_times(t)
    return _scale(_pz(m, c, i, j, t), np.cos(2.0 * B * t)).to_linear()


def corr_zz(i: int = 0, j: int = 1, t=0.0):
    """<z_i z_j>(t) vanishes identically for initial states diagonal in sigma^x."""
    return np.zeros(np.shape(t)) if np.ndim(t) else 0.0


def one_spin_x(m: InitialMoments, c: CouplingMatrix, i: int, t, B: float = 0.0):
    return _one_spin(m, c, i, t, B, "x").to_linear()


def one_spin_y(m: InitialMoments, c: CouplingMatrix, i: int, t, B: float = 0.0):
    return _one_spin(m, c, i, t, B, "y").to_linear()


def corr_ppp(m: InitialMoments, c: CouplingMatrix, i: int, j: int, k: int, t,
             B: float = 0.0, lower: bool = False):
    """<s+_i s+_j s+_k>(t) as ``(real, imag)``; ``lower=True`` gives the s- version."""
    t = _as_times(t)
    core = _ppp_core(m, c, i, j, k, t)
    phase = -6.0 * B * t if not lower else 6.0 * B * t
    return _scale(core, np.cos(phase)).to_linear(), _scale(core, np.sin(phase)).to_linear()


# --- series --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CorrelatorSeries:
    observable: str
    indices: tuple
    t: np.ndarray
    values: SignedLogValue
    B: float = 0.0
    norm: float = 1.0
    imag: SignedLogValue | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.t.ndim != 1:
            raise InvalidArgumentError("time grid must be one-dimensional")
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0):
            raise InvalidArgumentError("time grid must be strictly increasing")
        if self.values.shape != self.t.shape:
            raise InvalidArgumentError("values and time grid differ in length")

    @property
    def linear(self) -> np.ndarray:
        return self.values.to_linear()

    @property
    def normalized(self) -> np.ndarray:
        """Value divided by its initial-moment prefactor (``nan`` if that is 0)."""
        if self.norm == 0.0:
            return np.full(self.t.shape, np.nan)
        return (self.values * SignedLogValue.from_linear(1.0 / self.norm)).to_linear()

    def __len__(self):
        return self.t.size


def _norm_for(m, observable, idx):
    if observable in ("xx", "yy", "xy"):
        return m.xx(*idx)
    if observable in ("xz", "yz", "Pz", "x", "y", "zz"):
        return m.x(idx[0]) if observable != "zz" else 1.0
    if observable == "ppp":
        return m.xxx(*idx) / 8.0
    return 1.0


def evaluate_series(m: InitialMoments, c: CouplingMatrix, observable: str, indices,
                    t, B: float = 0.0, **meta) -> CorrelatorSeries:
    """Evaluate one observable on a time grid, keeping the log-domain values."""
    if observable not in OBSERVABLES:
        raise InvalidArgumentError(f"unknown observable {observable!r}; choose from {OBSERVABLES}")
    idx = tuple(int(v) for v in np.atleast_1d(indices))
    if len(idx) != _ARITY[observable]:
        raise InvalidArgumentError(f"{observable} needs {_ARITY[observable]} site indices, got {idx}")
    _check_pair(c, *idx)
    t = _as_times(t).ravel()
    imag = None
    if observable == "xx":
        v = _xx_yy(m, c, *idx, t, B, +1)
    elif observable == "yy":
        v = _xx_yy(m, c, *idx, t, B, -1)
    elif observable == "xy":
        v = _xy(m, c, *idx, t, B)
    elif observable == "xz":
        v = _scale(_pz(m, c, *idx, t), np.sin(2.0 * B * t))
    elif observable == "yz":
        v = _scale(_pz(m, c, *idx, t), np.cos(2.0 * B * t))
    elif observable == "zz":
        v = SignedLogValue(np.zeros(t.shape, dtype=np.int8), np.full(t.shape, -np.inf))
    elif observable == "x":
        v = _one_spin(m, c, idx[0], t, B, "x")
    elif observable == "y":
        v = _one_spin(m, c, idx[0], t, B, "y")
    elif observable == "Pplus":
        v = p_plus(c, *idx, t)
    elif observable == "Pminus":
        v = p_minus(c, *idx, t)
    elif observable == "Pz":
        v = _pz(m, c, *idx, t)
    else:
        core = _ppp_core(m, c, *idx, t)
        v = _scale(core, np.cos(6.0 * B * t))
        imag = _scale(core, -np.sin(6.0 * B * t))
    info = {"alpha": c.alpha, "J": c.J, "N": c.N}
    if c.lattice is not None:
        info.update(kind=c.lattice.kind.value, L=c.lattice.L)
    info.update(meta)
    return CorrelatorSeries(observable, idx, t, v, float(B), _norm_for(m, observable, idx), imag, info)


def recurrence_scan(s: CorrelatorSeries, threshold: float) -> list[float]:
    """Times at which |normalised value| climbs back to ``threshold``.

    A recurrence is only counted after the magnitude has dropped below
    ``threshold / 2``; the detector re-arms after each hit.
    """
    if not 0.0 < threshold < 1.0:
        raise InvalidArgumentError("threshold must lie in (0, 1)")
    v = np.abs(s.normalized)
    hits = []
    armed = False
    low = v < threshold / 2.0
    high = v >= threshold
    k = 0
    n = v.size
    while k < n:
        if not armed:
            nxt = np.flatnonzero(low[k:])
            if nxt.size == 0:
                break
            k += int(nxt[0])
            armed = True
        else:
            nxt = np.flatnonzero(high[k:])
            if nxt.size == 0:
                break
            k += int(nxt[0])
            hits.append(float(s.t[k]))
            armed = False
    return hits


def relaxation_time(s: CorrelatorSeries, level: float = np.exp(-1.0), dwell: float = 1.5) -> float:
    """Smallest grid time t with |normalised| <= level on all of [t, dwell*t].

    The grid must reach ``dwell * t``; returns ``inf`` when no time qualifies.
    """
    v = np.abs(s.normalized)
    t = s.t
    above = v > level
    # index of the next grid point at or after k that is above the level
    idx = np.where(above, np.arange(v.size), v.size)
    next_above = np.minimum.accumulate(idx[::-1])[::-1]
    t_next = np.where(next_above < v.size, t[np.minimum(next_above, v.size - 1)], np.inf)
    ok = (~above) & (t_next > dwell * t) & (t[-1] >= dwell * t)
    hit = np.flatnonzero(ok)
    return float(t[hit[0]]) if hit.size else float("inf")
