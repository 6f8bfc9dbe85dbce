"""Post-processing of correlator series: envelopes, decay fits, plateaus.

Finite lattices cannot follow a thermodynamic-limit decay forever. Once
the phases ``a_k t`` are effectively random, ``log|prod cos|`` fluctuates
around ``-(n) ln 2`` with standard deviation ``sqrt(n) pi / sqrt(12)``
(the mean and spread of ``ln|cos|`` for a uniform phase). The helpers here
cut decay windows where the envelope first reaches that random-phase level
plus a few standard deviations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .signedlog import LOG10E

_LOG10_2 = float(np.log10(2.0))
_LN_COS_STD = float(np.pi / np.sqrt(12.0))


def random_phase_level(n_factors: int, nsigma: float = 3.0) -> float:
    """log10 level of a product of ``n_factors`` random-phase cosines, ``nsigma`` spreads up."""
    return -n_factors * _LOG10_2 + nsigma * _LN_COS_STD * np.sqrt(n_factors) * LOG10E


@dataclass(frozen=True)
class EnvelopeFit:
    slope: float
    intercept: float
    r2: float
    span: float        # decades covered by the fitted envelope
    t_end: float       # end of the window (saturation time)
    x: np.ndarray      # bin centres in rescaled time t**p
    envelope: np.ndarray


def decay_envelope(u, log10_values, n_bins: int = 200):
    """Per-bin maximum of ``log10_values`` on equal bins of ``u``, made
    monotone by a running maximum from the right. Returns (centres, env, edges)."""
    u = np.asarray(u, dtype=np.float64)
    lg = np.asarray(log10_values, dtype=np.float64)
    edges = np.linspace(u[0] if u[0] > 0 else 0.0, u[-1], n_bins + 1)
    k = np.clip(np.searchsorted(edges, u, side="right") - 1, 0, n_bins - 1)
    env = np.full(n_bins, -np.inf)
    np.maximum.at(env, k, lg)
    centres = 0.5 * (edges[1:] + edges[:-1])
    return centres, env, edges


def linear_fit(x, y):
    """Least-squares line; returns (slope, intercept, R^2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 3:
        raise InvalidArgumentError("need at least three points to fit")
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum((y - A @ np.array([slope, icpt])) ** 2) / ss if ss > 0 else 1.0
    return float(slope), float(icpt), float(r2)


def fit_decay(t, log10_values, p: float, floor: float, n_bins: int = 200, t_start: float = 0.0) -> EnvelopeFit:
    """Fit the envelope of ``log10_values`` linearly against ``t**p``.

    The window runs from ``t_start`` to the first bin whose envelope is at or
    below ``floor``; it must reach that level inside the grid.
    """
    t = np.asarray(t, dtype=np.float64)
    u = t ** p
    x, env, edges = decay_envelope(u, log10_values, n_bins)
    hit = np.flatnonzero(env <= floor)
    if hit.size == 0:
        raise InvalidArgumentError("series never reaches the floor; extend the grid")
    end = int(hit[0])
    sel = x[:end] >= t_start ** p
    xs = x[:end][sel]
    ys = np.maximum.accumulate(env[:end][::-1])[::-1][sel]
    slope, icpt, r2 = linear_fit(xs, ys)
    return EnvelopeFit(slope, icpt, r2, float(ys.max() - ys.min()), float(edges[end] ** (1.0 / p)), xs, ys)


def windows(mask: np.ndarray):
    """(start, stop) index pairs of maximal runs of True in ``mask`` (stop exclusive)."""
    m = np.concatenate([[False], np.asarray(mask, dtype=bool), [False]])
    d = np.diff(m.astype(np.int8))
    return list(zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1)))


def plateau_width(t, xx_norm, x_norm, band=(0.4, 0.6), one_spin_tol: float = 0.05) -> float:
    """Longest time span on which xx_norm lies in ``band`` while |x_norm| < tol.

    Width of a run is measured between its first and last grid point; 0 if
    no grid point qualifies.
    """
    t = np.asarray(t)
    ok = (xx_norm >= band[0]) & (xx_norm <= band[1]) & (np.abs(x_norm) < one_spin_tol)
    best = 0.0
    for a, b in windows(ok):
        best = max(best, float(t[b - 1] - t[a]))
    return best
