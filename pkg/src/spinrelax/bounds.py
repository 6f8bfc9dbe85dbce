"""Thermodynamic-limit upper bounds on the cosine products.

For lattice dimension ``d`` the bounds have the form

    |Pplus|  <= exp(-C+ N**q+ t**p+),    |Pminus| <= exp(-C- N**q- t**p-)

with q+ = max(0, 1 - 2a/d), q- = max(0, 1 - 2(1+a)/d), p+ = min(2, d/a),
p- = min(2, d/(1+a)). The constants C+/- are implemented for the symmetric
pair straddling a site of the triangular lattice at distance ``delta``:

    C+ = (8J)**2 3**(a-1) / (pi**2 (1-a))        a < 1
    C+ = (8J/pi)**(2/a) / (a-1)                  a > 1
    C- = delta**2/(4a) (4aJ/pi)**(2/(1+a))

``a = 1`` is a pole of C+ and is rejected rather than interpolated.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UnsupportedError
from .signedlog import SignedLogValue

DEFAULT_MARGIN = 2.0


@dataclass(frozen=True)
class BoundExponents:
    alpha: float
    d: int
    qplus: float
    qminus: float
    pplus: float
    pminus: float


@dataclass(frozen=True)
class TriangularBoundConstants:
    alpha: float
    delta: float
    cplus: float
    cminus: float


@dataclass(frozen=True)
class CutoffRadii:
    r0plus: float
    r0minus: float
    plus_valid: bool
    minus_valid: bool


class DecayRegime(str, enum.Enum):
    COMPRESSED = "compressed"
    STRETCHED = "stretched"
    BOUNDARY = "gaussian-boundary"


def _check_alpha(alpha):
    if not np.isfinite(alpha) or alpha < 0:
        raise InvalidArgumentError(f"alpha must be a finite number >= 0, got {alpha}")


def exponents(alpha: float, d: int) -> BoundExponents:
    _check_alpha(alpha)
    if d not in (1, 2, 3):
        raise InvalidArgumentError(f"dimension must be 1, 2 or 3, got {d}")
    pplus = 2.0 if alpha == 0 else min(2.0, d / alpha)
    return BoundExponents(
        alpha=alpha,
        d=d,
        qplus=max(0.0, 1.0 - 2.0 * alpha / d),
        qminus=max(0.0, 1.0 - 2.0 * (1.0 + alpha) / d),
        pplus=pplus,
        pminus=min(2.0, d / (1.0 + alpha)),
    )


def c_plus(alpha: float, J: float = 1.0) -> float:
    _check_alpha(alpha)
    if alpha == 1.0:
        raise UnsupportedError("C+ has a pole at alpha = 1 (only alpha < 1 or alpha > 1 are defined)")
    if alpha < 1.0:
        return (8.0 * J) ** 2 * 3.0 ** (alpha - 1.0) / (math.pi ** 2 * (1.0 - alpha))
    return (8.0 * abs(J) / math.pi) ** (2.0 / alpha) / (alpha - 1.0)


def c_minus(alpha: float, delta: float, J: float = 1.0) -> float:
    _check_alpha(alpha)
    if alpha == 0.0:
        raise UnsupportedError("C- is undefined at alpha = 0 (1/alpha prefactor)")
    if delta <= 0:
        raise InvalidArgumentError("pair distance must be positive")
    return delta ** 2 / (4.0 * alpha) * (4.0 * alpha * abs(J) / math.pi) ** (2.0 / (1.0 + alpha))


def tri_constants(alpha: float, delta: float, J: float = 1.0) -> TriangularBoundConstants:
    return TriangularBoundConstants(alpha, float(delta), c_plus(alpha, J), c_minus(alpha, delta, J))


def _log_bound(coef, t):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise InvalidArgumentError("times must be >= 0")
    logmag = -coef
    if np.ndim(logmag) == 0:
        logmag = float(logmag)
        return SignedLogValue(1, logmag)
    return SignedLogValue(np.ones(np.shape(logmag), dtype=np.int8), logmag)


def bound_p_plus(t, alpha: float, N: int, J: float = 1.0, *, delta: float = 2.0,
                 strict: bool = False, margin: float = DEFAULT_MARGIN) -> SignedLogValue:
    """Upper bound on |Pplus| for the triangular lattice (N enters only for alpha < 1)."""
    if strict:
        _require_valid(t, validity_threshold(alpha, delta, J, "plus", margin), "plus")
    ex = exponents(alpha, 2)
    t = np.asarray(t, dtype=np.float64)
    coef = c_plus(alpha, J) * float(N) ** ex.qplus * np.power(t, ex.pplus)
    return _log_bound(coef, t)


def bound_p_minus(t, alpha: float, delta: float, J: float = 1.0, *, strict: bool = False,
                  margin: float = DEFAULT_MARGIN) -> SignedLogValue:
    """Upper bound on |Pminus| for the triangular-lattice pair at distance ``delta``."""
    if strict:
        _require_valid(t, validity_threshold(alpha, delta, J, "minus", margin), "minus")
    ex = exponents(alpha, 2)
    t = np.asarray(t, dtype=np.float64)
    coef = c_minus(alpha, delta, J) * np.power(t, ex.pminus)
    return _log_bound(coef, t)


def bound_correlator(xx0: float, t, alpha: float, N: int, delta: float, J: float = 1.0):
    """Linear bound 1/2 xx0 (exp(-C- t^p-) + exp(-C+ N^q+ t^p+)) on <xx>, <yy>."""
    total = bound_p_minus(t, alpha, delta, J) + bound_p_plus(t, alpha, N, J, delta=delta)
    return (total * SignedLogValue.from_linear(0.5 * xx0)).to_linear()


def cutoff_radii(t: float, alpha: float, J: float = 1.0, delta: float = 2.0,
                 margin: float = DEFAULT_MARGIN) -> CutoffRadii:
    """Cutoff radii R0+ = (8Jt/pi)^(1/a) and R0- = (4aJt/pi)^(1/(1+a)).

    A branch counts as valid once its radius reaches ``delta + margin``, i.e.
    the excluded region fully encloses the pair.
    """
    _check_alpha(alpha)
    if alpha == 0.0:
        raise UnsupportedError("cutoff radii are undefined at alpha = 0")
    if t < 0:
        raise InvalidArgumentError("time must be >= 0")
    r0p = (8.0 * abs(J) * t / math.pi) ** (1.0 / alpha)
    r0m = (4.0 * alpha * abs(J) * t / math.pi) ** (1.0 / (1.0 + alpha))
    need = delta + margin
    return CutoffRadii(r0p, r0m, r0p >= need, r0m >= need)


def validity_threshold(alpha: float, delta: float = 2.0, J: float = 1.0, branch: str = "minus",
                       margin: float = DEFAULT_MARGIN) -> float:
    """Earliest time at which :func:`cutoff_radii` reports the branch valid."""
    _check_alpha(alpha)
    if alpha == 0.0:
        raise UnsupportedError("cutoff radii are undefined at alpha = 0")
    need = delta + margin
    if branch == "minus":
        return need ** (1.0 + alpha) * math.pi / (4.0 * alpha * abs(J))
    if branch == "plus":
        return need ** alpha * math.pi / (8.0 * abs(J))
    raise InvalidArgumentError(f"branch must be 'plus' or 'minus', got {branch!r}")


def _require_valid(t, threshold, branch):
    if np.any(np.asarray(t) < threshold * (1 - 1e-12)):
        raise InvalidArgumentError(f"{branch} bound requested below its validity threshold t={threshold:.6g}")


def tau_bound(alpha: float, delta: float, J: float = 1.0) -> float:
    """Upper bound (2 sqrt(a)/delta)^(1+a) pi/(4aJ) on the relaxation time."""
    _check_alpha(alpha)
    if alpha == 0.0:
        raise UnsupportedError("relaxation-time bound is undefined at alpha = 0")
    if delta <= 0:
        raise InvalidArgumentError("pair distance must be positive")
    return (2.0 * math.sqrt(alpha) / delta) ** (1.0 + alpha) * math.pi / (4.0 * alpha * abs(J))


def decay_regime(alpha: float, d: int) -> DecayRegime:
    """Shape of the slowest (Pminus) decay: compressed for alpha < d-1, stretched above."""
    _check_alpha(alpha)
    if alpha < d - 1:
        return DecayRegime.COMPRESSED
    if alpha > d - 1:
        return DecayRegime.STRETCHED
    return DecayRegime.BOUNDARY
