"""Reduced density matrices, purities and the squeezing second moment.

One- and two-spin reduced density matrices are rebuilt from Pauli moments.
The two-spin matrix is written in the sigma^z product basis ordered
``|uu>, |ud>, |du>, |dd>`` with site ``i`` as the left factor; only the upper
triangle is filled from moments and the lower one is its Hermitian
conjugate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics as dyn
from .errors import InconsistentMomentsError, InvalidArgumentError
from .lattice import CouplingMatrix

PSD_TOL = 1e-9
_AXES = "xyz"


@dataclass(frozen=True)
class MomentSet:
    """Pauli moments of a pair at one or more times.

    ``si``/``sj`` have shape ``(..., 3)`` (x, y, z) and ``sij`` has shape
    ``(..., 3, 3)`` with ``sij[..., a, b] = <sigma_i^a sigma_j^b>``.
    """
    si: np.ndarray
    sj: np.ndarray
    sij: np.ndarray

    def __post_init__(self):
        for name, arr, tail in (("si", self.si, (3,)), ("sj", self.sj, (3,)), ("sij", self.sij, (3, 3))):
            if np.shape(arr)[-len(tail):] != tail:
                raise InvalidArgumentError(f"{name} must end in shape {tail}")
            if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > 1.0 + 1e-12):
                raise InvalidArgumentError(f"{name} moments must lie in [-1, 1]")

    def pair(self, a: str, b: str):
        return self.sij[..., _AXES.index(a), _AXES.index(b)]


@dataclass(frozen=True)
class OneSpinDensity:
    matrix: np.ndarray


@dataclass(frozen=True)
class TwoSpinDensity:
    matrix: np.ndarray


def moments_at(m: dyn.InitialMoments, c: CouplingMatrix, i: int, j: int, t, B: float = 0.0) -> MomentSet:
    """All one- and two-spin Pauli moments of the pair ``(i, j)`` at time(s) ``t``."""
    t = np.asarray(t, dtype=np.float64)
    zero = np.zeros(t.shape)
    si = np.stack([dyn.one_spin_x(m, c, i, t, B), dyn.one_spin_y(m, c, i, t, B), zero], axis=-1)
    sj = np.stack([dyn.one_spin_x(m, c, j, t, B), dyn.one_spin_y(m, c, j, t, B), zero], axis=-1)
    xy = dyn.corr_xy(m, c, i, j, t, B)
    rows = [
        [dyn.corr_xx(m, c, i, j, t, B), xy, dyn.corr_xz(m, c, i, j, t, B)],
        [xy, dyn.corr_yy(m, c, i, j, t, B), dyn.corr_yz(m, c, i, j, t, B)],
        [dyn.corr_xz(m, c, j, i, t, B), dyn.corr_yz(m, c, j, i, t, B), zero],
    ]
    sij = np.stack([np.stack([np.broadcast_to(v, t.shape) for v in r], axis=-1) for r in rows], axis=-2)
    return MomentSet(si, sj, sij)


def rho_one(ms: MomentSet, which: str = "i") -> OneSpinDensity:
    if which not in ("i", "j"):
        raise InvalidArgumentError("which must be 'i' or 'j'")
    s = ms.si if which == "i" else ms.sj
    x, y, z = s[..., 0], s[..., 1], s[..., 2]
    rho = np.empty(x.shape + (2, 2), dtype=np.complex128)
    rho[..., 0, 0] = 1 + z
    rho[..., 0, 1] = x - 1j * y
    rho[..., 1, 0] = x + 1j * y
    rho[..., 1, 1] = 1 - z
    return OneSpinDensity(0.5 * rho)


def rho_two(ms: MomentSet, check: bool = True) -> TwoSpinDensity:
    """Two-spin density matrix from moments; raises if it is not PSD within ``PSD_TOL``."""
    xi, yi, zi = (ms.si[..., k] for k in range(3))
    xj, yj, zj = (ms.sj[..., k] for k in range(3))
    s = {a + b: ms.pair(a, b) for a in _AXES for b in _AXES}
    rho = np.zeros(xi.shape + (4, 4), dtype=np.complex128)
    rho[..., 0, 0] = 1 + zi + zj + s["zz"]
    rho[..., 1, 1] = 1 + zi - zj - s["zz"]
    rho[..., 2, 2] = 1 - zi + zj - s["zz"]
    rho[..., 3, 3] = 1 - zi - zj + s["zz"]
    rho[..., 0, 1] = xj - 1j * yj + s["zx"] - 1j * s["zy"]
    rho[..., 0, 2] = xi - 1j * yi + s["xz"] - 1j * s["yz"]
    rho[..., 0, 3] = s["xx"] - s["yy"] - 1j * s["xy"] - 1j * s["yx"]
    rho[..., 1, 2] = s["xx"] + s["yy"] + 1j * s["xy"] - 1j * s["yx"]
    rho[..., 1, 3] = xi - 1j * yi - s["xz"] + 1j * s["yz"]
    rho[..., 2, 3] = xj - 1j * yj - s["zx"] + 1j * s["zy"]
    for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
        rho[..., b, a] = np.conj(rho[..., a, b])
    rho *= 0.25
    if check:
        low = np.linalg.eigvalsh(rho).min()
        if low < -PSD_TOL:
            raise InconsistentMomentsError(
                f"moments do not describe a quantum state (eigenvalue {low:.3g} < -{PSD_TOL:g})")
    return TwoSpinDensity(rho)


def purity(rho: OneSpinDensity | TwoSpinDensity | np.ndarray):
    """Tr(rho^2); broadcasts over leading axes."""
    a = getattr(rho, "matrix", rho)
    # rho is Hermitian, so Tr(rho^2) = sum |rho_ab|^2
    out = np.sum(np.abs(a) ** 2, axis=(-2, -1))
    return float(out) if out.ndim == 0 else out


def offdiag_moduli(rho: TwoSpinDensity):
    """``(|rho_kk|, |rho_14|, |rho_23|, |rho_12|)``.

    For B = 0 and states diagonal in sigma^x these equal 1/4, |Pplus|/2,
    |Pminus|/2 and |s_i^x + i s_ij^yz|/4, where Pplus and Pminus carry their
    s_ij^xx/2 prefactor. The first entry is the diagonal modulus of
    ``rho_11``; use :func:`diagonal` for all four.
    """
    a = rho.matrix
    return (np.abs(a[..., 0, 0]), np.abs(a[..., 0, 3]), np.abs(a[..., 1, 2]), np.abs(a[..., 0, 1]))


def diagonal(rho: TwoSpinDensity) -> np.ndarray:
    return np.real(np.diagonal(rho.matrix, axis1=-2, axis2=-1))


def jz2_sums(m: dyn.InitialMoments, c: CouplingMatrix, t, B: float = 0.0):
    """Pair sums ``(sum_{i != j} <y_i y_j>, sum_{i != j} <y_i z_j + z_i y_j>)``.

    These do not depend on the rotation angle, so a whole theta grid can
    reuse them. Cost is O(N^3) per time point.
    """
    t = np.asarray(t, dtype=np.float64)
    syy = np.zeros(t.shape)
    syz = np.zeros(t.shape)
    for i in range(c.N):
        for j in range(i + 1, c.N):
            # (i, j) and (j, i) contribute equally; <z_i y_j> = <y_j z_i>
            syy = syy + 2.0 * dyn.corr_yy(m, c, i, j, t, B)
            syz = syz + 2.0 * (dyn.corr_yz(m, c, i, j, t, B) + dyn.corr_yz(m, c, j, i, t, B))
    return syy, syz


def jz2_from_sums(N: int, theta, syy, syz):
    """(1/4) [N + sin^2 S_yy - sin cos S_yz]; the i = j terms give 1/4 each
    since every Pauli squares to one, and <z_i z_j> vanishes."""
    sn, cs = np.sin(theta), np.cos(theta)
    return 0.25 * (N + sn * sn * syy - sn * cs * syz)


def jz2_theta(m: dyn.InitialMoments, c: CouplingMatrix, theta: float, t, B: float = 0.0):
    """<J_z^2> after rotating the collective spin about x by ``theta``.

    (1/4) sum_{i,j} [sin^2 <y_i y_j> - sin cos <y_i z_j + z_i y_j> + cos^2 <z_i z_j>]
    """
    out = jz2_from_sums(c.N, theta, *jz2_sums(m, c, t, B))
    return float(out) if np.ndim(out) == 0 else out
