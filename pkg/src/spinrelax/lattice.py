"""Lattice geometries, distances and coupling matrices.

Supported kinds:

``triangular-hex``
    Triangular lattice cut to a centred hexagon of side length ``L`` (sites per
    edge), ``N = 3L(L-1) + 1``. Sites are ordered centre first, then by
    hexagonal shell, and within a shell by polar angle in ``[0, 2*pi)``.
``chain``
    ``L`` sites at ``x = 0 .. L-1``.
``square`` / ``cubic``
    ``L**2`` / ``L**3`` sites of the simple cubic grid, row-major order.

The lattice constant is 1. Couplings are stored lazily: a power-law matrix is
defined by the site positions and only materialised on request, so single rows
are available for lattices far too large for a dense ``N x N`` array.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError


class LatticeKind(str, enum.Enum):
    TRIANGULAR_HEX = "triangular-hex"
    CHAIN = "chain"
    SQUARE = "square"
    CUBIC = "cubic"


_DIM = {
    LatticeKind.TRIANGULAR_HEX: 2,
    LatticeKind.CHAIN: 1,
    LatticeKind.SQUARE: 2,
    LatticeKind.CUBIC: 3,
}

# triangular lattice primitive vectors
_A1 = np.array([1.0, 0.0])
_A2 = np.array([0.5, math.sqrt(3.0) / 2.0])


def hex_site_count(L: int) -> int:
    return 3 * L * (L - 1) + 1


@dataclass(frozen=True, eq=False)
class Lattice:
    kind: LatticeKind
    L: int
    positions: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.positions.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @property
    def N(self) -> int:
        return self.positions.shape[0]

    def distances_from(self, i: int) -> np.ndarray:
        """Euclidean distances from site ``i`` to every site (0 at ``i``)."""
        _check_site(self, i)
        return np.sqrt(np.sum((self.positions - self.positions[i]) ** 2, axis=1))

    def distance_matrix(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def center_site(self) -> int:
        centroid = self.positions.mean(axis=0)
        d = np.sum((self.positions - centroid) ** 2, axis=1)
        return int(np.argmin(np.round(d, 9)))

    def center_pair(self) -> tuple[int, int]:
        """The two sites one lattice constant right and left of the centre.

        Falls back to the closest pair containing the first site on lattices
        too small to have such a pair.
        """
        if self.N < 2:
            raise InvalidArgumentError(f"{self.kind.value} lattice with L={self.L} has no site pair")
        c = self.positions[self.center_site()]
        step = np.zeros(self.dim)
        step[0] = 1.0
        right = _find_site(self.positions, c + step)
        left = _find_site(self.positions, c - step)
        if right is not None and left is not None:
            return right, left
        d = self.distances_from(0)
        d[0] = np.inf
        return 0, int(np.argmin(d))


def _find_site(positions, point, tol=1e-9):
    d = np.sum((positions - point) ** 2, axis=1)
    k = int(np.argmin(d))
    return k if d[k] < tol else None


def _check_site(lat, i):
    if not (0 <= int(i) < lat.N) or int(i) != i:
        raise InvalidArgumentError(f"site index {i} out of range for N={lat.N}")


def _hex_positions(L: int) -> np.ndarray:
    R = L - 1
    sites = []
    for q in range(-R, R + 1):
        for r in range(max(-R, -q - R), min(R, -q + R) + 1):
            shell = max(abs(q), abs(r), abs(q + r))
            xy = q * _A1 + r * _A2
            angle = math.atan2(xy[1], xy[0]) % (2.0 * math.pi)
            sites.append((shell, round(angle, 12), xy[0], xy[1]))
    sites.sort(key=lambda s: (s[0], s[1]))
    pos = np.array([[s[2], s[3]] for s in sites])
    # snap rounding noise so the patch is exactly point-symmetric
    pos[np.abs(pos) < 1e-12] = 0.0
    return pos


def build_lattice(kind: str | LatticeKind, L: int) -> Lattice:
    try:
        kind = LatticeKind(kind)
    except ValueError:
        raise InvalidArgumentError(f"unsupported lattice kind {kind!r}") from None
    if isinstance(L, bool) or int(L) != L or L < 1:
        raise InvalidArgumentError(f"side length must be a positive integer, got {L!r}")
    L = int(L)
    if kind is LatticeKind.TRIANGULAR_HEX:
        pos = _hex_positions(L)
    elif kind is LatticeKind.CHAIN:
        pos = np.arange(L, dtype=np.float64)[:, None]
    else:
        d = _DIM[kind]
        grids = np.meshgrid(*([np.arange(L, dtype=np.float64)] * d), indexing="ij")
        pos = np.stack([g.ravel() for g in grids], axis=1)
    return Lattice(kind, L, np.ascontiguousarray(pos, dtype=np.float64))


def pair_distance(lat: Lattice, i: int, j: int) -> float:
    _check_site(lat, i)
    _check_site(lat, j)
    if i == j:
        raise InvalidArgumentError("pair_distance needs two distinct sites")
    return float(np.linalg.norm(lat.positions[i] - lat.positions[j]))


class CouplingMatrix:
    """Symmetric coupling matrix ``J_ij`` with zero diagonal.

    Either power-law (``J * D_ij**-alpha`` on a lattice) or an explicit dense
    matrix. ``row(i)`` is cheap in both cases; ``values`` materialises the
    full matrix.
    """

    def __init__(self, J: float, alpha: float, lattice: Lattice | None = None,
                 dense: np.ndarray | None = None):
        if (lattice is None) == (dense is None):
            raise InvalidArgumentError("give exactly one of lattice or dense")
        self.J = float(J)
        self.alpha = float(alpha)
        self.lattice = lattice
        if dense is not None:
            dense = np.array(dense, dtype=np.float64)
            if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
                raise InvalidArgumentError("coupling matrix must be square")
            if not np.array_equal(dense, dense.T):
                raise InvalidArgumentError("coupling matrix must be symmetric")
            if np.any(np.diag(dense) != 0.0):
                raise InvalidArgumentError("coupling matrix must have zero diagonal")
            dense.setflags(write=False)
        self._dense = dense

    @property
    def N(self) -> int:
        return self.lattice.N if self._dense is None else self._dense.shape[0]

    @property
    def is_power_law(self) -> bool:
        return self._dense is None

    def row(self, i: int) -> np.ndarray:
        if not (0 <= i < self.N):
            raise InvalidArgumentError(f"site index {i} out of range for N={self.N}")
        if self._dense is not None:
            return self._dense[i].copy()
        d = self.lattice.distances_from(i)
        out = np.zeros_like(d)
        mask = np.arange(d.size) != i
        out[mask] = self.J * np.power(d[mask], -self.alpha)
        return out

    @cached_property
    def values(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        D = self.lattice.distance_matrix()
        out = np.zeros_like(D)
        off = ~np.eye(self.N, dtype=bool)
        out[off] = self.J * np.power(D[off], -self.alpha)
        out.setflags(write=False)
        return out

    def __getitem__(self, ij) -> float:
        i, j = ij
        return float(self.row(i)[j])

    def __repr__(self):
        src = "power-law" if self.is_power_law else "dense"
        return f"CouplingMatrix({src}, N={self.N}, J={self.J}, alpha={self.alpha})"


def power_law_couplings(lat: Lattice, J: float = 1.0, alpha: float = 1.0) -> CouplingMatrix:
    if not np.isfinite(alpha) or alpha < 0:
        raise InvalidArgumentError(f"alpha must be >= 0, got {alpha}")
    return CouplingMatrix(J, alpha, lattice=lat)


def dense_couplings(values, J: float = 1.0, alpha: float = float("nan")) -> CouplingMatrix:
    """Wrap a user-supplied matrix. ``J``/``alpha`` are recorded as metadata only."""
    return CouplingMatrix(J, alpha, dense=values)
