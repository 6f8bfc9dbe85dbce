"""Brute-force exact evolution for small systems (N <= 12).

The Hamiltonian is diagonal in the sigma^z basis, so time evolution is a
phase map on density-matrix elements,

    rho(t)_{bc} = rho0_{bc} exp(-i (E_b - E_c) t),

and for states diagonal in the sigma^x product basis the z-basis elements are
``rho0_{bc} = 2**-N M(b xor c)`` with ``M`` the table of x-moments. Two
independent routes are provided:

* a fast route, O(2**N) per Pauli string, that sums the single off-diagonal
  band selected by the string's flip mask;
* a dense route that builds ``rho(t)`` and the operators as full matrices
  (``N <= 10``), with an optional check of the phase map against
  :func:`scipy.linalg.expm` of the Hamiltonian assembled from Kronecker
  products.

Basis conventions: site ``k`` is bit ``N-1-k`` of a basis index (Kronecker
order, site 0 leftmost) and bit 0 means spin up (sigma^z = +1) or, for
x-basis labels, sigma^x = +1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError
from .lattice import CouplingMatrix

MAX_SITES = 12
MAX_DENSE_SITES = 10

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def _guard(N, limit=MAX_SITES):
    if N > limit:
        raise ResourceLimitError(f"brute-force evolution is limited to N <= {limit}, got N={N}")
    if N < 1:
        raise InvalidArgumentError("need at least one site")


def walsh_hadamard(w: np.ndarray) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform: out[m] = sum_a (-1)^popcount(m & a) w[a]."""
    out = np.array(w, dtype=np.float64)
    h = 1
    n = out.size
    while h < n:
        v = out.reshape(-1, 2, h)
        a, b = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :], v[:, 1, :] = a + b, a - b
        h *= 2
    return out


def _site_bit(N, k):
    return N - 1 - k


def _mask(N, sites):
    m = 0
    for k in sites:
        m |= 1 << _site_bit(N, k)
    return m


@dataclass(frozen=True, eq=False)
class DenseState:
    """Mixed state diagonal in the sigma^x product basis.

    ``weights[a]`` is the probability of x-basis configuration ``a``;
    ``moments[m]`` is <prod_{k in m} sigma^x_k>.
    """
    weights: np.ndarray

    def __post_init__(self):
        w = self.weights
        if w.ndim != 1 or w.size & (w.size - 1) or w.size < 2:
            raise InvalidArgumentError("weights must have length 2**N")
        _guard(self.N)
        if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidArgumentError("weights must be non-negative and sum to one")
        object.__setattr__(self, "moments", walsh_hadamard(w))

    @property
    def N(self) -> int:
        return self.weights.size.bit_length() - 1

    def x_moment(self, sites) -> float:
        return float(self.moments[_mask(self.N, sites)])

    def initial_moments(self):
        """Moment tables in the form consumed by :class:`~spinrelax.dynamics.InitialMoments`."""
        from .dynamics import InitialMoments
        N = self.N
        sx = np.array([self.x_moment([i]) for i in range(N)])
        sxx = np.zeros((N, N))
        sxxx = {}
        for i in range(N):
            for j in range(i + 1, N):
                sxx[i, j] = sxx[j, i] = self.x_moment([i, j])
                for k in range(j + 1, N):
                    sxxx[(i, j, k)] = self.x_moment([i, j, k])
        clip = lambda a: np.clip(a, -1.0, 1.0)
        return InitialMoments(clip(sx), clip(sxx), {k: float(clip(v)) for k, v in sxxx.items()})


def build_product_state(sx) -> DenseState:
    """Product of single-site states rho_k = (1 + s_k sigma^x_k) / 2."""
    sx = np.asarray(sx, dtype=np.float64).ravel()
    if np.any(np.abs(sx) > 1.0):
        raise InvalidArgumentError("single-site moments must lie in [-1, 1]")
    _guard(sx.size)
    factors = [np.array([(1 + s) / 2, (1 - s) / 2]) for s in sx]
    return DenseState(reduce(np.kron, factors))


def build_random_state(N: int, rng: np.random.Generator, concentration: float = 0.3) -> DenseState:
    """Correlated state with Dirichlet-distributed x-basis weights."""
    _guard(N)
    return DenseState(rng.dirichlet(np.full(1 << N, concentration)))


def energies(c: CouplingMatrix, B: float) -> np.ndarray:
    """E_b = -sum_{i<j} J_ij z_i z_j - B sum_i z_i for every z-basis index b."""
    N = c.N
    _guard(N)
    b = np.arange(1 << N)
    z = np.stack([1 - 2 * ((b >> _site_bit(N, k)) & 1) for k in range(N)], axis=1).astype(np.float64)
    J = np.asarray(c.values)
    return -0.5 * np.einsum("bi,ij,bj->b", z, J, z) - B * z.sum(axis=1)


def _parse_string(N, observable):
    if isinstance(observable, str):
        if len(observable) != N:
            raise InvalidArgumentError(f"Pauli string must have length N={N}")
        ops = {k: ch.upper() for k, ch in enumerate(observable)}
    else:
        ops = {int(k): str(v).upper() for k, v in dict(observable).items()}
    for k, v in ops.items():
        if v not in _PAULI or not (0 <= k < N):
            raise InvalidArgumentError(f"bad Pauli factor {v!r} on site {k}")
    return {k: v for k, v in ops.items() if v != "I"}


def evolve_expectation(state: DenseState, c: CouplingMatrix, B: float, t: float, observable) -> float:
    """Exact <P>(t) for a Pauli string ``P`` (str of IXYZ or {site: axis}); fast route."""
    N = state.N
    if c.N != N:
        raise InvalidArgumentError("state and couplings differ in N")
    ops = _parse_string(N, observable)
    E = energies(c, B)
    b = np.arange(1 << N)
    flip = 0
    n_y = 0
    sign = np.ones(b.size)
    for k, v in ops.items():
        bit = (b >> _site_bit(N, k)) & 1
        if v in "XY":
            flip |= 1 << _site_bit(N, k)
        if v == "Y":
            # <c|Y|b> = +i for b_k = 0 and -i for b_k = 1
            n_y += 1
            sign *= 1 - 2 * bit
        if v == "Z":
            sign *= 1 - 2 * bit
    m = state.moments[flip]
    terms = sign * np.exp(-1j * (E - E[b ^ flip]) * t)
    val = (1j ** n_y) * m * terms.sum() / (1 << N)
    return float(val.real)


def ladder_expectation(state: DenseState, c: CouplingMatrix, B: float, t: float, sites, lower=False) -> complex:
    """<prod_k sigma^+_k>(t) (or sigma^-) by expansion into Pauli strings."""
    sites = list(sites)
    s = -1 if lower else 1
    total = 0j
    for combo in range(1 << len(sites)):
        ops, coef = {}, 1.0 + 0j
        for n, k in enumerate(sites):
            if (combo >> n) & 1:
                ops[k] = "Y"
                coef *= s * 1j
            else:
                ops[k] = "X"
        total += coef * evolve_expectation(state, c, B, t, ops)
    return total / (2 ** len(sites))


# --- dense route ----------------------------------------------------------------

def _kron_op(N, ops):
    return reduce(np.kron, [_PAULI[ops.get(k, "I")] for k in range(N)])


def dense_rho0(state: DenseState) -> np.ndarray:
    N = state.N
    _guard(N, MAX_DENSE_SITES)
    b = np.arange(1 << N)
    return state.moments[b[:, None] ^ b[None, :]].astype(np.complex128) / (1 << N)


def dense_hamiltonian(c: CouplingMatrix, B: float) -> np.ndarray:
    """H assembled from Kronecker products, independent of :func:`energies`."""
    N = c.N
    _guard(N, MAX_DENSE_SITES)
    J = np.asarray(c.values)
    H = np.zeros((1 << N, 1 << N), dtype=np.complex128)
    for i in range(N):
        H -= B * _kron_op(N, {i: "Z"})
        for j in range(i + 1, N):
            if J[i, j] != 0.0:
                H -= J[i, j] * _kron_op(N, {i: "Z", j: "Z"})
    return H


def dense_rho(state: DenseState, c: CouplingMatrix, B: float, t: float, use_expm: bool = False) -> np.ndarray:
    rho0 = dense_rho0(state)
    if use_expm:
        from scipy.linalg import expm
        U = expm(-1j * t * dense_hamiltonian(c, B))
        return U @ rho0 @ U.conj().T
    E = np.real(np.diag(dense_hamiltonian(c, B)))
    return rho0 * np.exp(-1j * t * (E[:, None] - E[None, :]))


def dense_expectation(rho: np.ndarray, observable) -> complex:
    N = rho.shape[0].bit_length() - 1
    return complex(np.trace(_kron_op(N, _parse_string(N, observable)) @ rho))


def reduced_density(rho: np.ndarray, keep) -> np.ndarray:
    """Partial trace of a full density matrix over every site not in ``keep``."""
    N = rho.shape[0].bit_length() - 1
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(not 0 <= k < N for k in keep):
        raise InvalidArgumentError(f"bad site list {keep}")
    rest = [k for k in range(N) if k not in keep]
    t = rho.reshape([2] * (2 * N))
    t = np.transpose(t, keep + rest + [N + k for k in keep] + [N + k for k in rest])
    d, r = 1 << len(keep), 1 << len(rest)
    return np.einsum("arbr->ab", t.reshape(d, r, d, r))


def energy_expectation(rho: np.ndarray, c: CouplingMatrix, B: float) -> float:
    return float(np.real(np.trace(dense_hamiltonian(c, B) @ rho)))


def jz2_dense(rho: np.ndarray, theta: float) -> float:
    """<J_z^2> after rotating every spin about x by ``theta``; dense route.

    The state is rotated by exp(+i theta J_x), so that J_z maps to
    cos(theta) J_z - sin(theta) J_y.
    """
    N = rho.shape[0].bit_length() - 1
    Rx = np.array([[math.cos(theta / 2), 1j * math.sin(theta / 2)],
                   [1j * math.sin(theta / 2), math.cos(theta / 2)]])
    U = reduce(np.kron, [Rx] * N)
    Jz = 0.5 * sum(_kron_op(N, {k: "Z"}) for k in range(N))
    r = U @ rho @ U.conj().T
    return float(np.real(np.trace(Jz @ Jz @ r)))


# --- comparison suite -----------------------------------------------------------

def _random_instance(rng):
    from .lattice import build_lattice, power_law_couplings, dense_couplings
    N = int(rng.integers(2, 11))
    alpha = float(rng.uniform(0.0, 3.0))
    if rng.random() < 0.5:
        lat = build_lattice("chain", N)
        c = power_law_couplings(lat, 1.0, alpha)
        kind = "chain"
    else:
        # fragment: the N innermost sites of a hexagonal patch
        lat = build_lattice("triangular-hex", 3)
        D = lat.distance_matrix()[:N, :N]
        vals = np.zeros_like(D)
        off = ~np.eye(N, dtype=bool)
        vals[off] = D[off] ** -alpha
        c = dense_couplings(vals, 1.0, alpha)
        kind = "hex-fragment"
    B = float(rng.uniform(0.0, 2.0))
    t = float(rng.uniform(0.0, 20.0))
    if rng.random() < 0.5:
        state = build_product_state(rng.uniform(-1.0, 1.0, N))
    else:
        state = build_random_state(N, rng)
    return dict(N=N, alpha=alpha, kind=kind, B=B, t=t, c=c, state=state)


def compare_instance(inst, dense: bool = False) -> dict:
    """Max absolute deviation per observable between formulas and brute force."""
    from . import dynamics as dyn
    from . import tomography as tomo
    c, st, B, t, N = inst["c"], inst["state"], inst["B"], inst["t"], inst["N"]
    m = st.initial_moments()
    dev = {}

    def put(name, a, b):
        dev[name] = max(dev.get(name, 0.0), float(np.max(np.abs(np.asarray(a) - np.asarray(b)))))

    ex = lambda ops: evolve_expectation(st, c, B, t, ops)
    for i in range(N):
        put("x", dyn.one_spin_x(m, c, i, t, B), ex({i: "X"}))
        put("y", dyn.one_spin_y(m, c, i, t, B), ex({i: "Y"}))
        put("z", 0.0, ex({i: "Z"}))
    pairs = [(i, j) for i in range(N) for j in range(N) if i != j]
    for i, j in pairs:
        put("xx", dyn.corr_xx(m, c, i, j, t, B), ex({i: "X", j: "X"}))
        put("yy", dyn.corr_yy(m, c, i, j, t, B), ex({i: "Y", j: "Y"}))
        put("xy", dyn.corr_xy(m, c, i, j, t, B), ex({i: "X", j: "Y"}))
        put("xz", dyn.corr_xz(m, c, i, j, t, B), ex({i: "X", j: "Z"}))
        put("yz", dyn.corr_yz(m, c, i, j, t, B), ex({i: "Y", j: "Z"}))
        put("zz", dyn.corr_zz(i, j, t), ex({i: "Z", j: "Z"}))
    if N >= 3:
        trip = [(0, 1, 2), (N - 3, N - 2, N - 1)]
        for i, j, k in trip:
            for lower in (False, True):
                re, im = dyn.corr_ppp(m, c, i, j, k, t, B, lower=lower)
                ref = ladder_expectation(st, c, B, t, (i, j, k), lower=lower)
                put("ppp", re + 1j * im, ref)
    theta = float((inst["t"] * 7.31) % math.pi)
    if dense:
        rho = dense_rho(st, c, B, t)
        put("jz2", tomo.jz2_theta(m, c, theta, t, B), jz2_dense(rho, theta))
        i, j = 0, N - 1
        ms = tomo.moments_at(m, c, i, j, t, B)
        r2 = tomo.rho_two(ms, check=False).matrix
        ref2 = reduced_density(rho, [i, j])
        put("rho_two", r2, ref2)
        put("purity", tomo.purity(r2), tomo.purity(ref2))
        put("rho_one", tomo.rho_one(ms).matrix, reduced_density(rho, [i]))
        put("dense_route", ex({i: "Y", j: "Z"}), dense_expectation(rho, {i: "Y", j: "Z"}))
        if N <= 8:
            put("expm", rho, dense_rho(st, c, B, t, use_expm=True))
    return dev


def verify(n_instances: int = 200, seed: int = 20121, dense_every: int = 4) -> dict:
    """Randomised comparison of every formula with brute force; returns a JSON-ready report."""
    rng = np.random.default_rng(seed)
    worst = {}
    per_instance = []
    for n in range(n_instances):
        inst = _random_instance(rng)
        dev = compare_instance(inst, dense=(n % dense_every == 0))
        for k, v in dev.items():
            worst[k] = max(worst.get(k, 0.0), v)
        per_instance.append({"N": inst["N"], "alpha": inst["alpha"], "B": inst["B"], "t": inst["t"],
                             "lattice": inst["kind"], "max_dev": max(dev.values())})
    overall = max(worst.values()) if worst else 0.0
    return {"n_instances": n_instances, "seed": seed, "tolerance": 1e-10,
            "max_abs_deviation": worst, "overall": overall, "passed": overall <= 1e-10,
            "instances": per_instance}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
