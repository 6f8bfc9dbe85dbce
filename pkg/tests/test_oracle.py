import json

import numpy as np
import pytest

from spinrelax import dynamics as dyn, oracle
from spinrelax.errors import ResourceLimitError
from spinrelax.lattice import build_lattice, dense_couplings, power_law_couplings


def test_walsh_hadamard_matches_matrix():
    w = np.random.default_rng(0).random(16)
    H = np.array([[(-1) ** bin(m & a).count("1") for a in range(16)] for m in range(16)])
    assert np.allclose(oracle.walsh_hadamard(w), H @ w)


def test_product_state_limits():
    up = oracle.build_product_state(np.ones(3))
    assert up.weights[0] == 1.0 and np.all(up.moments == 1.0)
    mixed = oracle.build_product_state(np.zeros(3))
    assert np.allclose(mixed.weights, 1 / 8) and np.allclose(mixed.moments[1:], 0.0)
    st = oracle.build_product_state([0.3, -0.2, 0.9, 0.1])
    assert st.x_moment([0, 2]) == pytest.approx(0.27)
    assert np.isclose(st.weights.sum(), 1.0) and np.all(st.weights >= 0)


def test_resource_guard():
    with pytest.raises(ResourceLimitError):
        oracle.build_product_state(np.zeros(13))
    c = power_law_couplings(build_lattice("chain", 11), 1.0, 1.0)
    with pytest.raises(ResourceLimitError):
        oracle.dense_hamiltonian(c, 0.0)


def test_initial_values_reproduced():
    st = oracle.build_product_state([0.5, -0.7, 0.2])
    c = power_law_couplings(build_lattice("chain", 3), 1.0, 1.0)
    assert oracle.evolve_expectation(st, c, 0.3, 0.0, "XIX") == pytest.approx(0.1)
    assert oracle.evolve_expectation(st, c, 0.3, 0.0, {1: "Y"}) == pytest.approx(0.0)
    assert oracle.evolve_expectation(st, c, 0.3, 2.1, "ZZI") == pytest.approx(0.0, abs=1e-15)


def test_hex_fragment_corr_xx():
    lat = build_lattice("triangular-hex", 3)
    D = lat.distance_matrix()[:8, :8]
    off = ~np.eye(8, dtype=bool)
    vals = np.zeros((8, 8))
    vals[off] = D[off] ** -1.5
    c = dense_couplings(vals, 1.0, 1.5)
    sx = np.linspace(-0.8, 0.9, 8)
    st = oracle.build_product_state(sx)
    m = dyn.InitialMoments(sx)
    for i, j in ((1, 4), (0, 7), (2, 3)):
        assert dyn.corr_xx(m, c, i, j, 0.7) == pytest.approx(
            oracle.evolve_expectation(st, c, 0.0, 0.7, {i: "X", j: "X"}), abs=1e-10)


def test_fast_dense_and_expm_routes_agree():
    rng = np.random.default_rng(2)
    c = power_law_couplings(build_lattice("chain", 5), 1.0, 0.8)
    st = oracle.build_random_state(5, rng)
    B, t = 0.6, 3.3
    rho = oracle.dense_rho(st, c, B, t)
    assert np.allclose(rho, oracle.dense_rho(st, c, B, t, use_expm=True), atol=1e-12)
    for ops in ("XYZIX", "YIIZI", "IXXII", {4: "Y"}):
        assert oracle.evolve_expectation(st, c, B, t, ops) == pytest.approx(
            oracle.dense_expectation(rho, ops).real, abs=1e-12)


def test_energy_and_purity_conserved():
    rng = np.random.default_rng(4)
    c = power_law_couplings(build_lattice("chain", 6), 1.0, 1.3)
    st = oracle.build_random_state(6, rng, concentration=1.0)
    r0 = oracle.dense_rho(st, c, 0.8, 0.0)
    e0, p0 = oracle.energy_expectation(r0, c, 0.8), np.real(np.trace(r0 @ r0))
    for t in (0.5, 4.0, 17.0):
        r = oracle.dense_rho(st, c, 0.8, t, use_expm=True)
        assert oracle.energy_expectation(r, c, 0.8) == pytest.approx(e0, abs=1e-12)
        assert np.real(np.trace(r @ r)) == pytest.approx(p0, abs=1e-12)


def test_reduced_density_properties():
    st = oracle.build_product_state([0.2, 0.5, -0.4])
    c = power_law_couplings(build_lattice("chain", 3), 1.0, 1.0)
    r = oracle.reduced_density(oracle.dense_rho(st, c, 0.0, 0.0), [2])
    assert np.allclose(r, 0.5 * np.array([[1, -0.4], [-0.4, 1]]))
    r = oracle.reduced_density(oracle.dense_rho(st, c, 0.3, 1.1), [0, 2])
    assert np.isclose(np.trace(r), 1.0) and np.allclose(r, r.conj().T)


def test_short_verify_report_is_json():
    rep = oracle.verify(12, seed=7)
    assert rep["passed"] and rep["overall"] < 1e-10
    assert json.loads(oracle.report_json(rep))["n_instances"] == 12
