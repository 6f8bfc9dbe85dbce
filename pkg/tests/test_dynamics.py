import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinrelax import dynamics as dyn
from spinrelax.errors import InvalidArgumentError
from spinrelax.lattice import build_lattice, power_law_couplings


def setup(kind="triangular-hex", L=3, alpha=1.5, sx=0.8, sxx=None):
    lat = build_lattice(kind, L)
    c = power_law_couplings(lat, 1.0, alpha)
    return lat, c, dyn.InitialMoments.uniform(lat.N, sx, sxx)


T = np.linspace(0.0, 7.0, 57)


def test_empty_products_for_two_sites():
    lat, c, m = setup("chain", 2, sx=0.6, sxx=0.5)
    assert np.all(dyn.p_plus(c, 0, 1, T).to_linear() == 1.0)
    assert np.allclose(dyn.corr_xx(m, c, 0, 1, T), 0.5)
    assert np.allclose(dyn.corr_yy(m, c, 0, 1, T), 0.0)
    assert np.allclose(dyn.one_spin_x(m, c, 0, T), 0.6 * np.cos(2 * T * c[0, 1]))
    assert np.allclose(np.abs(dyn.corr_yz(m, c, 0, 1, T)), np.abs(0.6 * np.sin(2 * T * c[0, 1])))


def test_initial_values():
    lat, c, m = setup(sx=0.7, sxx=0.3)
    i, j = lat.center_pair()
    assert dyn.corr_xx(m, c, i, j, 0.0) == pytest.approx(0.3, rel=1e-15)
    assert dyn.corr_yy(m, c, i, j, 0.0) == 0.0
    assert dyn.corr_xy(m, c, i, j, 0.0, B=1.0) == 0.0
    assert dyn.p_z(m, c, i, j, 0.0) == 0.0
    assert dyn.one_spin_x(m, c, i, 0.0) == pytest.approx(0.7, rel=1e-15)
    re, im = dyn.corr_ppp(m, c, 0, i, j, 0.0)
    assert np.isclose(re, 0.7 ** 3 / 8) and im == 0.0


def test_alpha_zero_pminus_is_one():
    lat, c, m = setup(alpha=0.0)
    assert np.all(dyn.p_minus(c, 1, 4, T).to_linear() == 1.0)


def test_zero_field_vanishing_components():
    lat, c, m = setup()
    assert np.all(dyn.corr_xy(m, c, 1, 4, T) == 0.0)
    assert np.all(dyn.corr_xz(m, c, 1, 4, T) == 0.0)
    assert np.all(dyn.corr_zz(1, 4, T) == 0.0)


def test_xy_at_quarter_phase():
    lat, c, m = setup(sxx=0.4)
    t = 0.9
    B = np.pi / (8 * t)
    pp = dyn.p_plus(c, 1, 4, t).to_linear()
    assert np.isclose(dyn.corr_xy(m, c, 1, 4, t, B), -0.5 * 0.4 * pp, rtol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 2.0), st.floats(-1, 1))
def test_sum_rule_and_moment_bound(alpha, B, sxx):
    lat, c, m = setup(alpha=alpha, sx=0.9, sxx=sxx)
    i, j = lat.center_pair()
    xx = dyn.corr_xx(m, c, i, j, T, B)
    yy = dyn.corr_yy(m, c, i, j, T, B)
    pm = dyn.p_minus(c, i, j, T).to_linear()
    assert np.allclose(xx + yy, sxx * pm, rtol=1e-12, atol=1e-15)
    assert np.all(np.abs(xx) <= abs(sxx) + 1e-15) and np.all(np.abs(yy) <= abs(sxx) + 1e-15)
    assert np.all(np.abs(dyn.one_spin_x(m, c, i, T, B)) <= 0.9 + 1e-15)


def test_period_pi_at_alpha_zero():
    lat, c, m = setup(alpha=0.0)
    t = np.linspace(0.0, 3.0, 31)
    for obs, idx in (("xx", (1, 4)), ("yy", (1, 4)), ("yz", (1, 4)), ("x", (2,)), ("ppp", (0, 1, 4))):
        a = dyn.evaluate_series(m, c, obs, idx, t).linear
        b = dyn.evaluate_series(m, c, obs, idx, t + np.pi).linear
        assert np.allclose(a, b, rtol=0, atol=1e-12), obs


def test_linear_in_pair_moment():
    lat, c, m = setup(sxx=0.3)
    i, j = lat.center_pair()
    doubled = m.scaled(2.0)
    assert np.allclose(dyn.corr_xx(doubled, c, i, j, T), 2 * dyn.corr_xx(m, c, i, j, T), rtol=1e-14, atol=0)


def test_normalized_independent_of_moments():
    lat, c, m1 = setup(sx=0.9, sxx=0.2)
    m2 = dyn.InitialMoments.uniform(lat.N, -0.4, 0.7)
    i, j = lat.center_pair()
    for obs, idx in (("xx", (i, j)), ("yz", (i, j)), ("x", (i,))):
        a = dyn.evaluate_series(m1, c, obs, idx, T[1:]).normalized
        b = dyn.evaluate_series(m2, c, obs, idx, T[1:]).normalized
        assert np.allclose(a, b, rtol=1e-13, atol=1e-16)


def test_values_far_below_double_range_survive():
    lat = build_lattice("triangular-hex", 16)
    c = power_law_couplings(lat, 1.0, 0.75)
    i, j = lat.center_pair()
    v = dyn.p_plus(c, i, j, np.array([1.0]))
    assert v.log10[0] < -140 and v.to_linear()[0] < 1e-140
    s = dyn.evaluate_series(dyn.InitialMoments.uniform(lat.N), c, "Pplus", (i, j), np.array([0.5, 2.0]))
    assert s.values.log10[1] < -300 and s.values.sign[1] != 0


def test_index_errors():
    lat, c, m = setup()
    with pytest.raises(InvalidArgumentError):
        dyn.p_plus(c, 2, 2, T)
    with pytest.raises(InvalidArgumentError):
        dyn.corr_xx(m, c, 0, lat.N, T)
    with pytest.raises(InvalidArgumentError):
        dyn.evaluate_series(m, c, "xx", (1,), T)
    with pytest.raises(InvalidArgumentError):
        dyn.evaluate_series(m, c, "xq", (1, 2), T)
    with pytest.raises(InvalidArgumentError):
        dyn.evaluate_series(m, c, "xx", (1, 2), T[::-1])


def test_moment_validation():
    with pytest.raises(InvalidArgumentError):
        dyn.InitialMoments([1.2, 0.0])
    with pytest.raises(InvalidArgumentError):
        dyn.InitialMoments([0.1, 0.2], np.array([[0, 0.5], [0.4, 0]]))
    m = dyn.InitialMoments([0.5, 0.5, 0.5], sxxx={(2, 0, 1): 0.1})
    assert m.xxx(1, 2, 0) == 0.1 and m.xx(0, 1) == 0.25 and m.xx(1, 1) == 1.0


def test_relaxation_time_gaussian():
    t = np.linspace(0.0, 3.0, 30001)
    v = np.exp(-t ** 2)
    s = dyn.CorrelatorSeries("xx", (0, 1), t, dyn.SignedLogValue.from_linear(v))
    assert abs(dyn.relaxation_time(s) - 1.0) < 2e-4


def test_relaxation_time_no_decay():
    lat, c, m = setup(alpha=0.0)
    s = dyn.evaluate_series(m, c, "Pminus", (1, 4), np.geomspace(1e-3, 1e2, 200))
    assert dyn.relaxation_time(s) == np.inf


def test_relaxation_needs_dwell_coverage():
    t = np.linspace(0.0, 1.2, 1201)
    s = dyn.CorrelatorSeries("xx", (0, 1), t, dyn.SignedLogValue.from_linear(np.exp(-t ** 2)))
    assert dyn.relaxation_time(s) == np.inf


def test_recurrence_scan_trivial_cases():
    lat, c, m = setup("chain", 2)
    s = dyn.evaluate_series(m, c, "xx", (0, 1), T)
    assert dyn.recurrence_scan(s, 0.5) == []
    t = np.linspace(0, 10, 1001)
    v = np.cos(t) ** 2
    s = dyn.CorrelatorSeries("xx", (0, 1), t, dyn.SignedLogValue.from_linear(v))
    hits = dyn.recurrence_scan(s, 0.9)
    assert len(hits) == 3 and np.allclose(hits, [np.pi - 0.32, 2 * np.pi - 0.32, 3 * np.pi - 0.32], atol=0.01)
    with pytest.raises(InvalidArgumentError):
        dyn.recurrence_scan(s, 1.5)


def test_series_records_metadata():
    lat, c, m = setup()
    s = dyn.evaluate_series(m, c, "ppp", (0, 1, 4), T, B=0.3)
    assert s.meta["L"] == 3 and s.meta["kind"] == "triangular-hex" and s.imag is not None
    assert s.norm == pytest.approx(0.8 ** 3 / 8)
