import numpy as np
import pytest
from scipy.integrate import quad

import weingarten as w
from weingarten.errors import DomainError, RegimeError
from weingarten.radial import (asymptotic_constant, monotone_bounds_report,
                               radial_g, solve_radial, uprime_fixed_point_gap)

from conftest import CATENOID_C, catenoid_height, linear_relation_slope


def test_initial_conditions_exact(minimal_spec):
    sol = solve_radial(minimal_spec, 1.0, 1.0, 10.0)
    assert sol.u[0] == 0.0
    assert sol.uprime[0] == 1.0
    assert sol.r[0] == 1.0 and sol.r[-1] == 10.0


def test_catenoid_equivalence(minimal_spec):
    sol = solve_radial(minimal_spec, 1.0, 1.0, 100.0, tol=1e-9)
    ucat = catenoid_height(sol.r)
    err = np.max(np.abs(sol.u - ucat) / np.maximum(ucat, 1e-12))
    assert err <= 1e-6


@pytest.mark.parametrize("a", [-0.25, -0.5, -1.0, -2.0, -4.0])
def test_linear_closed_form(a):
    spec = w.linear(a)
    sol = solve_radial(spec, 1.0, 1.0, 1e3, tol=1e-10)
    up = linear_relation_slope(sol.r, a)
    assert np.max(np.abs(sol.uprime - up) / up) <= 1e-6


@pytest.mark.parametrize("spec,R0,C0", [
    (w.minimal(), 1.0, 1.0),
    (w.minimal(), 0.5, 2.0),
    (w.linear(-0.5), 1.0, 1.0),
    (w.linear(-4.0), 2.0, 0.5),
    (w.expblend(0.25), 1.0, 1.5),
])
def test_monotone_bounds_at_accepted_steps(spec, R0, C0):
    sol = solve_radial(spec, R0, C0, 200.0 * R0, tol=1e-9)
    rep = monotone_bounds_report(sol)
    assert rep["ok"], rep


def test_radial_g_closed_forms():
    r, up = 3.0, 0.8
    assert radial_g(w.linear(-0.5), r, up) == pytest.approx(-0.5 * (1 + up ** 2), rel=1e-13)
    assert radial_g(w.minimal(), r, up) == pytest.approx(-(1 + up ** 2), rel=1e-13)
    # near-flat argument: f' ~ -1 for any minimal-type relation with f'(0) = -1
    val = radial_g(w.expblend(0.25), 10.0, 0.1)
    assert -1.01 < val < -0.99
    # quadrature oracle: expblend g has the closed form
    # -(1+up^2) * (lam + (1-lam)(1-exp(-x))/x), x = up/(r sqrt(1+up^2))
    lam = 0.25
    x = up / (r * np.sqrt(1 + up ** 2))
    expect = -(1 + up ** 2) * (lam + (1 - lam) * (1 - np.exp(-x)) / x)
    assert radial_g(w.expblend(lam), r, up) == pytest.approx(expect, rel=1e-12)


def test_radial_g_vectorized():
    r = np.array([1.0, 2.0, 4.0])
    up = np.array([1.0, 0.5, 0.25])
    g = radial_g(w.minimal(), r, up)
    assert np.allclose(g, -(1 + up ** 2), rtol=1e-13)
    with pytest.raises(DomainError):
        radial_g(w.minimal(), 1.0, -0.5)


def test_asymptotic_constant_power():
    # K = C0 R0^{-a} / ((1+a) sqrt(1+C0^2)) from the separable closed form
    for a in (-0.25, -0.5):
        sol = solve_radial(w.linear(a), 1.0, 1.0, 1e6, tol=1e-10)
        asym = asymptotic_constant(sol)
        expected = 1.0 / ((1.0 + a) * np.sqrt(2.0))
        assert asym.Kinf == pytest.approx(expected, rel=1e-3)
        assert asym.regime == "power"
        assert np.isfinite(asym.tail_estimate)


def test_asymptotic_constant_bounded():
    for a in (-2.0, -4.0):
        sol = solve_radial(w.linear(a), 1.0, 1.0, 1e4, tol=1e-10)
        asym = asymptotic_constant(sol)
        expected = quad(lambda r: linear_relation_slope(r, a), 1.0, np.inf)[0]
        assert asym.Kinf == pytest.approx(expected, rel=1e-3)
        assert asym.Kinf >= np.max(sol.u)  # Kinf is the sup of the profile
        assert asym.regime == "bounded"


def test_asymptote_log_regime_refused(minimal_spec):
    sol = solve_radial(minimal_spec, 1.0, 1.0, 50.0)
    with pytest.raises(RegimeError):
        asymptotic_constant(sol)


def test_kinf_to_zero_with_C0():
    vals = []
    for C0 in (0.1, 0.01, 0.001):
        sol = solve_radial(w.linear(-0.5), 1.0, C0, 1e4, tol=1e-10)
        vals.append(asymptotic_constant(sol).Kinf)
    assert vals[0] > vals[1] > vals[2] > 0.0


def test_kinf_increasing_in_R0():
    vals = []
    for R0 in (0.5, 1.0, 2.0, 4.0, 8.0):
        sol = solve_radial(w.linear(-0.5), R0, 1.0, 1e4 * R0, tol=1e-10)
        vals.append(asymptotic_constant(sol).Kinf)
    assert np.all(np.diff(vals) > 0)


def test_kinf_continuity_in_R0():
    base = asymptotic_constant(solve_radial(w.linear(-0.5), 1.0, 1.0, 1e4, tol=1e-10)).Kinf
    diffs = {}
    for delta in (1e-2, 1e-3):
        k = asymptotic_constant(
            solve_radial(w.linear(-0.5), 1.0 + delta, 1.0, 1e4, tol=1e-10)).Kinf
        diffs[delta] = abs(k - base)
    L = 2.0 * diffs[1e-2] / 1e-2
    assert diffs[1e-3] <= L * 1e-3


def test_log_growth_ratio_decreasing(minimal_spec):
    sol = solve_radial(minimal_spec, 1.0, 1.0, 1e4, tol=1e-10)
    r = sol.r
    ratios = []
    for rv in (50.0, 100.0, 200.0, 400.0, 800.0):
        i = np.searchsorted(r, rv)
        i2 = np.searchsorted(r, 2 * rv)
        ratios.append(abs(sol.u[i2] / np.log(r[i2]) - sol.u[i] / np.log(r[i])))
    assert np.all(np.diff(ratios) < 0)


def test_regime_tags():
    assert solve_radial(w.linear(-0.5), 1.0, 1.0, 10.0).regime == "power"
    assert solve_radial(w.minimal(), 1.0, 1.0, 10.0).regime == "log"
    assert solve_radial(w.linear(-2.0), 1.0, 1.0, 10.0).regime == "bounded"


def test_integral_form_cross_check(minimal_spec):
    sol = solve_radial(minimal_spec, 1.0, 1.0, 100.0, tol=1e-10)
    assert uprime_fixed_point_gap(sol) < 1e-3


def test_rejects_bad_inputs(minimal_spec):
    with pytest.raises(DomainError):
        solve_radial(minimal_spec, -1.0, 1.0, 10.0)
    with pytest.raises(DomainError):
        solve_radial(minimal_spec, 1.0, 0.0, 10.0)
    with pytest.raises(DomainError):
        solve_radial(minimal_spec, 1.0, 1.0, 0.5)
    cmc_like = w.custom(lambda t: 2.0 - t, lambda t: -np.ones_like(t),
                        lam=0.9, umbilic_c=1.0)
    with pytest.raises(DomainError):
        solve_radial(cmc_like, 1.0, 1.0, 10.0)


def test_output_grid_density(minimal_spec):
    sol = solve_radial(minimal_spec, 1.0, 1.0, 100.0)
    assert len(sol.r) == 129  # 64 nodes per decade over two decades
    lr = np.diff(np.log(sol.r))
    assert np.allclose(lr, lr[0], rtol=1e-9)
