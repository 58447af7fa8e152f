import dataclasses

import numpy as np
import pytest

import weingarten as w
from weingarten.asymfit import (check_constant_sign, circle_samples,
                                comparison_at_infinity, curvature_estimate_diag,
                                default_window, fit_log_expansion, fit_power,
                                select_regime)
from weingarten.errors import (HemisphereError, OrderingError, WindowError)
from weingarten.fdsolver import (BoundaryData, SolverConfig, annulus, disk,
                                 linear_boundary, solve_dirichlet,
                                 solve_exterior)
from weingarten.jetop import curvatures
from weingarten.radial import asymptotic_constant

from conftest import CATENOID_C, catenoid_height


def catenoid_bc(rin, rout):
    return BoundaryData.pair(
        lambda th: np.full_like(th, float(catenoid_height(rin))),
        lambda th: np.full_like(th, float(catenoid_height(rout))))


# -- log expansion fits -------------------------------------------------------


def test_synthetic_log_fit():
    r = 10.0 * np.logspace(0, 2, 129)
    ub = 2.0 * np.log(r) + 3.0 + r ** -0.5
    fit = fit_log_expansion((r, ub), window=(10.0, 1e3))
    assert fit.d == pytest.approx(2.0, rel=0.02)
    assert fit.c == pytest.approx(3.0, rel=0.02)
    assert fit.alpha == pytest.approx(0.5, rel=0.02)
    assert fit.r2 > 0.9


def test_exact_log_data_recovered_to_1e10():
    r = np.logspace(0.5, 3, 100)
    fit = fit_log_expansion((r, -0.3 * np.log(r) + 7.0))
    assert abs(fit.d + 0.3) < 1e-10
    assert abs(fit.c - 7.0) < 1e-10
    assert fit.warning == "remainder at noise floor"


def test_plane_data():
    r = np.logspace(0.5, 2, 64)
    fit = fit_log_expansion((r, np.full_like(r, 5.0)))
    assert abs(fit.d) < 1e-12
    assert fit.c == pytest.approx(5.0, abs=1e-12)
    assert 0.0 < fit.alpha < 1.0


def test_catenoid_log_coefficient(minimal_spec):
    # u = c log r + c log(2/c) - c arccosh(R0/c) + O(r^-2): d equals the
    # catenoid scale and the constant matches the symbolic expansion
    sol = w.solve_radial(minimal_spec, 1.0, 1.0, 1e4, tol=1e-11)
    fit = fit_log_expansion(sol)
    c = CATENOID_C
    assert fit.d == pytest.approx(c, rel=1e-4)
    c_expected = c * np.log(2.0 / c) - c * np.arccosh(1.0 / c)
    assert fit.c == pytest.approx(c_expected, abs=1e-5)
    assert 0.0 < fit.alpha < 1.0
    assert fit.raw_remainder_rate == pytest.approx(2.0, abs=0.1)
    assert fit.r2 >= 0.9


def test_window_errors():
    r = np.logspace(0, 2, 50)
    with pytest.raises(WindowError):
        fit_log_expansion((r, np.log(r)), window=(1.0, 5.0))  # < one decade
    with pytest.raises(WindowError):
        fit_log_expansion((r[:5], np.log(r[:5])))  # too few radii


# -- power fits ---------------------------------------------------------------


def test_synthetic_power_fit():
    r = 10.0 * np.logspace(0, 2, 129)
    fit = fit_power((r, 4.0 * r ** 0.5 + 1.0), 0.5)
    assert fit.Kinf == pytest.approx(4.0, rel=1e-10)
    assert fit.drift < 0.05


def test_power_fit_cross_module():
    sol = w.solve_radial(w.linear(-0.5), 1.0, 1.0, 1e6, tol=1e-10)
    fit = fit_power(sol, 0.5)
    asym = asymptotic_constant(sol)
    assert fit.Kinf == pytest.approx(asym.Kinf, rel=1e-3)


def test_power_fit_negative_control():
    r = 10.0 * np.logspace(0, 2, 129)
    fit = fit_power((r, np.log(r)), 0.5)
    assert fit.drift > 0.05
    assert fit.warning is not None
    with pytest.raises(WindowError):
        fit_power((r, np.sqrt(r)), 1.5)


# -- model selection ------------------------------------------------------------


def test_trichotomy_verdicts():
    cases = [(w.linear(-0.5), "power"), (w.minimal(), "log"),
             (w.expblend(0.25), "log"), (w.linear(-2.0), "bounded")]
    for spec, expected in cases:
        sol = w.solve_radial(spec, 1.0, 1.0, 1e4, tol=1e-11)
        verdict, scores = select_regime(sol)
        assert verdict == expected, (spec.label(), scores)


def test_model_selection_scores_ordered():
    pw = w.solve_radial(w.linear(-0.5), 1.0, 1.0, 1e4, tol=1e-11)
    _, s1 = select_regime(pw)
    assert s1["r2_power"] > s1["r2_log"]
    lg = w.solve_radial(w.minimal(), 1.0, 1.0, 1e4, tol=1e-11)
    _, s2 = select_regime(lg)
    assert s2["r2_log"] > s2["r2_power"]
    bd = w.solve_radial(w.linear(-2.0), 1.0, 1.0, 1e4, tol=1e-11)
    _, s3 = select_regime(bd)
    assert abs(s3["d"]) < 0.01
    assert s3["c"] == pytest.approx(asymptotic_constant(bd).Kinf, rel=0.02)


# -- constant sign ---------------------------------------------------------------


def test_sign_catenoid_positive(minimal_spec):
    sol = w.solve_radial(minimal_spec, 1.0, 1.0, 100.0)
    rep = check_constant_sign(sol)
    assert rep.sign == "positive"
    assert rep.plane_height == 0.0


def test_sign_bounded_negative():
    sol = w.solve_radial(w.linear(-2.0), 1.0, 1.0, 1e4)
    rep = check_constant_sign(sol)
    assert rep.sign == "negative"
    assert rep.plane_height > 0.0


def test_sign_mixed_with_witness(minimal_spec):
    cfg = SolverConfig(n_s=8, n_theta=16)
    sol = solve_dirichlet(minimal_spec, disk(1.0),
                          BoundaryData(phi=lambda th: 0.2 * np.cos(th)), cfg)
    rep = check_constant_sign(sol)
    assert rep.sign == "mixed"
    assert 0 <= rep.witness < sol.grid.n_interior
    assert abs(rep.witness_value) == rep.margin


# -- comparison at infinity -------------------------------------------------------


def test_comparison_constant_offset():
    r = np.logspace(0.2, 3, 256)
    base = CATENOID_C * np.arccosh(r / CATENOID_C)
    rep = comparison_at_infinity((r, base + 2.0), (r, base))
    assert rep.bracketing_ok
    assert rep.c0_estimate == pytest.approx(2.0, abs=1e-12)
    assert not rep.log_divergent and not rep.agreement


def test_comparison_identical_flags_agreement():
    r = np.logspace(0.2, 3, 256)
    base = CATENOID_C * np.arccosh(r / CATENOID_C)
    rep = comparison_at_infinity((r, base), (r, base))
    assert rep.agreement
    assert rep.c0_estimate == 0.0
    assert rep.bracketing_ok


def test_comparison_log_divergent_pair():
    r = np.logspace(0.4, 3, 256)
    c1, c2 = CATENOID_C, 0.9 / np.sqrt(1.81)
    u1 = c1 * (np.arccosh(r / c1) - np.arccosh(1.0 / c1))
    u2 = c2 * (np.arccosh(r / c2) - np.arccosh(1.0 / c2))
    rep = comparison_at_infinity((r, u1), (r, u2))
    assert rep.log_divergent
    assert rep.log_slope == pytest.approx(c1 - c2, rel=0.05)
    assert not rep.bracketing_ok


def test_comparison_ordering_error():
    r = np.logspace(0.2, 2, 64)
    with pytest.raises(OrderingError):
        comparison_at_infinity((r, np.log(r)), (r, np.log(r) + 0.5))


def test_comparison_on_grid_pair(minimal_spec):
    cfg = SolverConfig(n_s=16, n_theta=16)
    hi_bc = BoundaryData.pair(
        lambda th: np.full_like(th, float(catenoid_height(1.0)) + 0.3),
        lambda th: np.full_like(th, float(catenoid_height(12.0)) + 0.3))
    sol_hi = solve_exterior(minimal_spec, annulus(1.0, 12.0), hi_bc, config=cfg)
    sol_lo = solve_exterior(minimal_spec, annulus(1.0, 12.0),
                            catenoid_bc(1.0, 12.0), config=cfg)
    rep = comparison_at_infinity(sol_hi, sol_lo)
    assert rep.bracketing_ok
    assert rep.c0_estimate == pytest.approx(0.3, abs=1e-6)


# -- curvature-estimate diagnostic -------------------------------------------------


def test_curvature_diag_plane_zero(minimal_spec):
    dom = disk(1.0)
    sol = solve_dirichlet(minimal_spec, dom,
                          BoundaryData(phi=linear_boundary(0.2, 0.1)(dom)),
                          SolverConfig(n_s=8, n_theta=16))
    assert curvature_estimate_diag(sol) < 1e-10


def test_curvature_diag_catenoid_stable(minimal_spec):
    vals = []
    for n in (16, 32):
        cfg = SolverConfig(n_s=n, n_theta=2 * n)
        sol = solve_exterior(minimal_spec, annulus(1.0, 8.0),
                             catenoid_bc(1.0, 8.0), config=cfg)
        vals.append(curvature_estimate_diag(sol))
    assert abs(vals[1] - vals[0]) / vals[0] <= 0.10
    assert vals[0] > 0.1


def test_curvature_diag_spike_increases(minimal_spec):
    cfg = SolverConfig(n_s=8, n_theta=16)
    sol = solve_dirichlet(minimal_spec, disk(1.0), BoundaryData.constant(0.0), cfg)
    base = curvature_estimate_diag(sol)
    u2 = sol.u.copy()
    u2[3 * 16 + 4] += 0.05
    spiked = dataclasses.replace(sol, u=u2,
                                 curvature_field=curvatures(sol.grid.jets(u2)))
    assert curvature_estimate_diag(spiked) > base + 0.1


def test_curvature_diag_hemisphere_guard(minimal_spec):
    cfg = SolverConfig(n_s=8, n_theta=16)
    sol = solve_dirichlet(minimal_spec, disk(1.0), BoundaryData.constant(0.0), cfg)
    steep = dataclasses.replace(sol, u=10.0 * sol.nodes[:, 0],
                                curvature_field=sol.curvature_field)
    with pytest.raises(HemisphereError):
        curvature_estimate_diag(steep)


# -- gradient decay invariant ------------------------------------------------------


@pytest.mark.parametrize("make", [w.minimal, lambda: w.expblend(0.25)])
def test_gradient_decay_exponent(make):
    # measured |u'| decay on log-regime profiles beats the (capped)
    # remainder rate minus 0.05
    sol = w.solve_radial(make(), 1.0, 1.0, 1e4, tol=1e-11)
    fit = fit_log_expansion(sol)
    mask = sol.r >= sol.r[-1] / 100.0
    slope, _ = np.polyfit(np.log(sol.r[mask]), np.log(sol.uprime[mask]), 1)
    assert -slope >= fit.alpha - 0.05


# -- plumbing ---------------------------------------------------------------------


def test_circle_samples_radial_and_grid(minimal_spec):
    sol = w.solve_radial(minimal_spec, 1.0, 1.0, 10.0)
    r, mins, maxs, means = circle_samples(sol)
    assert np.all(mins == maxs)
    cfg = SolverConfig(n_s=8, n_theta=16)
    gsol = solve_exterior(minimal_spec, annulus(1.0, 4.0),
                          catenoid_bc(1.0, 4.0), config=cfg)
    radii, gmin, gmax, gmean = circle_samples(gsol)
    assert len(radii) == 8
    assert np.all(gmin <= gmean) and np.all(gmean <= gmax)


def test_default_window_spans_two_decades():
    r = np.logspace(0, 4, 100)
    assert default_window(r) == (100.0, 10000.0)
