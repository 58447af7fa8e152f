import numpy as np
import pytest

import weingarten as w
from weingarten.jetop import (GraphJet, curvatures, discriminant_poly,
                              ellipticity_bounds, fd_operator_derivs,
                              operator_derivs, operator_value)


def jet(p1, p2, m11, m12, m22):
    return GraphJet.from_components(p1, p2, m11, m12, m22)


def random_jets(rng, n, box=1.0):
    p = rng.uniform(-box, box, (n, 2))
    m = rng.uniform(-box, box, (n, 3))
    return GraphJet.from_components(p[:, 0], p[:, 1], m[:, 0], m[:, 1], m[:, 2])


# -- curvature quantities ----------------------------------------------------


def test_principal_axis_case():
    cv = curvatures(jet(0.0, 0.0, 1.0, 0.0, -1.0))
    assert cv.H == 0.0
    assert cv.Kgauss == -1.0
    assert cv.kappa1 == 1.0 and cv.kappa2 == -1.0
    assert cv.sigma_norm == pytest.approx(np.sqrt(2.0))


def test_flat_jet():
    cv = curvatures(jet(0.3, -0.4, 0.0, 0.0, 0.0))
    assert cv.H == 0.0 and cv.Kgauss == 0.0 and cv.sigma_norm == 0.0


def test_tilted_identity_jet():
    # independent evaluation of the two displayed formulas at p=(1,0), M=I
    cv = curvatures(jet(1.0, 0.0, 1.0, 0.0, 1.0))
    assert cv.H == pytest.approx(3.0 / (4.0 * np.sqrt(2.0)), rel=1e-15)
    assert cv.Kgauss == pytest.approx(0.25, rel=1e-15)


def test_curvature_consistency_random(rng):
    jets = random_jets(rng, 500)
    cv = curvatures(jets)
    assert np.allclose((cv.kappa1 + cv.kappa2) / 2.0, cv.H, rtol=1e-12, atol=1e-13)
    assert np.allclose(cv.kappa1 * cv.kappa2, cv.Kgauss, rtol=1e-12, atol=1e-12)
    assert np.all(cv.kappa1 >= cv.kappa2)


# -- discriminant polynomial -------------------------------------------------


def test_discriminant_values():
    assert discriminant_poly(jet(0.0, 0.0, 1.0, 0.0, 1.0)).value == 0.0
    # N_H^2 - 4 q det M at p=0, M=diag(1,-1): 0 - 4*1*(-1) = 4, consistent
    # with 4 (1+|p|^2)^3 (H^2-K) = 4 * 1 * 1
    assert discriminant_poly(jet(0.0, 0.0, 1.0, 0.0, -1.0)).value == pytest.approx(4.0)
    assert discriminant_poly(jet(1.0, 0.0, 1.0, 0.0, 1.0)).value == pytest.approx(1.0)


def test_discriminant_matches_disc(rng):
    jets = random_jets(rng, 400)
    cv = curvatures(jets)
    q = 1.0 + jets.p1 ** 2 + jets.p2 ** 2
    ratio = discriminant_poly(jets).value / (4.0 * q ** 3)
    assert np.allclose(ratio, cv.disc, rtol=1e-12, atol=1e-14)
    assert np.all(discriminant_poly(jets).value >= -1e-12)


def test_gradient_of_discriminant_bound(rng):
    # |DG| <= C sqrt(G) on |p| + |M| <= 1; empirical C measured ~5.3
    h = 1e-6
    worst = 0.0
    n = 0
    while n < 10000:
        v = rng.uniform(-1.0, 1.0, 5)
        if abs(v[0]) + abs(v[1]) + np.sqrt(v[2] ** 2 + 2 * v[3] ** 2 + v[4] ** 2) > 1.0:
            continue
        n += 1
        G = discriminant_poly(jet(*v)).value
        if G < 1e-8:
            continue
        grad = np.empty(5)
        for k in range(5):
            vp, vm = v.copy(), v.copy()
            vp[k] += h
            vm[k] -= h
            grad[k] = (discriminant_poly(jet(*vp)).value
                       - discriminant_poly(jet(*vm)).value) / (2.0 * h)
        worst = max(worst, float(np.linalg.norm(grad)) / np.sqrt(G))
    assert worst < 20.0


# -- operator values ---------------------------------------------------------


def test_planes_are_exact_zeros(minimal_spec, expblend_spec):
    for p in ((0.0, 0.0), (0.7, -0.3), (5.0, 2.0)):
        flat = jet(p[0], p[1], 0.0, 0.0, 0.0)
        assert operator_value(minimal_spec, flat, 0.0) == 0.0
        assert operator_value(minimal_spec, flat, 1e-8) == 0.0
        assert abs(operator_value(expblend_spec, flat, 1e-8)) < 1e-16


def test_operator_examples(minimal_spec):
    assert operator_value(minimal_spec, jet(0, 0, 1.0, 0.0, -1.0), 0.0) == 0.0
    lin = w.linear(-0.5)
    assert operator_value(lin, jet(0, 0, 1.0, 0.0, -1.0), 0.0) == pytest.approx(-0.5)


def test_rotational_invariance(rng):
    spec = w.expblend(0.25)
    n = 1000
    p = rng.uniform(-1.5, 1.5, (n, 2))
    ms = rng.uniform(-1.5, 1.5, (n, 2, 2))
    M = 0.5 * (ms + np.swapaxes(ms, 1, 2))
    ang = rng.uniform(0.0, 2 * np.pi, n)
    ca, sa = np.cos(ang), np.sin(ang)
    Q = np.empty((n, 2, 2))
    Q[:, 0, 0], Q[:, 0, 1], Q[:, 1, 0], Q[:, 1, 1] = ca, -sa, sa, ca
    j1 = GraphJet.from_arrays(p, M)
    j2 = GraphJet.from_arrays(np.einsum("nij,nj->ni", Q, p),
                              np.einsum("nij,njk,nlk->nil", Q, M, Q))
    v1 = operator_value(spec, j1, 1e-8)
    v2 = operator_value(spec, j2, 1e-8)
    assert np.max(np.abs(v1 - v2)) < 1e-12


def test_pinching_on_relation_jets(rng):
    # kappa2 = f(kappa1) forces 2|K| <= kappa1^2 + kappa2^2 <= (2/lam)|K|
    for spec, lam in ((w.minimal(), 1.0 - 1e-12), (w.expblend(0.4), 0.4),
                      (w.linear(-0.5), 0.5)):
        k1 = rng.uniform(0.05, 4.0, 500)
        k2 = w.eval_f(spec, k1)
        ang = rng.uniform(0, 2 * np.pi, 500)
        ca, sa = np.cos(ang), np.sin(ang)
        m11 = ca ** 2 * k1 + sa ** 2 * k2
        m22 = sa ** 2 * k1 + ca ** 2 * k2
        m12 = ca * sa * (k1 - k2)
        cv = curvatures(GraphJet.from_components(0.0, 0.0, m11, m12, m22))
        sq = cv.kappa1 ** 2 + cv.kappa2 ** 2
        absK = np.abs(cv.Kgauss)
        assert np.all(2.0 * absK <= sq * (1.0 + 1e-10))
        assert np.all(sq <= (2.0 / lam) * absK * (1.0 + 1e-10))
        # the constructed jets satisfy the relation exactly
        resid = operator_value(spec, GraphJet.from_components(0.0, 0.0, m11, m12, m22), 0.0)
        assert np.max(np.abs(resid)) < 1e-10


# -- derivatives -------------------------------------------------------------


def test_derivs_minimal_antidiag(minimal_spec):
    ev = operator_derivs(minimal_spec, jet(0.0, 0.0, 1.0, 0.0, -1.0), 1e-8)
    assert np.allclose(ev.dF_dM, np.eye(2), atol=1e-9)
    assert not ev.regularized


def test_derivs_dfdp_vanishes_by_symmetry():
    ev = operator_derivs(w.linear(-0.5), jet(0.0, 0.0, 1.0, 0.0, -1.0), 1e-8)
    assert np.allclose(ev.dF_dp, 0.0, atol=1e-10)


def test_derivs_at_flat_jet_positive():
    for spec in (w.minimal(), w.linear(-0.5), w.expblend(0.25)):
        ev = operator_derivs(spec, jet(0.0, 0.0, 0.0, 0.0, 0.0), 1e-4)
        eigs = np.linalg.eigvalsh(ev.dF_dM)
        assert np.all(eigs > 0)
        assert ev.regularized


def test_jacobian_vs_finite_differences(rng):
    spec = w.expblend(0.3)
    checked = 0
    while checked < 1000:
        v = rng.uniform(-1.0, 1.0, 5)
        j = jet(*v)
        if curvatures(j).disc < 1e-3:
            continue
        checked += 1
        ev = operator_derivs(spec, j, 1e-8, fd_check=False)
        fd = fd_operator_derivs(spec, j, 1e-8)
        an = np.array([ev.dF_dM[0, 0], 2.0 * ev.dF_dM[0, 1], ev.dF_dM[1, 1],
                       ev.dF_dp[0], ev.dF_dp[1]])
        fdv = np.array(fd)
        scale = np.maximum(np.abs(an), 1e-6)
        assert np.max(np.abs(an - fdv) / scale) <= 1e-5


def test_fd_check_is_noop_on_clean_jets(rng):
    spec = w.linear(-0.5)
    jets = random_jets(rng, 50)
    a = operator_derivs(spec, jets, 1e-8, fd_check=False)
    b = operator_derivs(spec, jets, 1e-8, fd_check=True)
    assert np.allclose(a.dF_dM, b.dF_dM, rtol=0, atol=0)
    assert np.allclose(a.dF_dp, b.dF_dp, rtol=0, atol=0)


def test_regularized_flag(minimal_spec):
    near = jet(0.0, 0.0, 1.0, 0.0, 1.0 - 1e-12)  # disc ~ 2.5e-25
    ev = operator_derivs(minimal_spec, near, 1e-8)
    assert ev.regularized
    far = jet(0.0, 0.0, 1.0, 0.0, -1.0)
    assert not operator_derivs(minimal_spec, far, 1e-8).regularized


def test_ellipticity_bounds(minimal_spec, rng):
    lo, hi = ellipticity_bounds(minimal_spec, jet(0.0, 0.0, 0.0, 0.0, 0.0), 1e-8)
    assert lo == pytest.approx(1.0, abs=1e-9)
    assert hi == pytest.approx(1.0, abs=1e-9)
    # duplicated jet: min equals max
    j = jet(0.2, 0.1, 0.5, 0.1, -0.4)
    lo2, hi2 = ellipticity_bounds(w.linear(-0.5), [j, j], 1e-8)
    assert lo2 == pytest.approx(hi2) or lo2 < hi2  # single jet has two eigenvalues
    assert lo2 > 0
    jets = random_jets(rng, 200, box=0.8)
    lo3, hi3 = ellipticity_bounds(w.expblend(0.25), jets, 1e-8)
    assert 0 < lo3 <= hi3 < np.inf
