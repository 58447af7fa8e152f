"""Curvature quantities of a graph 2-jet and the fully nonlinear operator.

For a graph with gradient p and Hessian M the mean and Gaussian
curvatures are

    H(p, M) = ((1+p2^2) M11 - 2 p1 p2 M12 + (1+p1^2) M22) / (2 (1+|p|^2)^(3/2))
    K(p, M) = det M / (1+|p|^2)^2

and the relation kappa2 = f(kappa1) becomes the residual

    F(p, M) = H - s - f(H + s),        s = sqrt(H^2 - K).

Newton assembly needs a C^1 operator, so the square root is replaced by
the shifted surrogate s_eps = sqrt(H^2 - K + eps^2) - eps.  The shift
keeps F(p, 0) identically zero for minimal-type relations (planes stay
exact solutions at any eps), while first derivatives coincide with the
plain sqrt(.. + eps^2) regularization.

Everything here is pure and vectorized: jets may carry any batch shape.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import WeingartenError
from .relation import eval_f, eval_fprime

log = logging.getLogger(__name__)

DEFAULT_EPS = 1e-8

# rounding slack: disc below -CLAMP*scale signals an internal inconsistency
_DISC_CLAMP = 1e-14


@dataclass(frozen=True)
class GraphJet:
    """Gradient-Hessian pair of a graph; components may be arrays.

    The Hessian is stored as (m11, m12, m22) so symmetry holds by
    construction.  All fields broadcast together.
    """

    p1: np.ndarray
    p2: np.ndarray
    m11: np.ndarray
    m12: np.ndarray
    m22: np.ndarray

    @classmethod
    def from_arrays(cls, p, M):
        """Build from p with trailing axis 2 and M with trailing (2, 2)."""
        p = np.asarray(p, dtype=float)
        M = np.asarray(M, dtype=float)
        if not np.allclose(M[..., 0, 1], M[..., 1, 0], rtol=0.0, atol=1e-12):
            raise WeingartenError("Hessian must be symmetric")
        return cls(p[..., 0], p[..., 1], M[..., 0, 0], M[..., 0, 1], M[..., 1, 1])

    @classmethod
    def from_components(cls, p1, p2, m11, m12, m22):
        arrs = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                     for a in (p1, p2, m11, m12, m22)))
        return cls(*arrs)

    @property
    def p(self):
        return np.stack([np.asarray(self.p1, dtype=float),
                         np.asarray(self.p2, dtype=float)], axis=-1)

    @property
    def M(self):
        m11, m12, m22 = (np.asarray(a, dtype=float) for a in (self.m11, self.m12, self.m22))
        row1 = np.stack([m11, m12], axis=-1)
        row2 = np.stack([m12, m22], axis=-1)
        return np.stack([row1, row2], axis=-2)


@dataclass(frozen=True)
class CurvatureData:
    """Derived curvature fields of a jet (arrays broadcast like the jet)."""

    H: np.ndarray
    Kgauss: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    sigma_norm: np.ndarray
    disc: np.ndarray


@dataclass(frozen=True)
class OperatorEval:
    """Operator value with its first derivatives.

    ``dF_dM`` is the symmetric tensor a^{ij} of the linearization
    a^{ij} w_ij (the off-diagonal entry counts twice in contractions);
    ``dF_dp`` the gradient-direction coefficients.
    """

    value: np.ndarray
    dF_dM: np.ndarray
    dF_dp: np.ndarray
    regularized: np.ndarray


@dataclass(frozen=True)
class DiscriminantPoly:
    """Value of the nonnegative polynomial G with H^2 - K = G / (4 q^3)."""

    value: np.ndarray


def _q(jet):
    return 1.0 + jet.p1 ** 2 + jet.p2 ** 2


def _numerator_H(jet):
    return ((1.0 + jet.p2 ** 2) * jet.m11 - 2.0 * jet.p1 * jet.p2 * jet.m12
            + (1.0 + jet.p1 ** 2) * jet.m22)


def mean_gauss(jet):
    """(H, K) of a jet."""
    q = _q(jet)
    H = _numerator_H(jet) / (2.0 * q ** 1.5)
    K = (jet.m11 * jet.m22 - jet.m12 ** 2) / q ** 2
    return H, K


def curvatures(jet):
    """Principal curvatures and friends; disc clamped at tiny negatives.

    disc = H^2 - K is nonnegative analytically; rounding may leave it a
    hair below zero, which is clamped.  A violation beyond rounding
    scale raises, since it means the jet arithmetic is inconsistent.
    """
    H, K = mean_gauss(jet)
    disc = H * H - K
    scale = np.maximum(1.0, H * H + np.abs(K))
    bad = disc < -_DISC_CLAMP * scale
    if np.any(bad):
        raise WeingartenError(
            f"negative discriminant beyond rounding: min {np.min(disc)}")
    disc = np.maximum(disc, 0.0)
    root = np.sqrt(disc)
    k1 = H + root
    k2 = H - root
    return CurvatureData(H=H, Kgauss=K, kappa1=k1, kappa2=k2,
                         sigma_norm=np.sqrt(k1 * k1 + k2 * k2), disc=disc)


def discriminant_poly(jet):
    """G(p, M) = N_H^2 - 4 (1+|p|^2) det M, with H^2 - K = G / (4 (1+|p|^2)^3)."""
    n = _numerator_H(jet)
    det = jet.m11 * jet.m22 - jet.m12 ** 2
    return DiscriminantPoly(value=n * n - 4.0 * _q(jet) * det)


def _surrogate_root(disc, eps):
    """Smoothed sqrt(disc): sqrt(disc + eps^2) - eps, and its d/d(disc)."""
    base = np.sqrt(disc + eps * eps)
    with np.errstate(divide="ignore"):
        ds = 0.5 / base
    return base - eps, ds


def operator_value(spec, jet, eps=DEFAULT_EPS):
    """Residual of the curvature relation at a jet.

    With eps = 0 this is exactly kappa2 - f(kappa1); for eps > 0 the
    umbilic kink is smoothed but F(p, 0) stays 0 for minimal type.
    """
    if eps < 0:
        raise WeingartenError("eps must be >= 0")
    H, K = mean_gauss(jet)
    disc = np.maximum(H * H - K, 0.0)
    s, _ = _surrogate_root(disc, eps)
    return (H - s) - eval_f(spec, H + s)


def _H_derivatives(jet):
    """Tensor dH/dM (2x2) and dH/dp, all batched."""
    q = _q(jet)
    q32 = q ** 1.5
    a11 = (1.0 + jet.p2 ** 2) / (2.0 * q32)
    a12 = -(jet.p1 * jet.p2) / (2.0 * q32)
    a22 = (1.0 + jet.p1 ** 2) / (2.0 * q32)
    n = _numerator_H(jet)
    dn_dp1 = 2.0 * (jet.p1 * jet.m22 - jet.p2 * jet.m12)
    dn_dp2 = 2.0 * (jet.p2 * jet.m11 - jet.p1 * jet.m12)
    h_p1 = dn_dp1 / (2.0 * q32) - 3.0 * jet.p1 * n / (2.0 * q ** 2.5)
    h_p2 = dn_dp2 / (2.0 * q32) - 3.0 * jet.p2 * n / (2.0 * q ** 2.5)
    return (a11, a12, a22), (h_p1, h_p2)


def _K_derivatives(jet):
    """Tensor dK/dM (adjugate over q^2) and dK/dp."""
    q = _q(jet)
    det = jet.m11 * jet.m22 - jet.m12 ** 2
    k11 = jet.m22 / q ** 2
    k12 = -jet.m12 / q ** 2
    k22 = jet.m11 / q ** 2
    k_p1 = -4.0 * jet.p1 * det / q ** 3
    k_p2 = -4.0 * jet.p2 * det / q ** 3
    return (k11, k12, k22), (k_p1, k_p2)


def operator_derivs(spec, jet, eps=DEFAULT_EPS, fd_check=True):
    """Value plus first derivatives of the regularized operator.

    The analytic formula is

        F_w = (1 - f') H_w - (1 + f') (H^2 - K)_w / (2 sqrt(H^2 - K + eps^2))

    which is the exact derivative of the surrogate operator everywhere.
    When ``fd_check`` is on, entries outside the regularized zone
    (disc >= eps^2, where a central difference of the surrogate is
    trustworthy) are cross-checked against finite differences; on a
    relative disagreement beyond 1e-4 the finite-difference value wins
    and the event is logged.  Inside the regularized zone the analytic
    value is kept: the surrogate is smooth there by construction, while
    finite differences see its O(1/eps) higher derivatives.
    """
    H, K = mean_gauss(jet)
    disc = np.maximum(H * H - K, 0.0)
    s, ds = _surrogate_root(disc, eps)
    k1_eff = H + s
    value = (H - s) - eval_f(spec, k1_eff)
    fp = eval_fprime(spec, k1_eff)

    (a11, a12, a22), (h_p1, h_p2) = _H_derivatives(jet)
    (k11, k12, k22), (k_p1, k_p2) = _K_derivatives(jet)
    # disc_w = 2 H H_w - K_w
    d11 = 2.0 * H * a11 - k11
    d12 = 2.0 * H * a12 - k12
    d22 = 2.0 * H * a22 - k22
    d_p1 = 2.0 * H * h_p1 - k_p1
    d_p2 = 2.0 * H * h_p2 - k_p2

    one_m = 1.0 - fp
    one_p = (1.0 + fp) * ds
    fm11 = one_m * a11 - one_p * d11
    fm12 = one_m * a12 - one_p * d12
    fm22 = one_m * a22 - one_p * d22
    fp1 = one_m * h_p1 - one_p * d_p1
    fp2 = one_m * h_p2 - one_p * d_p2

    regularized = disc < eps * eps
    if fd_check:
        fm11, fm12, fm22, fp1, fp2 = _fd_override(
            spec, jet, eps, regularized, (fm11, fm12, fm22, fp1, fp2))

    row1 = np.stack([fm11, fm12], axis=-1)
    row2 = np.stack([fm12, fm22], axis=-1)
    dF_dM = np.stack([row1, row2], axis=-2)
    dF_dp = np.stack([fp1, fp2], axis=-1)
    return OperatorEval(value=value, dF_dM=dF_dM, dF_dp=dF_dp,
                        regularized=regularized)


_FD_DISAGREE = 1e-4


def fd_operator_derivs(spec, jet, eps=DEFAULT_EPS, step=1e-6):
    """Central finite differences of operator_value in the five jet
    components.  Returns (fm11, fm12_single, fm22, fp1, fp2) where the
    m12 entry is the derivative in the single stored off-diagonal
    variable, i.e. twice the tensor component."""
    comps = ("p1", "p2", "m11", "m12", "m22")
    base = {c: np.asarray(getattr(jet, c), dtype=float) for c in comps}
    out = {}
    for c in comps:
        hi = dict(base)
        lo = dict(base)
        h = step * np.maximum(1.0, np.abs(base[c]))
        hi[c] = base[c] + h
        lo[c] = base[c] - h
        fhi = operator_value(spec, GraphJet(**hi), eps)
        flo = operator_value(spec, GraphJet(**lo), eps)
        out[c] = (fhi - flo) / (2.0 * h)
    return out["m11"], out["m12"], out["m22"], out["p1"], out["p2"]


def _fd_override(spec, jet, eps, regularized, analytic):
    fm11, fm12, fm22, fp1, fp2 = analytic
    fd11, fd12, fd22, fdp1, fdp2 = fd_operator_derivs(spec, jet, eps)
    fd12 = 0.5 * fd12  # single-variable m12 derivative -> tensor entry
    replaced = 0
    outs = []
    for an, fd in ((fm11, fd11), (fm12, fd12), (fm22, fd22),
                   (fp1, fdp1), (fp2, fdp2)):
        scale = np.maximum(np.abs(an), np.maximum(np.abs(fd), 1e-8))
        mism = (np.abs(an - fd) > _FD_DISAGREE * scale) & ~regularized
        if np.any(mism):
            an = np.where(mism, fd, an)
            replaced += int(np.count_nonzero(mism))
        outs.append(an)
    if replaced:
        log.warning("operator_derivs: %d entries replaced by finite differences",
                    replaced)
    return tuple(outs)


def ellipticity_bounds(spec, jet_samples, eps=DEFAULT_EPS):
    """Empirical (min, max) eigenvalue of dF/dM over a jet sample.

    These are the measured ellipticity constants of the linearized
    equation on the sampled region of jet space.
    """
    if isinstance(jet_samples, GraphJet):
        jet_samples = [jet_samples]
    if len(jet_samples) == 0:
        raise WeingartenError("ellipticity_bounds needs at least one jet")
    lo = np.inf
    hi = -np.inf
    for jet in jet_samples:
        ev = operator_derivs(spec, jet, eps, fd_check=False)
        a = ev.dF_dM[..., 0, 0]
        b = ev.dF_dM[..., 0, 1]
        c = ev.dF_dM[..., 1, 1]
        mid = 0.5 * (a + c)
        rad = np.sqrt(0.25 * (a - c) ** 2 + b * b)
        lo = min(lo, float(np.min(mid - rad)))
        hi = max(hi, float(np.max(mid + rad)))
    return lo, hi
