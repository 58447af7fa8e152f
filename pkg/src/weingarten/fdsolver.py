"""Dirichlet and exterior solves on boundary-fitted polar-type grids.

The continuation path t*F + (1-t)*Laplace walks t from 0 to 1 with a
damped Newton inner loop; the t = 0 start is the discrete harmonic
extension of the boundary data.

Discretization.  Domains are parametrized by (s, theta): disks and
ellipses through the scaled map x = s*(a cos theta, b sin theta) with
staggered radial stations s_j = (j - 1/2) h (no pole node, ring 1
coupled to its antipode), star-convex domains through x = s*rho(theta)*
(cos theta, sin theta), annuli as plain (r, theta) tensor grids.
Radial derivatives use second-order central differences; the periodic
theta direction is differentiated spectrally, which makes the discrete
jet of any affine height field vanish identically on disk/ellipse/
annulus grids, so tilted planes are reproduced exactly by the solver.

All Cartesian jet components are precomputed sparse operators, so the
Newton matrix is a row-scaled sum of five fixed matrices.
"""

import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import splu

from .errors import (ContinuationStall, GeometryError, SingularJacobian,
                     WeingartenError)
from .jetop import GraphJet, curvatures, operator_derivs, operator_value

DISK = "disk"
ELLIPSE = "ellipse"
ANNULUS = "annulus"
STARCONVEX = "starconvex"


# ---------------------------------------------------------------------------
# domains and boundary data


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    R: float = 0.0
    a: float = 0.0
    b: float = 0.0
    Rin: float = 0.0
    Rout: float = 0.0
    rho_samples: Optional[np.ndarray] = None

    @property
    def interior_kind(self):
        return self.kind in (DISK, ELLIPSE, STARCONVEX)

    def rho_spline(self):
        samples = np.asarray(self.rho_samples, dtype=float)
        m = samples.size
        th = np.linspace(0.0, 2.0 * np.pi, m + 1)
        vals = np.concatenate([samples, samples[:1]])
        return CubicSpline(th, vals, bc_type="periodic")

    @property
    def boundary_curvature(self):
        """(min, max) curvature of the boundary curve(s)."""
        if self.kind == DISK:
            return (1.0 / self.R, 1.0 / self.R)
        if self.kind == ELLIPSE:
            return (self.b / self.a ** 2, self.a / self.b ** 2)
        if self.kind == ANNULUS:
            return (1.0 / self.Rout, 1.0 / self.Rin)
        rho = self.rho_spline()
        th = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
        r, r1, r2 = rho(th), rho(th, 1), rho(th, 2)
        kappa = (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1) ** 1.5
        return (float(np.min(kappa)), float(np.max(kappa)))


def disk(R):
    if R <= 0:
        raise GeometryError("disk radius must be positive")
    return DomainSpec(kind=DISK, R=float(R), a=float(R), b=float(R))


def ellipse(a, b):
    if a <= 0 or b <= 0:
        raise GeometryError("ellipse semi-axes must be positive")
    return DomainSpec(kind=ELLIPSE, a=float(a), b=float(b))


def annulus(Rin, Rout):
    if not (0 < Rin < Rout):
        raise GeometryError("annulus needs 0 < Rin < Rout")
    return DomainSpec(kind=ANNULUS, Rin=float(Rin), Rout=float(Rout))


def star_convex(rho_samples):
    samples = np.asarray(rho_samples, dtype=float)
    if samples.size < 8 or np.any(samples <= 0):
        raise GeometryError("star-convex boundary needs >= 8 positive samples")
    dom = DomainSpec(kind=STARCONVEX, rho_samples=samples)
    kmin, _ = dom.boundary_curvature
    if kmin <= 0:
        raise GeometryError(f"boundary not strictly convex: min curvature {kmin:.3g}")
    return dom


@dataclass(frozen=True)
class BoundaryData:
    """Height data on the boundary, periodic in the boundary parameter."""

    phi: Optional[Callable] = None
    inner: Optional[Callable] = None
    outer: Optional[Callable] = None

    @classmethod
    def constant(cls, value):
        return cls(phi=lambda th: np.full_like(np.asarray(th, dtype=float), value))

    @classmethod
    def pair(cls, inner, outer):
        return cls(inner=inner, outer=outer)

    def values(self, theta, ring="outer"):
        fn = self.phi
        if fn is None:
            fn = self.inner if ring == "inner" else self.outer
        if fn is None:
            raise WeingartenError(f"no boundary data for ring '{ring}'")
        vals = np.asarray(fn(np.asarray(theta, dtype=float)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise WeingartenError("boundary data must be finite")
        return np.broadcast_to(vals, np.shape(theta)).astype(float)


def linear_boundary(bx, by):
    """phi corresponding to the tilted plane bx*x + by*y, per domain."""
    def make(dom):
        if dom.kind in (DISK, ELLIPSE):
            return lambda th: bx * dom.a * np.cos(th) + by * dom.b * np.sin(th)
        if dom.kind == STARCONVEX:
            rho = dom.rho_spline()
            return lambda th: rho(th) * (bx * np.cos(th) + by * np.sin(th))
        raise GeometryError("linear_boundary: interior kinds only")
    return make


@dataclass(frozen=True)
class SolverConfig:
    n_s: int = 16
    n_theta: int = 32
    eps: float = 1e-8
    t_steps: int = 5
    newton_tol: float = 1e-10
    newton_max: int = 30
    damping: float = 0.5
    damping_min: float = 2.0 ** -10
    easy_iters: int = 3
    max_bisections: int = 8

    def __post_init__(self):
        if self.n_s < 8:
            raise WeingartenError("n_s must be >= 8")
        if self.n_theta < 16 or self.n_theta % 2:
            raise WeingartenError("n_theta must be >= 16 and even")
        if self.eps <= 0:
            raise WeingartenError("eps must be positive")
        if self.t_steps < 2:
            raise WeingartenError("t_steps must be >= 2")


# ---------------------------------------------------------------------------
# spectral/central difference machinery


def fourier_diff_matrices(n):
    """Dense periodic differentiation matrices (first, second order)."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    k1 = k.copy()
    k1[n // 2] = 0.0  # Nyquist mode has no odd derivative representation
    eye = np.eye(n)
    F = np.fft.fft(eye, axis=0)
    D1 = np.real(np.fft.ifft(1j * k1[:, None] * F, axis=0))
    D2 = np.real(np.fft.ifft(-(k[:, None] ** 2) * F, axis=0))
    return D1, D2


def _lagrange3(x, nodes):
    """Weights of 3-point Lagrange interpolation at x."""
    w = []
    for i, xi in enumerate(nodes):
        num = 1.0
        for j, xj in enumerate(nodes):
            if i != j:
                num *= (x - xj) / (xi - xj)
        w.append(num)
    return w


class Grid:
    """Boundary-fitted grid with precomputed Cartesian jet operators.

    Nodes are ordered interior-first (ring-major), then boundary ring(s).
    The five operators Dx, Dy, Dxx, Dxy, Dyy map the full nodal vector
    to jet components at interior nodes.
    """

    def __init__(self, domain, config):
        self.domain = domain
        self.n_s = config.n_s
        self.n_theta = config.n_theta
        nt, ns = self.n_theta, self.n_s
        self.theta = 2.0 * np.pi * np.arange(nt) / nt

        if domain.interior_kind:
            self.h = 2.0 / (2 * ns + 1)
            self.stations = (np.arange(1, ns + 1) - 0.5) * self.h
            self.n_boundary = nt
        else:
            self.h = (domain.Rout - domain.Rin) / (ns + 1)
            self.stations = domain.Rin + self.h * np.arange(1, ns + 1)
            self.n_boundary = 2 * nt
        self.n_interior = ns * nt
        self.n_total = self.n_interior + self.n_boundary
        self.interior_indices = np.arange(self.n_interior)
        self.boundary_indices = np.arange(self.n_interior, self.n_total)

        self._build_geometry()
        self._build_operators()
        self.lap = (self.Dxx + self.Dyy).tocsr()

    # -- geometry ----------------------------------------------------------

    def _rho_funcs(self):
        dom = self.domain
        if dom.kind == STARCONVEX:
            sp_ = dom.rho_spline()
            return (lambda th: sp_(th)), (lambda th: sp_(th, 1)), (lambda th: sp_(th, 2))
        return None, None, None

    def _node_xy(self, s, theta):
        dom = self.domain
        if dom.kind in (DISK, ELLIPSE):
            return dom.a * s * np.cos(theta), dom.b * s * np.sin(theta)
        if dom.kind == STARCONVEX:
            rho, _, _ = self._rho_funcs()
            r = s * rho(theta)
            return r * np.cos(theta), r * np.sin(theta)
        return s * np.cos(theta), s * np.sin(theta)

    def _build_geometry(self):
        nt = self.n_theta
        S, TH = np.meshgrid(self.stations, self.theta, indexing="ij")
        xi, yi = self._node_xy(S.ravel(), TH.ravel())
        if self.domain.interior_kind:
            xb, yb = self._node_xy(np.ones(nt), self.theta)
            bx, by = [xb], [yb]
        else:
            x_in, y_in = self._node_xy(np.full(nt, self.domain.Rin), self.theta)
            x_out, y_out = self._node_xy(np.full(nt, self.domain.Rout), self.theta)
            bx, by = [x_in, x_out], [y_in, y_out]
        self.nodes_xy = np.column_stack([
            np.concatenate([xi] + bx), np.concatenate([yi] + by)])
        self.ring_of_interior = np.repeat(np.arange(self.n_s), nt)

    def ring_radii(self):
        """Mean planar radius of each interior ring (exact circles for
        disk/annulus grids)."""
        r = np.hypot(self.nodes_xy[:self.n_interior, 0],
                     self.nodes_xy[:self.n_interior, 1])
        return np.array([r[self.ring_of_interior == j].mean()
                         for j in range(self.n_s)])

    def _metric_terms(self):
        """First/second derivatives of (s, theta) w.r.t. (x, y) at the
        interior nodes, flattened ring-major."""
        S, TH = np.meshgrid(self.stations, self.theta, indexing="ij")
        s, th = S.ravel(), TH.ravel()
        C, Sn = np.cos(th), np.sin(th)
        dom = self.domain
        if dom.kind in (DISK, ELLIPSE, ANNULUS):
            a = dom.a if dom.interior_kind else 1.0
            b = dom.b if dom.interior_kind else 1.0
            sx, sy = C / a, Sn / b
            tx, ty = -Sn / (s * a), C / (s * b)
            sxx = Sn ** 2 / (s * a * a)
            sxy = -Sn * C / (s * a * b)
            syy = C ** 2 / (s * b * b)
            txx = 2.0 * Sn * C / (s * s * a * a)
            txy = (Sn ** 2 - C ** 2) / (s * s * a * b)
            tyy = -2.0 * Sn * C / (s * s * b * b)
        else:
            rho, drho, ddrho = self._rho_funcs()
            r, r1, r2 = rho(th), drho(th), ddrho(th)
            sx = (r * C + r1 * Sn) / r ** 2
            sy = (r * Sn - r1 * C) / r ** 2
            b1, b2 = -Sn / r, C / r
            tx, ty = b1 / s, b2 / s
            E = (r * r2 - r * r - 2.0 * r1 * r1) / r ** 4
            sxx = -(Sn ** 2) * E / s
            sxy = C * Sn * E / s
            syy = -(C ** 2) * E / s
            b1p = (Sn * r1 - C * r) / r ** 2
            b2p = -(Sn * r + C * r1) / r ** 2
            txx = (b1 * b1p - sx * b1) / s ** 2
            txy = (b2 * b1p - sy * b1) / s ** 2
            tyy = (b2 * b2p - sy * b2) / s ** 2
        return dict(sx=sx, sy=sy, tx=tx, ty=ty, sxx=sxx, sxy=sxy, syy=syy,
                    txx=txx, txy=txy, tyy=tyy)

    # -- operators ---------------------------------------------------------

    def _station_columns(self, j, nt):
        """(columns, weights) per theta index expressing the value of
        radial station j; station 0 of interior grids is the through-pole
        continuation, interpolated on the antipodal ray."""
        if 1 <= j <= self.n_s:
            return [((j - 1) * nt + i, 1.0) for i in range(nt)]
        if j == self.n_s + 1:
            base = self.n_interior + (nt if not self.domain.interior_kind else 0)
            return [(base + i, 1.0) for i in range(nt)]
        if j == 0 and not self.domain.interior_kind:
            return [(self.n_interior + i, 1.0) for i in range(nt)]
        # interior ghost: value at s = -h/2 along theta lives on the ray
        # theta + pi at physical radius (h/2) * rho(theta)
        anti = (np.arange(nt) + nt // 2) % nt
        if self.domain.kind == STARCONVEX:
            rho, _, _ = self._rho_funcs()
            ratio = rho(self.theta) / rho(self.theta[anti])
        else:
            ratio = np.ones(nt)
        per_theta = []
        for i in range(nt):
            x = 0.5 * ratio[i] + 0.5  # target in station units on the ray
            k0 = int(np.clip(round(x), 2, self.n_s - 1))
            nodes = [k0 - 1, k0, k0 + 1]
            per_theta.append([((k - 1) * nt + anti[i], w)
                              for k, w in zip(nodes, _lagrange3(x, nodes))])
        return per_theta

    def _radial_ops(self):
        """Sparse first/second radial difference operators (N_int x N_tot)."""
        nt, ns, h = self.n_theta, self.n_s, self.h
        rows1, cols1, vals1 = [], [], []
        rows2, cols2, vals2 = [], [], []

        def add(rows, cols, vals, j_station, theta_rows, coeff):
            entries = self._station_columns(j_station, nt)
            if entries and isinstance(entries[0], tuple):
                for i, (c, w) in enumerate(entries):
                    rows.append(theta_rows[i])
                    cols.append(c)
                    vals.append(coeff * w)
            else:
                for i, lst in enumerate(entries):
                    for c, w in lst:
                        rows.append(theta_rows[i])
                        cols.append(c)
                        vals.append(coeff * w)

        for jj in range(ns):
            j = jj + 1
            rws = jj * nt + np.arange(nt)
            add(rows1, cols1, vals1, j + 1, rws, 0.5 / h)
            add(rows1, cols1, vals1, j - 1, rws, -0.5 / h)
            add(rows2, cols2, vals2, j + 1, rws, 1.0 / h ** 2)
            add(rows2, cols2, vals2, j, rws, -2.0 / h ** 2)
            add(rows2, cols2, vals2, j - 1, rws, 1.0 / h ** 2)

        shape = (self.n_interior, self.n_total)
        R1 = sp.coo_matrix((vals1, (rows1, cols1)), shape=shape).tocsr()
        R2 = sp.coo_matrix((vals2, (rows2, cols2)), shape=shape).tocsr()
        return R1, R2

    def _build_operators(self):
        nt, ns = self.n_theta, self.n_s
        D1, D2 = fourier_diff_matrices(nt)
        eye_rings = sp.identity(ns, format="csr")
        T1_int = sp.kron(eye_rings, sp.csr_matrix(D1), format="csr")
        T2_int = sp.kron(eye_rings, sp.csr_matrix(D2), format="csr")

        R1, R2 = self._radial_ops()
        # theta derivatives of boundary rings enter mixed terms through R1
        pad = sp.csr_matrix((self.n_interior, self.n_boundary))
        T1 = sp.hstack([T1_int, pad], format="csr")
        T2 = sp.hstack([T2_int, pad], format="csr")
        T1R1 = (T1_int @ R1).tocsr()

        m = self._metric_terms()

        def dg(v):
            return sp.diags(v)

        self.Dx = (dg(m["sx"]) @ R1 + dg(m["tx"]) @ T1).tocsr()
        self.Dy = (dg(m["sy"]) @ R1 + dg(m["ty"]) @ T1).tocsr()
        self.Dxx = (dg(m["sx"] ** 2) @ R2 + dg(2.0 * m["sx"] * m["tx"]) @ T1R1
                    + dg(m["tx"] ** 2) @ T2 + dg(m["sxx"]) @ R1
                    + dg(m["txx"]) @ T1).tocsr()
        self.Dxy = (dg(m["sx"] * m["sy"]) @ R2
                    + dg(m["sx"] * m["ty"] + m["sy"] * m["tx"]) @ T1R1
                    + dg(m["tx"] * m["ty"]) @ T2 + dg(m["sxy"]) @ R1
                    + dg(m["txy"]) @ T1).tocsr()
        self.Dyy = (dg(m["sy"] ** 2) @ R2 + dg(2.0 * m["sy"] * m["ty"]) @ T1R1
                    + dg(m["ty"] ** 2) @ T2 + dg(m["syy"]) @ R1
                    + dg(m["tyy"]) @ T1).tocsr()

    # -- jet evaluation ----------------------------------------------------

    def jets(self, u):
        """Discrete 2-jet (batched GraphJet) at all interior nodes."""
        return GraphJet.from_components(
            self.Dx @ u, self.Dy @ u, self.Dxx @ u, self.Dxy @ u, self.Dyy @ u)

    def boundary_values(self, bc):
        if self.domain.interior_kind:
            return bc.values(self.theta, ring="outer")
        return np.concatenate([bc.values(self.theta, ring="inner"),
                               bc.values(self.theta, ring="outer")])

    def edge_index(self):
        """Node-index pairs of the grid graph (radial and ring edges)."""
        nt, ns = self.n_theta, self.n_s
        idx = lambda jj, i: jj * nt + i
        pairs = []
        th = np.arange(nt)
        for jj in range(ns - 1):
            pairs.append((idx(jj, th), idx(jj + 1, th)))
        rings = list(range(ns))
        for jj in rings:
            pairs.append((idx(jj, th), idx(jj, (th + 1) % nt)))
        if self.domain.interior_kind:
            pairs.append((idx(ns - 1, th), self.n_interior + th))
            pairs.append((self.n_interior + th, self.n_interior + (th + 1) % nt))
        else:
            pairs.append((self.n_interior + th, idx(0, th)))
            pairs.append((idx(ns - 1, th), self.n_interior + nt + th))
            for off in (0, nt):
                pairs.append((self.n_interior + off + th,
                              self.n_interior + off + (th + 1) % nt))
        a = np.concatenate([p[0] for p in pairs])
        b = np.concatenate([p[1] for p in pairs])
        return a, b


def build_grid(domain, config):
    if domain.kind == STARCONVEX:
        kmin, _ = domain.boundary_curvature
        if kmin <= 0:
            raise GeometryError("star-convex grid needs strictly convex boundary")
    return Grid(domain, config)


def discrete_jet(grid, u, node):
    """GraphJet at one interior node (flat ring-major index)."""
    jets = grid.jets(np.asarray(u, dtype=float))
    return GraphJet(p1=jets.p1[node], p2=jets.p2[node], m11=jets.m11[node],
                    m12=jets.m12[node], m22=jets.m22[node])


def residual_field(spec, grid, u, eps):
    """Operator residual at every interior node for nodal data u."""
    return operator_value(spec, grid.jets(np.asarray(u, dtype=float)), eps)


# ---------------------------------------------------------------------------
# continuation driver


class ContinuationController:
    """Adaptive t-stepper: halve on failure, double after two easy steps."""

    def __init__(self, config):
        self.config = config
        self.t = 0.0
        self.dt = 1.0 / (config.t_steps - 1)
        self.easy_streak = 0
        self.bisections = 0
        self.trace = []

    def propose(self):
        return min(1.0, self.t + self.dt)

    def report(self, t_next, accepted, iters):
        self.trace.append({"t": t_next, "accepted": bool(accepted),
                           "iters": int(iters)})
        if accepted:
            self.t = t_next
            self.bisections = 0
            if iters <= self.config.easy_iters:
                self.easy_streak += 1
                if self.easy_streak >= 2:
                    self.dt = min(2.0 * self.dt, 1.0)
                    self.easy_streak = 0
            else:
                self.easy_streak = 0
        else:
            self.easy_streak = 0
            self.bisections += 1
            self.dt *= 0.5
            if self.bisections > self.config.max_bisections:
                raise ContinuationStall(
                    f"cannot advance past t={self.t:.6g} after "
                    f"{self.bisections} bisections", t=self.t, trace=self.trace)


def continuation_schedule(config, trace):
    """Replay a trace of (t, accepted, iters) events and return the
    controller state: (current t, next increment, proposed next t)."""
    ctl = ContinuationController(config)
    for ev in trace:
        ctl.report(ev["t"], ev["accepted"], ev["iters"])
    return {"t": ctl.t, "dt": ctl.dt, "next_t": ctl.propose()}


@dataclass
class GridSolution:
    domain: DomainSpec
    grid: Grid
    spec: object
    config: SolverConfig
    nodes: np.ndarray
    u: np.ndarray
    residual_norm: float
    curvature_field: object
    converged: bool
    continuation_trace: list
    newton_iterations_total: int
    wall_time: float

    @property
    def u_interior(self):
        return self.u[:self.grid.n_interior]

    @property
    def u_boundary(self):
        return self.u[self.grid.n_interior:]


class _NewtonFailure(Exception):
    pass


def _residual(spec, grid, u, t, eps):
    lap_u = grid.lap @ u
    if t == 0.0:
        return lap_u
    F = operator_value(spec, grid.jets(u), eps)
    return t * F + (1.0 - t) * lap_u


def _newton_stage(spec, grid, u, t, config, int_cols):
    """Damped Newton at fixed t; returns (u, iterations, residual_norm)."""
    eps = config.eps
    R = _residual(spec, grid, u, t, eps)
    res = float(np.linalg.norm(R))
    for it in range(config.newton_max):
        if res <= config.newton_tol:
            return u, it, res
        ev = operator_derivs(spec, grid.jets(u), eps, fd_check=False)
        a11 = ev.dF_dM[:, 0, 0]
        a12 = ev.dF_dM[:, 0, 1]
        a22 = ev.dF_dM[:, 1, 1]
        b1 = ev.dF_dp[:, 0]
        b2 = ev.dF_dp[:, 1]
        J = (sp.diags(t * a11) @ grid.Dxx + sp.diags(2.0 * t * a12) @ grid.Dxy
             + sp.diags(t * a22) @ grid.Dyy + sp.diags(t * b1) @ grid.Dx
             + sp.diags(t * b2) @ grid.Dy)
        if t != 1.0:
            J = J + (1.0 - t) * grid.lap
        J_int = J[:, int_cols].tocsc()
        try:
            delta = splu(J_int).solve(-R)
        except RuntimeError as exc:
            raise SingularJacobian(f"sparse LU failed at t={t}: {exc}", t=t)
        if not np.all(np.isfinite(delta)):
            raise SingularJacobian(f"non-finite Newton step at t={t}", t=t)
        lam = 1.0
        while True:
            u_try = u.copy()
            u_try[:grid.n_interior] += lam * delta
            R_try = _residual(spec, grid, u_try, t, eps)
            res_try = float(np.linalg.norm(R_try))
            if res_try <= (1.0 - 1e-4 * lam) * res or res_try <= config.newton_tol:
                break
            lam *= config.damping
            if lam < config.damping_min:
                raise _NewtonFailure(f"line search stalled at t={t}")
        u, R, res = u_try, R_try, res_try
    if res <= config.newton_tol:
        return u, config.newton_max, res
    raise _NewtonFailure(f"no convergence in {config.newton_max} iterations at t={t}")


def _harmonic_extension(grid, ub):
    u = np.zeros(grid.n_total)
    u[grid.boundary_indices] = ub
    A = grid.lap[:, grid.interior_indices].tocsc()
    rhs = -(grid.lap[:, grid.boundary_indices] @ ub)
    try:
        u[grid.interior_indices] = splu(A).solve(rhs)
    except RuntimeError as exc:
        raise SingularJacobian(f"harmonic extension failed: {exc}", t=0.0)
    return u


def _continuation_solve(spec, grid, bc, config):
    start = time.perf_counter()
    ub = grid.boundary_values(bc)
    u = _harmonic_extension(grid, ub)
    int_cols = grid.interior_indices
    ctl = ContinuationController(config)
    total_iters = 0
    converged = True
    try:
        try:
            u, it0, res = _newton_stage(spec, grid, u, 0.0, config, int_cols)
        except _NewtonFailure as exc:
            raise SingularJacobian(f"Laplace stage did not converge: {exc}", t=0.0)
        total_iters += it0
        ctl.trace.append({"t": 0.0, "accepted": True, "iters": it0})
        while ctl.t < 1.0:
            t_next = ctl.propose()
            try:
                u_next, iters, res = _newton_stage(spec, grid, u, t_next,
                                                   config, int_cols)
            except _NewtonFailure:
                ctl.report(t_next, False, config.newton_max)
                continue
            u = u_next
            total_iters += iters
            ctl.report(t_next, True, iters)
    except ContinuationStall:
        converged = False
        res = float(np.linalg.norm(_residual(spec, grid, u, 1.0, config.eps)))
    field = curvatures(grid.jets(u))
    return GridSolution(
        domain=grid.domain, grid=grid, spec=spec, config=config,
        nodes=grid.nodes_xy, u=u, residual_norm=res, curvature_field=field,
        converged=converged, continuation_trace=ctl.trace,
        newton_iterations_total=total_iters,
        wall_time=time.perf_counter() - start)


def solve_dirichlet(spec, domain, bc, config=None):
    """Dirichlet problem on a strictly convex interior domain."""
    config = config or SolverConfig()
    if not domain.interior_kind:
        raise GeometryError("solve_dirichlet needs an interior domain kind")
    if not spec.minimal_type:
        raise WeingartenError("2-D solves require a minimal-type relation")
    kmin, _ = domain.boundary_curvature
    if kmin <= 0:
        raise GeometryError("domain must be strictly convex")
    grid = build_grid(domain, config)
    return _continuation_solve(spec, grid, bc, config)


def solve_exterior(spec, annulus_domain, inner_bc, outer_bc=None, config=None):
    """Truncated exterior problem on an annulus with Dirichlet data at
    both circles.  ``inner_bc`` may already carry both rings."""
    config = config or SolverConfig()
    if annulus_domain.kind != ANNULUS:
        raise GeometryError("solve_exterior needs an annulus domain")
    if not spec.minimal_type:
        raise WeingartenError("2-D solves require a minimal-type relation")
    if outer_bc is None:
        bc = inner_bc
    else:
        inner_fn = inner_bc.inner or inner_bc.phi
        outer_fn = outer_bc.outer or outer_bc.phi
        bc = BoundaryData.pair(inner_fn, outer_fn)
    grid = build_grid(annulus_domain, config)
    return _continuation_solve(spec, grid, bc, config)


def refine(config, factor=2):
    """Config with both resolutions multiplied (for convergence studies)."""
    return replace(config, n_s=config.n_s * factor, n_theta=config.n_theta * factor)
