#!/usr/bin/env python3
"""Exterior solves and the structure of graphs at infinity.

Solves the truncated exterior problem on widening annuli, fits the log
expansion to circle averages, demonstrates the comparison bracket for
ordered ends, and tracks the scale-invariant curvature diagnostic
sup |sigma| * dist(., boundary) under refinement.
"""

import numpy as np

import weingarten as w
from weingarten.asymfit import (comparison_at_infinity, curvature_estimate_diag,
                                fit_log_expansion)
from weingarten.fdsolver import (BoundaryData, SolverConfig, annulus,
                                 solve_exterior)

C = 1.0 / np.sqrt(2.0)
cat = lambda r: C * (np.arccosh(r / C) - np.arccosh(1.0 / C))


def catenoid_bc(rin, rout, shift=0.0):
    return BoundaryData.pair(
        lambda th: np.full_like(th, cat(rin) + shift),
        lambda th: np.full_like(th, cat(rout) + shift))


print("=" * 72)
print("Exterior solves against the radial oracle, Rout sweep")
print("=" * 72)
for rout in (4.0, 8.0, 16.0):
    cfg = SolverConfig(n_s=24, n_theta=32)
    sol = solve_exterior(w.minimal(), annulus(1.0, rout),
                         catenoid_bc(1.0, rout), config=cfg)
    radii = sol.grid.ring_radii()
    rings = sol.grid.ring_of_interior
    means = np.array([sol.u_interior[rings == j].mean()
                      for j in range(sol.grid.n_s)])
    err = np.max(np.abs(means - cat(radii)))
    print(f"  Rout = {rout:5.1f}: converged={sol.converged}  "
          f"max circle-average error vs radial profile {err:.2e}")

print("\n" + "=" * 72)
print("Log expansion from a long radial profile")
print("=" * 72)
sol = w.solve_radial(w.minimal(), 1.0, 1.0, 1e4, tol=1e-11)
fit = fit_log_expansion(sol)
print(f"  u(r) = d log r + c + O(r^-alpha) on window {fit.window}")
print(f"  d = {fit.d:.8f}  (catenoid scale 1/sqrt(2) = {C:.8f})")
print(f"  c = {fit.c:.8f}")
print(f"  certified remainder rate alpha = {fit.alpha}  "
      f"(raw measured decay {fit.raw_remainder_rate:.2f}, R^2 = {fit.r2:.4f})")

print("\n" + "=" * 72)
print("Comparison at infinity for ordered ends")
print("=" * 72)
r = np.logspace(0.2, 3.5, 220)
base = C * np.arccosh(r / C)
rep = comparison_at_infinity((r, base + 0.25), (r, base))
print(f"  vertically shifted pair: c0 = {rep.c0_estimate:.6f}, "
      f"bracket holds on every circle: {rep.bracketing_ok}")
rep0 = comparison_at_infinity((r, base), (r, base))
print(f"  identical pair: c0 = {rep0.c0_estimate}, agreement flagged: "
      f"{rep0.agreement}")
grown = comparison_at_infinity((r, base - base[0] + cat(r[0]) + 3.0), (r, cat(r)))
print(f"  bounded-offset catenoid pair: bracket {grown.bracketing_ok}, "
      f"c0 = {grown.c0_estimate:.4f}")

print("\n" + "=" * 72)
print("Curvature-estimate diagnostic under refinement")
print("=" * 72)
for n in (16, 32):
    cfg = SolverConfig(n_s=n, n_theta=2 * n)
    sol2 = solve_exterior(w.minimal(), annulus(1.0, 8.0),
                          catenoid_bc(1.0, 8.0), config=cfg)
    val = curvature_estimate_diag(sol2)
    print(f"  n_s = {n:3d}: sup |sigma| * dist = {val:.5f}")
print("The diagnostic stabilizes: curvature decays like the inverse "
      "distance to the boundary, uniformly in resolution.")
