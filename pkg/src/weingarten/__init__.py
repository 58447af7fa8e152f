"""Numerical laboratory for uniformly elliptic Weingarten graphs of
minimal type: relation handling, operator evaluation, radial and 2-D
Dirichlet/exterior solves, and asymptotic-structure analysis."""

from . import asymfit, errors, fdsolver, jetop, radial, relation
from .errors import WeingartenError
from .fdsolver import (BoundaryData, DomainSpec, SolverConfig, annulus,
                       build_grid, disk, ellipse, solve_dirichlet,
                       solve_exterior, star_convex)
from .jetop import GraphJet, curvatures, operator_derivs, operator_value
from .radial import asymptotic_constant, radial_g, solve_radial
from .relation import (RelationSpec, custom, eval_f, eval_fprime, expblend,
                       linear, minimal, regime_of, validate)

__version__ = "0.1.0"
