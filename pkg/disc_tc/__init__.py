"""Topological complexity bounds and Morse numerics for discriminantal varieties."""

__version__ = "1.0.0"
__author__ = "disc-tc developers"
__description__ = "Torus-action TC bounds, Hessian signatures and equivariant motion planning"

from .config_spaces import PlanarConfig, bound_for_config_spaces, disc_C, disc_F, disc_F_poly
from .errors import DiscTCError
from .lattice import HomogLattice, homog_lattice, is_homogeneisation
from .morse import RealPoint, gradient_flow, hessian_g, inertia, potential_g
from .planner import build_catalog, plan
from .poly import SparsePoly, parse_polynomial
from .torus import TorusAction, max_stabiliser_dim, tc_upper_bound, validate_action

__all__ = [
    "DiscTCError",
    "HomogLattice",
    "PlanarConfig",
    "RealPoint",
    "SparsePoly",
    "TorusAction",
    "bound_for_config_spaces",
    "build_catalog",
    "disc_C",
    "disc_F",
    "disc_F_poly",
    "gradient_flow",
    "hessian_g",
    "homog_lattice",
    "inertia",
    "is_homogeneisation",
    "max_stabiliser_dim",
    "parse_polynomial",
    "plan",
    "potential_g",
    "tc_upper_bound",
    "validate_action",
]
