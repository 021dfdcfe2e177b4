"""Residual-minimization backends."""

from l1rom.domain.services.minimize.irls import huber_value, irls_huber, irls_l1
from l1rom.domain.services.minimize.jacobian import check_jacobian, finite_difference_jacobian
from l1rom.domain.services.minimize.least_squares import project_to_simplex, weighted_lsq
from l1rom.domain.services.minimize.linear_program import l1_min_lp
from l1rom.domain.services.minimize.newton import galerkin_solve, l2_min

__all__ = [
    "check_jacobian",
    "finite_difference_jacobian",
    "galerkin_solve",
    "huber_value",
    "irls_huber",
    "irls_l1",
    "l1_min_lp",
    "l2_min",
    "project_to_simplex",
    "weighted_lsq",
]
