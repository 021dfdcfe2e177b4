"""Steady advection with a sharp sigmoid-derivative source.

The model problem is du/dt - du/dx = f(x; mu) with u(0) = u_left. Its steady
state drops from u_left to about u_left - 1 around x = mu.
"""

from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.special import expit

from l1rom.domain.entities.grid import GridField
from l1rom.domain.entities.problems import AdvectionProblem


def advection_source(x, mu: float, k: float = 100.0):
    """f = 2k sigma (1 - sigma) with sigma = 1 / (1 + exp(-2k (x - mu)))"""
    z = 2.0 * k * (np.asarray(x, dtype=float) - mu)
    value = 2.0 * k * expit(z) * expit(-z)
    return float(value) if np.ndim(value) == 0 else value


def analytic_advection_profile(x, mu: float, k: float = 100.0, u_left: float = 1.0):
    """Closed-form steady state u_left - (sigma(x) - sigma(0))"""
    x = np.asarray(x, dtype=float)
    return u_left - (expit(2.0 * k * (x - mu)) - expit(-2.0 * k * mu))


def solve_advection_steady(p: AdvectionProblem) -> GridField:
    """First-order sweep u_i = u_{i-1} - dx f(x_i) from the x = 0 boundary"""
    grid = p.grid
    increments = grid.dx * advection_source(grid.centers, p.mu, p.k)
    values = np.empty(grid.n_cells)
    previous = p.u_left
    for i, increment in enumerate(increments):
        previous = previous - increment
        values[i] = previous
    return GridField(grid=grid, values=values)


def assemble_advection_system(p: AdvectionProblem) -> Tuple[sparse.csr_matrix, np.ndarray]:
    """Affine residual r(w) = A w + b of the upwind discretization

    r_i = w_i - w_{i-1} + dx f(x_i), with w_{-1} = u_left.
    """
    grid = p.grid
    n = grid.n_cells
    a = sparse.diags([np.ones(n), -np.ones(n - 1)], [0, -1], shape=(n, n), format="csr")
    b = grid.dx * advection_source(grid.centers, p.mu, p.k)
    b[0] -= p.u_left
    return a, b
