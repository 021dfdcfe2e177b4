"""1D Euler shock tubes blending the Sod and Lax Riemann problems."""

import logging
import math

import numpy as np

from l1rom.domain.entities.grid import Grid1D, GridField, Trajectory
from l1rom.domain.entities.problems import EulerProblem, FluxId, SchemeConfig
from l1rom.domain.services.hdm.fluxes import conservative_from_primitive, max_wave_speed
from l1rom.domain.services.hdm.schemes import march_explicit

logger = logging.getLogger(__name__)

SCHEME_ID = "fv-rusanov-euler"
DIAPHRAGM = 0.5

# (rho, u, p) left and right of the diaphragm
SOD_STATES = ((1.0, 0.0, 1.0), (0.125, 0.0, 0.1))
LAX_STATES = ((0.445, 0.698, 3.528), (0.5, 0.0, 0.571))


def euler_initial(mu: float, grid: Grid1D, gamma: float = 1.4) -> GridField:
    """Primitive blend mu * Sod + (1 - mu) * Lax, converted to (rho, rho u, E)"""
    left = grid.centers <= DIAPHRAGM
    primitives = []
    for var in range(3):
        sod = np.where(left, SOD_STATES[0][var], SOD_STATES[1][var])
        lax = np.where(left, LAX_STATES[0][var], LAX_STATES[1][var])
        primitives.append(mu * sod + (1.0 - mu) * lax)
    return GridField.from_components(grid, conservative_from_primitive(*primitives, gamma=gamma))


def shared_scheme(p: EulerProblem) -> SchemeConfig:
    """Fixed step from the worst initial wave speed over the parameter range"""
    grid = p.grid
    samples = np.linspace(p.mu_range[0], p.mu_range[1], 11)
    speed = max(
        float(np.max(max_wave_speed(euler_initial(mu, grid, p.gamma).as_components(), p.gamma)))
        for mu in samples
    )
    speed *= p.speed_margin
    n_steps = math.ceil(p.t_final * speed / (p.cfl * grid.dx))
    return SchemeConfig(
        cfl=p.cfl,
        dt=p.t_final / n_steps,
        t_final=p.t_final,
        flux_id=FluxId.RUSANOV_EULER,
        gamma=p.gamma,
    )


def solve_euler(p: EulerProblem) -> Trajectory:
    scheme = shared_scheme(p)
    logger.info("Euler HDM mu=%.4g: %d cells, dt=%.4g", p.mu, p.n_cells, scheme.dt)
    return march_explicit(euler_initial(p.mu, p.grid, p.gamma), scheme, (p.mu,), SCHEME_ID)
