"""Steady quasi-1D flow in a Laval nozzle.

The area-weighted finite-volume residual is

    R_i = (A_{i+1/2} F_{i+1/2} - A_{i-1/2} F_{i-1/2}) / dx - (0, p_i (A_{i+1/2} - A_{i-1/2}) / dx, 0)

with a subsonic reservoir inflow (total pressure and density fixed, velocity
extrapolated) and an outlet that imposes p_out while the flow is subsonic.
"""

import logging

import numpy as np

from l1rom.domain.entities.grid import Grid1D, GridField
from l1rom.domain.entities.problems import NozzleProblem
from l1rom.domain.errors import ConvergenceError, NozzleDomainError
from l1rom.domain.services.hdm.fluxes import (
    conservative_from_primitive,
    max_wave_speed,
    primitive_from_conservative,
    rusanov_flux_euler,
)

logger = logging.getLogger(__name__)

SCHEME_ID = "fv-rusanov-nozzle"
_LOG_EVERY = 20_000


def nozzle_area(x):
    """Area A(x) and its derivative dA/dx on [0, 1]"""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise NozzleDomainError("nozzle area is defined on [0, 1] only")
    d = x - 0.5
    converging = d <= 0.0
    area = np.where(converging, 1.0 + 6.0 * d ** 2, 1.0 + 0.15 * d ** 2 + 6.0 * d ** 3)
    slope = np.where(converging, 12.0 * d, 0.3 * d + 18.0 * d ** 2)
    if area.ndim == 0:
        return float(area), float(slope)
    return area, slope


def _reservoir_state(u: float, p: NozzleProblem) -> np.ndarray:
    """Isentropic state with the reservoir total conditions at velocity u"""
    gamma = p.gamma
    entropy = p.p_total / p.rho_total ** gamma
    total_enthalpy = gamma / (gamma - 1.0) * p.p_total / p.rho_total
    p_over_rho = max((gamma - 1.0) / gamma * (total_enthalpy - 0.5 * u * u), 1e-12)
    rho = (p_over_rho / entropy) ** (1.0 / (gamma - 1.0))
    return conservative_from_primitive(rho, u, rho * p_over_rho, gamma)


def _ghost_states(state: np.ndarray, p: NozzleProblem):
    rho, u, pres = primitive_from_conservative(state, p.gamma)
    sound = np.sqrt(p.gamma * pres / rho)

    inlet = _reservoir_state(max(float(u[0]), 0.0), p)

    if u[-1] < sound[-1]:
        outlet = conservative_from_primitive(rho[-1], u[-1], p.p_out, p.gamma)
    else:
        outlet = state[:, -1].copy()
    return inlet, outlet


def _steady_residual(state: np.ndarray, p: NozzleProblem, grid: Grid1D) -> np.ndarray:
    inlet, outlet = _ghost_states(state, p)
    padded = np.concatenate([inlet[:, np.newaxis], state, outlet[:, np.newaxis]], axis=1)
    fluxes = rusanov_flux_euler(padded[:, :-1], padded[:, 1:], p.gamma)

    dx = grid.dx
    face_area, _ = nozzle_area(grid.faces)
    _, _, pres = primitive_from_conservative(state, p.gamma)
    residual = np.diff(face_area * fluxes, axis=1) / dx
    residual[1] -= pres * np.diff(face_area) / dx
    return residual


def nozzle_steady_residual(field: GridField, p: NozzleProblem) -> np.ndarray:
    """Steady residual R(U), flattened component-major"""
    return _steady_residual(field.as_components(), p, field.grid).reshape(-1)


def nozzle_initial_guess(p: NozzleProblem) -> GridField:
    """Isentropic profile with pressure falling linearly from p_total to p_out"""
    grid = p.grid
    gamma = p.gamma
    pres = p.p_total + (min(p.p_out, p.p_total) - p.p_total) * grid.centers
    rho = p.rho_total * (pres / p.p_total) ** (1.0 / gamma)
    total_enthalpy = gamma / (gamma - 1.0) * p.p_total / p.rho_total
    u = np.sqrt(np.maximum(2.0 * (total_enthalpy - gamma / (gamma - 1.0) * pres / rho), 0.0))
    return GridField.from_components(grid, conservative_from_primitive(rho, u, pres, gamma))


def solve_nozzle_steady(p: NozzleProblem) -> GridField:
    """Pseudo-time marching with local time steps until ||R||_1 <= rel_tol ||R^0||_1"""
    grid = p.grid
    cell_area, _ = nozzle_area(grid.centers)
    state = np.array(nozzle_initial_guess(p).as_components())

    residual = _steady_residual(state, p, grid)
    initial_norm = float(np.sum(np.abs(residual)))
    target = p.rel_tol * initial_norm
    norm = initial_norm
    for iteration in range(1, p.max_iterations + 1):
        local_dt = p.cfl * grid.dx / max_wave_speed(state, p.gamma)
        state = state - local_dt / cell_area * residual
        residual = _steady_residual(state, p, grid)
        norm = float(np.sum(np.abs(residual)))
        if iteration % _LOG_EVERY == 0:
            logger.debug("nozzle mu=%.4g iteration %d residual %.3e", p.mu, iteration, norm / initial_norm)
        if norm <= target:
            logger.info("nozzle mu=%.4g converged in %d pseudo-time iterations", p.mu, iteration)
            return GridField.from_components(grid, state)
    raise ConvergenceError(
        f"nozzle mu={p.mu} did not reach a steady state in {p.max_iterations} iterations",
        final_residual=norm,
        iterations=p.max_iterations,
    )


def mach_number(field: GridField, gamma: float = 1.4) -> np.ndarray:
    rho, u, pres = primitive_from_conservative(field.as_components(), gamma)
    return u / np.sqrt(gamma * pres / rho)


def primitive_variables(field: GridField, gamma: float = 1.4):
    """(rho, u, p) arrays of a 3-component conservative field"""
    return primitive_from_conservative(field.as_components(), gamma)
