"""Periodic Burgers trajectories and shock tracking."""

import logging
import math
from typing import Tuple

import numpy as np

from l1rom.domain.entities.grid import Grid1D, GridField, Trajectory
from l1rom.domain.entities.problems import BurgersProblem
from l1rom.domain.services.hdm.schemes import march_explicit

logger = logging.getLogger(__name__)

SCHEME_ID = "fv-godunov-burgers"


def burgers_initial(mu: float, grid: Grid1D) -> GridField:
    """u0(x) = mu |sin 2x| + 0.1"""
    return GridField(grid=grid, values=mu * np.abs(np.sin(2.0 * grid.centers)) + 0.1)


def solve_burgers(p: BurgersProblem) -> Trajectory:
    scheme = p.scheme()
    logger.info("Burgers HDM mu=%.4g: %d cells, dt=%.4g", p.mu, p.n_cells, scheme.dt)
    return march_explicit(burgers_initial(p.mu, p.grid), scheme, (p.mu,), SCHEME_ID)


def shock_position(field: GridField) -> Tuple[float, int]:
    """Face position of the steepest downward jump, and the cell to its left"""
    values = field.values
    jumps = np.roll(values, -1) - values
    if not field.grid.periodic:
        jumps = jumps[:-1]
    cell = int(np.argmin(jumps))
    return float(field.grid.faces[cell + 1]), cell


def track_shock(trajectory: Trajectory, period: float = math.pi / 2) -> np.ndarray:
    """Shock position over time, unwrapped modulo the spatial period of the data"""
    raw = np.array([shock_position(state)[0] for state in trajectory.states])
    return np.unwrap(raw, period=period)


def rankine_hugoniot_speed(field: GridField, offset: int = 3) -> float:
    """(u_L + u_R) / 2 read a few cells away from the smeared shock"""
    _, cell = shock_position(field)
    values = field.values
    n = values.size
    return 0.5 * (values[(cell - offset + 1) % n] + values[(cell + offset) % n])
