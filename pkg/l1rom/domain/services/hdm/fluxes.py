"""Numerical fluxes and gas-state relations.

Fluxes follow the f(left, right) convention: nondecreasing in the left state
and nonincreasing in the right state.
"""

from typing import Tuple

import numpy as np

from l1rom.domain.errors import UnphysicalStateError


def burgers_flux(u):
    return 0.5 * np.square(u)


def godunov_flux_burgers(a, b):
    """Exact Godunov flux for f(u) = u^2 / 2"""
    return np.maximum(burgers_flux(np.maximum(a, 0.0)), burgers_flux(np.minimum(b, 0.0)))


def godunov_flux_burgers_derivatives(a, b) -> Tuple[np.ndarray, np.ndarray]:
    """Partial derivatives of the Godunov flux w.r.t. left and right states"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    left_wins = burgers_flux(np.maximum(a, 0.0)) >= burgers_flux(np.minimum(b, 0.0))
    d_left = np.where(left_wins, np.maximum(a, 0.0), 0.0)
    d_right = np.where(left_wins, 0.0, np.minimum(b, 0.0))
    return d_left, d_right


def upwind_flux_advection(a, b):
    """Upwind flux for f(u) = -u, whose information travels leftwards"""
    _, right = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return -right


def upwind_flux_advection_derivatives(a, b) -> Tuple[np.ndarray, np.ndarray]:
    shape = np.broadcast(np.asarray(a), np.asarray(b)).shape
    return np.zeros(shape), -np.ones(shape)


def pressure(state, gamma: float = 1.4):
    """p = (gamma - 1)(E - rho u^2 / 2) for conservative (rho, rho u, E)"""
    rho, momentum, energy = (np.asarray(s, dtype=float) for s in state)
    if np.any(rho <= 0):
        raise UnphysicalStateError("density must be positive")
    p = (gamma - 1.0) * (energy - 0.5 * momentum ** 2 / rho)
    return float(p) if np.ndim(p) == 0 else p


def primitive_from_conservative(state: np.ndarray, gamma: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rho, u, p) from a (3, n) conservative array, rejecting non-physical cells"""
    rho = state[0]
    p = pressure(state, gamma)
    if np.any(p <= 0):
        raise UnphysicalStateError("pressure must be positive")
    return rho, state[1] / rho, p


def conservative_from_primitive(rho, u, p, gamma: float) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    energy = p / (gamma - 1.0) + 0.5 * rho * u ** 2
    return np.stack([rho, rho * u, energy])


def euler_flux(state: np.ndarray, gamma: float) -> np.ndarray:
    rho, u, p = primitive_from_conservative(state, gamma)
    return np.stack([state[1], state[1] * u + p, u * (state[2] + p)])


def max_wave_speed(state: np.ndarray, gamma: float):
    """|u| + c, cellwise"""
    rho, u, p = primitive_from_conservative(state, gamma)
    return np.abs(u) + np.sqrt(gamma * p / rho)


def rusanov_flux_euler(u_left: np.ndarray, u_right: np.ndarray, gamma: float = 1.4) -> np.ndarray:
    """Local Lax-Friedrichs flux between (3,) or (3, n) conservative states"""
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)
    speed = np.maximum(max_wave_speed(u_left, gamma), max_wave_speed(u_right, gamma))
    central = 0.5 * (euler_flux(u_left, gamma) + euler_flux(u_right, gamma))
    return central - 0.5 * speed * (u_right - u_left)
