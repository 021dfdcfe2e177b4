"""Finite-volume time stepping for scalar laws and the Euler system.

One explicit update reads

    w_i^{n+1} = w_i^n - dt/dx (F_{i+1/2}(w^n) - F_{i-1/2}(w^n))

with periodic or transmissive (zero-gradient) ghost cells.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from l1rom.domain.entities.grid import GridField, Trajectory
from l1rom.domain.entities.problems import FluxId, SchemeConfig
from l1rom.domain.errors import ConvergenceError, InvalidInputError, StepRejectedError
from l1rom.domain.services.hdm.fluxes import (
    godunov_flux_burgers,
    godunov_flux_burgers_derivatives,
    max_wave_speed,
    rusanov_flux_euler,
    upwind_flux_advection,
    upwind_flux_advection_derivatives,
)

logger = logging.getLogger(__name__)

NEWTON_MAX_ITERATIONS = 100
MIN_DAMPING = 1e-3
NEWTON_REL_TOL = 1e-10

_SCALAR_FLUXES = {
    FluxId.GODUNOV_BURGERS: (godunov_flux_burgers, godunov_flux_burgers_derivatives),
    FluxId.UPWIND_ADVECTION: (upwind_flux_advection, upwind_flux_advection_derivatives),
}


def _with_ghosts(components: np.ndarray, periodic: bool) -> np.ndarray:
    """Pad a (p, n) array with one ghost cell per side"""
    if periodic:
        return np.concatenate([components[:, -1:], components, components[:, :1]], axis=1)
    return np.concatenate([components[:, :1], components, components[:, -1:]], axis=1)


def interface_fluxes(w: GridField, scheme: SchemeConfig) -> np.ndarray:
    """Fluxes at the n+1 faces as a (p, n+1) array"""
    padded = _with_ghosts(w.as_components(), w.grid.periodic)
    left, right = padded[:, :-1], padded[:, 1:]
    if scheme.flux_id == FluxId.RUSANOV_EULER:
        if w.n_components != 3:
            raise InvalidInputError("the Euler flux needs a 3-component field")
        return rusanov_flux_euler(left, right, scheme.gamma)
    if w.n_components != 1:
        raise InvalidInputError(f"{scheme.flux_id.value} is a scalar flux")
    flux, _ = _SCALAR_FLUXES[scheme.flux_id]
    return flux(left, right)


def flux_differences(w: GridField, scheme: SchemeConfig) -> np.ndarray:
    """F_{i+1/2} - F_{i-1/2}, flattened component-major"""
    faces = interface_fluxes(w, scheme)
    return np.diff(faces, axis=1).reshape(-1)


def max_signal_speed(w: GridField, scheme: SchemeConfig) -> float:
    if scheme.flux_id == FluxId.RUSANOV_EULER:
        return float(np.max(max_wave_speed(w.as_components(), scheme.gamma)))
    if scheme.flux_id == FluxId.UPWIND_ADVECTION:
        return 1.0
    return float(np.max(np.abs(w.values)))


def admissible_dt(w: GridField, scheme: SchemeConfig) -> float:
    """Largest time step satisfying lambda * speed <= cfl"""
    speed = max_signal_speed(w, scheme)
    if speed == 0.0:
        return np.inf
    return scheme.cfl * w.grid.dx / speed


def resolve_dt(w: GridField, scheme: SchemeConfig) -> float:
    limit = admissible_dt(w, scheme)
    if scheme.dt is None:
        if not np.isfinite(limit):
            raise StepRejectedError("no signal speed to derive a time step from", admissible_dt=limit)
        return limit
    if scheme.dt > limit * (1.0 + 1e-12) and not scheme.allow_unstable:
        raise StepRejectedError(
            f"dt={scheme.dt:.6g} exceeds the CFL bound dt<={limit:.6g}", admissible_dt=limit
        )
    return scheme.dt


def explicit_update(w: GridField, scheme: SchemeConfig) -> Tuple[GridField, float]:
    """One forward-Euler step, returning the new field and the step used"""
    dt = resolve_dt(w, scheme)
    values = w.values - dt / w.grid.dx * flux_differences(w, scheme)
    return w.with_values(values), dt


def explicit_step(w: GridField, scheme: SchemeConfig) -> GridField:
    return explicit_update(w, scheme)[0]


def explicit_residual(w_n: GridField, w_next: GridField, scheme: SchemeConfig, dt: float) -> np.ndarray:
    """dx (w^{n+1} - w^n) + dt (F_{i+1/2} - F_{i-1/2})(w^n)"""
    if not w_n.same_layout(w_next):
        raise InvalidInputError("states live on different grids")
    return w_n.grid.dx * (w_next.values - w_n.values) + dt * flux_differences(w_n, scheme)


def _implicit_system(v: np.ndarray, u: np.ndarray, lam: float, scheme: SchemeConfig, periodic: bool):
    """Residual and sparse Jacobian of v - u + lam (F(v_j, v_{j+1}) - F(v_{j-1}, v_j))"""
    flux, derivatives = _SCALAR_FLUXES[scheme.flux_id]
    n = v.size
    padded = _with_ghosts(v[np.newaxis, :], periodic)[0]
    left, right = padded[:-1], padded[1:]
    faces = flux(left, right)
    residual = v - u + lam * np.diff(faces)

    d_left, d_right = derivatives(left, right)
    cells = np.arange(n)
    # face f sits between cells f-1 and f; ghost cells fold back onto their owners
    left_owner = np.concatenate([[n - 1 if periodic else 0], cells])
    right_owner = np.concatenate([cells, [0 if periodic else n - 1]])
    face_index = np.arange(n + 1)
    enters_left_cell = face_index >= 1
    enters_right_cell = face_index <= n - 1
    rows, cols, data = [cells], [cells], [np.ones(n)]
    for owner, derivative in ((left_owner, d_left), (right_owner, d_right)):
        # face f adds to cell f-1 and subtracts from cell f
        rows.append(face_index[enters_left_cell] - 1)
        cols.append(owner[enters_left_cell])
        data.append(lam * derivative[enters_left_cell])
        rows.append(face_index[enters_right_cell])
        cols.append(owner[enters_right_cell])
        data.append(-lam * derivative[enters_right_cell])
    jacobian = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    return residual, jacobian


def implicit_step(w: GridField, scheme: SchemeConfig, dt: Optional[float] = None) -> GridField:
    """Backward-Euler step solved by damped Newton iterations"""
    if not scheme.is_scalar or w.n_components != 1:
        raise InvalidInputError("implicit stepping is available for scalar problems only")
    if dt is None:
        dt = scheme.dt if scheme.dt is not None else admissible_dt(w, scheme)
    lam = dt / w.grid.dx
    u = np.array(w.values)
    tolerance = NEWTON_REL_TOL * float(np.max(np.abs(u)))

    v = u.copy()
    residual, jacobian = _implicit_system(v, u, lam, scheme, w.grid.periodic)
    norm = float(np.max(np.abs(residual)))
    for iteration in range(NEWTON_MAX_ITERATIONS):
        if norm <= tolerance:
            logger.debug("implicit step converged in %d Newton iterations", iteration)
            return w.with_values(v)
        direction = spsolve(jacobian, -residual)
        alpha = 1.0
        while True:
            trial = v + alpha * direction
            trial_residual, trial_jacobian = _implicit_system(trial, u, lam, scheme, w.grid.periodic)
            trial_norm = float(np.max(np.abs(trial_residual)))
            if trial_norm <= (1.0 - 1e-4 * alpha) * norm:
                break
            alpha *= 0.5
            if alpha < MIN_DAMPING:
                raise StepRejectedError(
                    f"Newton line search failed at iteration {iteration} (residual {norm:.3e}); retry with a smaller dt",
                    admissible_dt=0.5 * dt,
                )
        v, residual, jacobian, norm = trial, trial_residual, trial_jacobian, trial_norm
    if norm <= tolerance:
        return w.with_values(v)
    raise ConvergenceError(
        f"implicit step did not converge in {NEWTON_MAX_ITERATIONS} Newton iterations",
        final_residual=norm,
        iterations=NEWTON_MAX_ITERATIONS,
    )


def march_explicit(initial: GridField, scheme: SchemeConfig, mu: Tuple[float, ...], scheme_id: str) -> Trajectory:
    """Fixed-step explicit march to t_final, storing every state"""
    n_steps = int(round(scheme.t_final / scheme.dt))
    states: List[GridField] = [initial]
    for _ in range(n_steps):
        states.append(explicit_step(states[-1], scheme))
    times = np.arange(n_steps + 1) * scheme.dt
    return Trajectory(mu=mu, times=times, states=states, scheme_id=scheme_id)
