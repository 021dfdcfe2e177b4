"""Gauss-Newton least squares and Galerkin projection."""

import logging
from typing import Optional

import numpy as np

from l1rom.domain.entities.minimize import Constraint, MinimizeProblem, MinimizeReport
from l1rom.domain.errors import InvalidInputError, RankDeficiencyError, StagnationError
from l1rom.domain.services.minimize.irls import (
    DEFAULT_MAX_ITERATIONS,
    default_initial_guess,
    evaluate_jacobian,
    evaluate_residual,
)
from l1rom.domain.services.minimize.least_squares import project_to_simplex, weighted_lsq

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MAX_HALVINGS = 30


def _step_converged(step: np.ndarray, q: np.ndarray, eps_tol: float) -> bool:
    return float(np.sum(np.abs(step))) <= eps_tol * (1.0 + float(np.sum(np.abs(q))))


def l2_min(
    problem: MinimizeProblem,
    q0: Optional[np.ndarray] = None,
    eps_tol: float = 1e-4,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> MinimizeReport:
    """Gauss-Newton with Armijo backtracking on 1/2 ||r||^2 + 1/2 eta ||q||^2"""
    if eps_tol <= 0:
        raise InvalidInputError("eps_tol must be positive")

    def objective(r, q):
        return 0.5 * float(np.dot(r, r)) + 0.5 * problem.eta * float(np.dot(q, q))

    q = default_initial_guess(problem.k) if q0 is None else np.array(q0, dtype=float)
    r = evaluate_residual(problem, q)
    value = objective(r, q)
    history = [value]
    converged = False
    unit_weights = np.ones_like(r)

    for iteration in range(1, max_iterations + 1):
        z = evaluate_jacobian(problem, q)
        direction = weighted_lsq(z, r, unit_weights, problem.eta, q)
        gradient = z.T @ r + problem.eta * q

        alpha = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = q + alpha * direction
            if problem.constraint == Constraint.UNIT_SIMPLEX:
                trial = project_to_simplex(trial)
            if _step_converged(trial - q, q, eps_tol):
                converged = True
                break
            trial_r = evaluate_residual(problem, trial)
            trial_value = objective(trial_r, trial)
            if trial_value <= value + ARMIJO * float(gradient @ (trial - q)):
                break
            alpha *= 0.5
        else:
            raise StagnationError(f"Gauss-Newton line search failed after {MAX_HALVINGS} halvings")

        if converged:
            q = trial
            r = evaluate_residual(problem, q)
            value = objective(r, q)
            history.append(value)
            break
        q, r, value = trial, trial_r, trial_value
        history.append(value)
        logger.debug("l2 iteration %d: objective %.6e, alpha %.3g", iteration, value, alpha)
    else:
        logger.warning("l2 stopped at the %d-iteration cap", max_iterations)
        iteration = max_iterations

    return MinimizeReport(
        q=q,
        objective=value,
        iterations=iteration,
        converged=converged,
        method="l2",
        residual_l1=float(np.sum(np.abs(r))),
        objective_history=history,
    )


def galerkin_solve(
    problem: MinimizeProblem,
    q0: Optional[np.ndarray] = None,
    eps_tol: float = 1e-4,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> MinimizeReport:
    """Damped Newton on V^T r(Vq) = 0 with the reduced Jacobian V^T Z"""
    if problem.basis is None:
        raise InvalidInputError("Galerkin projection needs the basis V")
    if problem.constraint != Constraint.NONE:
        raise InvalidInputError("Galerkin projection does not support coefficient constraints")
    if eps_tol <= 0:
        raise InvalidInputError("eps_tol must be positive")
    v = np.asarray(problem.basis, dtype=float)

    q = default_initial_guess(problem.k) if q0 is None else np.array(q0, dtype=float)
    r = evaluate_residual(problem, q)
    projected = v.T @ r
    norm = float(np.linalg.norm(projected))
    history = [norm]
    converged = False

    for iteration in range(1, max_iterations + 1):
        reduced_jacobian = v.T @ evaluate_jacobian(problem, q)
        if np.linalg.cond(reduced_jacobian) > 1.0 / np.finfo(float).eps:
            raise RankDeficiencyError("reduced Galerkin Jacobian is singular")
        direction = np.linalg.solve(reduced_jacobian, -projected)

        alpha = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            trial = q + alpha * direction
            trial_r = evaluate_residual(problem, trial)
            trial_projected = v.T @ trial_r
            trial_norm = float(np.linalg.norm(trial_projected))
            if trial_norm <= (1.0 - ARMIJO * alpha) * norm or _step_converged(trial - q, q, eps_tol):
                accepted = True
                break
            alpha *= 0.5

        step = trial - q
        q, r, projected, norm = trial, trial_r, trial_projected, trial_norm
        history.append(norm)
        logger.debug("galerkin iteration %d: |V^T r| %.6e, alpha %.3g", iteration, norm, alpha)
        if not accepted:
            logger.warning("Galerkin line search stalled at iteration %d", iteration)
            break
        if _step_converged(step, q - step, eps_tol):
            converged = True
            break
    else:
        iteration = max_iterations

    if not converged:
        logger.warning("Galerkin projection did not converge (|V^T r| = %.3e)", norm)
    return MinimizeReport(
        q=q,
        objective=norm,
        iterations=iteration,
        converged=converged,
        method="galerkin",
        residual_l1=float(np.sum(np.abs(r))),
        objective_history=history,
    )
