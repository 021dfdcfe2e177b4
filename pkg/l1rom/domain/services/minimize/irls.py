"""Iteratively reweighted least squares for L1 and Huber residual minimization."""

import logging
from typing import Callable, Optional, Tuple

import numpy as np

from l1rom.domain.entities.minimize import Constraint, HuberParams, MinimizeProblem, MinimizeReport
from l1rom.domain.errors import EvaluationError, InvalidInputError, LinearProgramError
from l1rom.domain.services.minimize.least_squares import project_to_simplex, weighted_lsq
from l1rom.domain.services.minimize.linear_program import l1_min_lp

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 200
WEIGHT_FLOOR = 1e-10

WeightRule = Callable[[np.ndarray], Tuple[np.ndarray, int]]


def huber_value(x, M: float):
    """x^2 for |x| <= M, M (2|x| - M) beyond"""
    if M <= 0:
        raise InvalidInputError("the Huber threshold M must be positive")
    magnitude = np.abs(np.asarray(x, dtype=float))
    value = np.where(magnitude <= M, magnitude ** 2, M * (2.0 * magnitude - M))
    return float(value) if np.ndim(value) == 0 else value


def l1_weights(r: np.ndarray) -> Tuple[np.ndarray, int]:
    """(max(|r|, delta))^(-1/2) with delta = 1e-10 max(1, ||r||_inf), and the floor-hit count"""
    magnitude = np.abs(r)
    delta = WEIGHT_FLOOR * max(1.0, float(np.max(magnitude)))
    hits = int(np.count_nonzero(magnitude < delta))
    return np.maximum(magnitude, delta) ** -0.5, hits


def huber_weights(r: np.ndarray, M: float) -> np.ndarray:
    """1 inside the threshold and M |r|^(-1/2) outside, divided by M

    The common factor leaves the unregularized step unchanged. The linear
    branch then carries the L1 weights |r|^(-1/2), the scale eta is measured
    against.
    """
    magnitude = np.abs(r)
    return np.where(magnitude < M, 1.0 / M, np.maximum(magnitude, M) ** -0.5)


def default_initial_guess(k: int) -> np.ndarray:
    return np.full(k, 1.0 / k)


def evaluate_residual(problem: MinimizeProblem, q: np.ndarray) -> np.ndarray:
    r = np.asarray(problem.residual_fn(q), dtype=float).reshape(-1)
    if not np.all(np.isfinite(r)):
        raise EvaluationError("residual evaluation produced non-finite values")
    return r


def evaluate_jacobian(problem: MinimizeProblem, q: np.ndarray) -> np.ndarray:
    z = np.asarray(problem.jacobian_fn(q), dtype=float)
    if not np.all(np.isfinite(z)):
        raise EvaluationError("Jacobian evaluation produced non-finite values")
    return z


def _reweighted_iterations(
    problem: MinimizeProblem,
    q0: Optional[np.ndarray],
    eps_tol: float,
    max_iterations: int,
    weights: WeightRule,
    objective: Callable[[np.ndarray, np.ndarray], float],
    method: str,
) -> MinimizeReport:
    if eps_tol <= 0:
        raise InvalidInputError("eps_tol must be positive")
    q = default_initial_guess(problem.k) if q0 is None else np.array(q0, dtype=float)
    r = evaluate_residual(problem, q)
    z = evaluate_jacobian(problem, q)
    history = [objective(r, q)]
    floor_hits = 0

    for iteration in range(1, max_iterations + 1):
        w, hits = weights(r)
        floor_hits += hits
        q_next = q + weighted_lsq(z, r, w, problem.eta, q)
        if problem.constraint == Constraint.UNIT_SIMPLEX:
            q_next = project_to_simplex(q_next)
        step = float(np.sum(np.abs(q_next - q)))
        converged = step <= eps_tol * (1.0 + float(np.sum(np.abs(q))))

        q = q_next
        r = evaluate_residual(problem, q)
        z = evaluate_jacobian(problem, q)
        history.append(objective(r, q))
        logger.debug("%s iteration %d: objective %.6e, step %.3e", method, iteration, history[-1], step)
        if converged:
            break
    else:
        logger.warning("%s stopped at the %d-iteration cap", method, max_iterations)
        iteration = max_iterations
        converged = False

    if floor_hits:
        logger.debug("%s floored %d weights", method, floor_hits)
    return MinimizeReport(
        q=q,
        objective=history[-1],
        iterations=iteration,
        converged=converged,
        weights_floor_hits=floor_hits,
        method=method,
        residual_l1=float(np.sum(np.abs(r))),
        objective_history=history,
    )


def irls_l1(
    problem: MinimizeProblem,
    q0: Optional[np.ndarray] = None,
    eps_tol: float = 1e-4,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> MinimizeReport:
    """Minimize ||r(Vq)||_1 + eta ||q||^2 by reweighted least squares"""

    def objective(r, q):
        return float(np.sum(np.abs(r)) + problem.eta * np.dot(q, q))

    report = _reweighted_iterations(problem, q0, eps_tol, max_iterations, l1_weights, objective, "l1_irls")
    return polish_active_set(problem, report, objective)


def polish_active_set(
    problem: MinimizeProblem,
    report: MinimizeReport,
    objective: Callable[[np.ndarray, np.ndarray], float],
) -> MinimizeReport:
    """Finish at the vertex of the L1 program linearized at report.q

    The rows with the smallest residuals seed the active set of the simplex.
    The vertex replaces the last iterate only when it lowers the objective.
    """
    q = report.q
    r = evaluate_residual(problem, q)
    z = evaluate_jacobian(problem, q)
    try:
        vertex = l1_min_lp(
            z,
            r - z @ q,
            problem.constraint,
            max_rows=r.size,
            warm_rows=np.argsort(np.abs(r), kind="stable"),
        )
        candidate_r = evaluate_residual(problem, vertex.q)
    except (LinearProgramError, EvaluationError) as e:
        logger.debug("active-set finish skipped: %s", e)
        return report

    value = objective(candidate_r, vertex.q)
    if value >= report.objective:
        return report
    logger.debug("active-set finish after %d pivots: objective %.6e -> %.6e", vertex.iterations, report.objective, value)
    history = list(report.objective_history)
    history[-1] = value
    return report.copy(
        update={
            "q": vertex.q,
            "objective": value,
            "residual_l1": float(np.sum(np.abs(candidate_r))),
            "objective_history": history,
        }
    )


def irls_huber(
    problem: MinimizeProblem,
    q0: Optional[np.ndarray] = None,
    eps_tol: float = 1e-4,
    hp: Optional[HuberParams] = None,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> MinimizeReport:
    """Minimize the Huber functional of r(Vq) with a shrinking threshold M

    Each iteration weighs the current residual with the threshold computed
    from the residual one iteration earlier.
    """
    hp = hp or HuberParams()
    q_start = default_initial_guess(problem.k) if q0 is None else np.asarray(q0, dtype=float)
    lagged = [hp.M if hp.M is not None else hp.threshold(evaluate_residual(problem, q_start))]

    def weights(r):
        w = huber_weights(r, lagged[0])
        lagged[0] = hp.threshold(r)
        return w, 0

    def objective(r, q):
        return float(np.sum(huber_value(r, lagged[0])) + problem.eta * np.dot(q, q))

    return _reweighted_iterations(problem, q_start, eps_tol, max_iterations, weights, objective, "huber_irls")
