"""Finite-difference reduced Jacobians and consistency checks."""

from typing import Callable, Optional

import numpy as np

from l1rom.domain.entities.minimize import MinimizeProblem

DEFAULT_STEP = np.sqrt(np.finfo(float).eps)


def finite_difference_jacobian(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    q: np.ndarray,
    step: float = DEFAULT_STEP,
    base: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Forward-difference Z[:, j] = (r(q + h_j e_j) - r(q)) / h_j"""
    q = np.asarray(q, dtype=float)
    r0 = np.asarray(residual_fn(q), dtype=float) if base is None else base
    z = np.empty((r0.size, q.size))
    for j in range(q.size):
        h = step * max(1.0, abs(q[j]))
        shifted = q.copy()
        shifted[j] += h
        z[:, j] = (np.asarray(residual_fn(shifted), dtype=float) - r0) / h
    return z


def check_jacobian(
    problem: MinimizeProblem,
    q: np.ndarray,
    direction: np.ndarray,
    step: float = 1e-6,
) -> float:
    """Relative mismatch between (r(q + h d) - r(q)) / h and Z d"""
    q = np.asarray(q, dtype=float)
    direction = np.asarray(direction, dtype=float)
    predicted = np.asarray(problem.jacobian_fn(q), dtype=float) @ direction
    difference = (problem.residual_fn(q + step * direction) - problem.residual_fn(q)) / step
    scale = max(float(np.linalg.norm(predicted)), np.finfo(float).tiny)
    return float(np.linalg.norm(difference - predicted)) / scale
