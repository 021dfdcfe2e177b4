"""Weighted least-squares steps and the unit-simplex projection."""

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, lstsq

from l1rom.domain.errors import InvalidInputError, RankDeficiencyError

# Cholesky pivots this far below the largest one mark a numerically singular matrix
_SINGULAR_PIVOT_RATIO = 1e-8


def _stacked_solve(z, r, w, eta, q_current):
    """Same minimizer from the stacked system [diag(w) Z; sqrt(eta) I] dq = [-w r; -sqrt(eta) q]"""
    root = np.sqrt(eta)
    matrix = np.vstack([w[:, np.newaxis] * z, root * np.eye(z.shape[1])])
    rhs = np.concatenate([-w * r, -root * q_current])
    return lstsq(matrix, rhs)[0]


def weighted_lsq(
    z: np.ndarray,
    r: np.ndarray,
    w: np.ndarray,
    eta: float,
    q_current: np.ndarray,
) -> np.ndarray:
    """Minimize ||diag(w)(Z dq + r)||^2 + eta ||q_current + dq||^2 over dq

    The k x k normal equations are solved by a Cholesky factorization. A
    regularized system that rounding has made indefinite is solved in its
    stacked least-squares form instead.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidInputError("weights must be finite and non-negative")
    z = np.asarray(z, dtype=float)
    q_current = np.asarray(q_current, dtype=float)
    w2 = w ** 2
    normal = z.T @ (w2[:, np.newaxis] * z)
    rhs = -z.T @ (w2 * r)
    if eta > 0:
        normal = normal + eta * np.eye(z.shape[1])
        rhs = rhs - eta * q_current
    try:
        factor = cho_factor(normal)
    except LinAlgError:
        if eta == 0:
            raise RankDeficiencyError("weighted least-squares system is singular")
        return _stacked_solve(z, r, w, eta, q_current)
    if eta == 0:
        pivots = np.abs(np.diag(factor[0]))
        if np.min(pivots) <= _SINGULAR_PIVOT_RATIO * np.max(pivots):
            raise RankDeficiencyError("weighted least-squares system is singular")
    return cho_solve(factor, rhs)


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {q >= 0, sum(q) = 1}"""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    index = np.arange(1, v.size + 1)
    rho = np.nonzero(u - cumulative / index > 0)[0][-1]
    theta = cumulative[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)
