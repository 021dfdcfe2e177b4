"""L1 residual minimization as a linear program.

The objective is a sum of kinked rows phi_i(g_i q + h_i) with
phi_i(r) = max(lo_i r, hi_i r). The rows of ||a q + b||_1 have slopes -1
and 1. The convex-hull variant adds the row sum(q) - 1, with infinite slopes
on both sides, and one row q_j per coefficient with slopes -inf and 0.

A vertex is fixed by k active rows with zero residual. The simplex walks
the bounded dual of that program: the multiplier of every active row must
lie within its slopes, and an active row whose multiplier leaves its interval
is released along the edge on which the other active rows stay at zero. Only
k x k systems are factored. Coordinates, residuals and multipliers are
recomputed from the original rows at every vertex, so optimality is always
priced against the data and never against an updated tableau.
"""

import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve, qr

from l1rom.domain.entities.minimize import Constraint, MinimizeReport
from l1rom.domain.errors import InvalidInputError, LinearProgramError, ProblemSizeError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ROWS = 5000
_OPTIMALITY_TOL = 1e-9
_RESIDUAL_TOL = 1e-12
_PIVOT_TOL = 1e-10
_TIE_TOL = 1e-12
_RANK_TOL = 1e-12
_INDEPENDENCE_TOL = 1e-8


class KinkedRows(NamedTuple):
    """Rows g q + h with slopes lo below and hi above their kink at zero"""

    g: np.ndarray
    h: np.ndarray
    lo: np.ndarray
    hi: np.ndarray


def absolute_rows(a: np.ndarray, b: np.ndarray) -> KinkedRows:
    n_rows = a.shape[0]
    return KinkedRows(a, b, np.full(n_rows, -1.0), np.ones(n_rows))


def simplex_rows(a: np.ndarray, b: np.ndarray) -> KinkedRows:
    """Absolute rows plus the hard rows sum(q) = 1 and q >= 0"""
    n_rows, k = a.shape
    g = np.vstack([a, np.ones((1, k)), np.eye(k)])
    h = np.concatenate([b, [-1.0], np.zeros(k)])
    lo = np.concatenate([np.full(n_rows, -1.0), [-np.inf], np.full(k, -np.inf)])
    hi = np.concatenate([np.ones(n_rows), [np.inf], np.zeros(k)])
    return KinkedRows(g, h, lo, hi)


def _independent_columns(a: np.ndarray) -> np.ndarray:
    r, permutation = qr(a, mode="r", pivoting=True)
    diagonal = np.abs(np.diag(r))
    if diagonal.size == 0 or diagonal[0] == 0.0:
        return permutation[:0]
    rank = int(np.count_nonzero(diagonal > _RANK_TOL * diagonal[0]))
    return np.sort(permutation[:rank])


def _starting_rows(a: np.ndarray, preferred: Optional[Sequence[int]] = None) -> List[int]:
    """k rows of a full-column-rank a forming a nonsingular square block

    Rows listed in preferred are taken greedily in that order while they stay
    independent. Otherwise a pivoted QR picks a well-conditioned block.
    """
    k = a.shape[1]
    if preferred is not None:
        norms = np.linalg.norm(a, axis=1)
        floor = _INDEPENDENCE_TOL * float(np.max(norms))
        chosen: List[int] = []
        frame = np.zeros((0, k))
        for i in preferred:
            rest = a[i] - frame.T @ (frame @ a[i])
            length = float(np.linalg.norm(rest))
            if length > floor:
                chosen.append(int(i))
                frame = np.vstack([frame, rest / length])
                if len(chosen) == k:
                    return chosen
        logger.debug("preferred rows span only %d of %d directions", len(chosen), k)
    _, permutation = qr(a.T, mode="r", pivoting=True)
    return [int(i) for i in permutation[:k]]


def vertex_simplex(rows: KinkedRows, basis: List[int], max_pivots: int) -> Tuple[np.ndarray, int]:
    """Minimize sum phi_i(g_i q + h_i) from the vertex whose active rows are basis

    The leaving row is the one with the largest multiplier violation. After a
    degenerate pivot the lowest-index violated row leaves instead (Bland's
    rule). Returns the optimal coordinates and the pivot count.
    """
    g, h, lo, hi = rows
    n_rows, k = g.shape
    basis = list(basis)
    both_finite = np.isfinite(lo) & np.isfinite(hi)
    # +1 means the nonbasic row sits on its hi side, -1 on its lo side
    side = np.ones(n_rows)
    degenerate = False

    for pivots in range(max_pivots + 1):
        factor = lu_factor(g[basis])
        q = lu_solve(factor, -h[basis])
        r = g @ q + h
        nonbasic = np.ones(n_rows, dtype=bool)
        nonbasic[basis] = False
        settled = nonbasic & both_finite & (np.abs(r) > _RESIDUAL_TOL)
        side[settled] = np.sign(r[settled])

        y = np.where(side > 0, hi, lo)
        y[basis] = 0.0
        multipliers = lu_solve(factor, -(g.T @ y), trans=1)
        upward = multipliers - hi[basis]
        downward = lo[basis] - multipliers
        violation = np.maximum(upward, downward)
        violated = np.nonzero(violation > _OPTIMALITY_TOL)[0]
        if violated.size == 0:
            return q, pivots
        if pivots == max_pivots:
            break

        if degenerate:
            position = int(min(violated, key=lambda p: basis[p]))
        else:
            position = int(violated[np.argmax(violation[violated])])
        direction_sign = 1.0 if upward[position] > _OPTIMALITY_TOL else -1.0
        unit = np.zeros(k)
        unit[position] = direction_sign
        direction = lu_solve(factor, unit)
        rate = g @ direction

        # breakpoints: nonbasic rows moving towards their kink
        threshold = _PIVOT_TOL * float(np.max(np.abs(rate)))
        ahead = np.nonzero(nonbasic & (side * rate < 0) & (np.abs(rate) > threshold))[0]
        steps = np.maximum(-r[ahead] / rate[ahead], 0.0)
        order = np.lexsort((-np.abs(rate[ahead]), steps))
        ahead, steps = ahead[order], steps[order]
        slope = -violation[position] + np.cumsum((hi[ahead] - lo[ahead]) * np.abs(rate[ahead]))
        stopping = np.nonzero(slope >= 0.0)[0]
        if stopping.size == 0:
            raise LinearProgramError("objective is unbounded along the released edge", reason="unbounded")

        step = steps[stopping[0]]
        tied = np.nonzero(np.abs(steps - step) <= _TIE_TOL * max(1.0, step))[0]
        # among rows reaching their kink together take the largest pivot
        entering_at = int(tied[np.argmax(np.abs(rate[ahead[tied]]))])
        side[ahead[: tied[0]]] *= -1.0
        side[basis[position]] = direction_sign
        basis[position] = int(ahead[entering_at])
        degenerate = step <= _TIE_TOL

    raise LinearProgramError(f"simplex did not terminate within {max_pivots} pivots", reason="iteration_limit")


def l1_min_lp(
    a_eff: np.ndarray,
    b: np.ndarray,
    constraint: Constraint = Constraint.NONE,
    max_rows: int = DEFAULT_MAX_ROWS,
    max_pivots: Optional[int] = None,
    warm_rows: Optional[Sequence[int]] = None,
) -> MinimizeReport:
    """Exact minimizer of ||a_eff q + b||_1, optionally over the unit simplex

    warm_rows ranks the rows expected to be active at the optimum; the
    unconstrained solve starts from the first independent k of them.
    """
    a_eff = np.asarray(a_eff, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    n_rows, k = a_eff.shape
    if n_rows > max_rows:
        raise ProblemSizeError(
            f"{n_rows} residual rows exceed the linear-program cap of {max_rows}; use l1_irls instead"
        )
    if b.size != n_rows:
        raise InvalidInputError("b must have one entry per row of a_eff")

    # the minimizer is invariant under a common scaling of a_eff and b
    scale = max(float(np.max(np.abs(a_eff))), float(np.max(np.abs(b))), np.finfo(float).tiny)
    a, offset = a_eff / scale, b / scale

    q = np.zeros(k)
    if constraint == Constraint.UNIT_SIMPLEX:
        columns = np.arange(k)
        rows = simplex_rows(a, offset)
        # start from the best single column: q = e_start
        start = int(np.argmin(np.sum(np.abs(a + offset[:, np.newaxis]), axis=0)))
        basis = [n_rows] + [n_rows + 1 + j for j in range(k) if j != start]
    else:
        columns = _independent_columns(a)
        if columns.size < k:
            logger.debug("a_eff has rank %d < k=%d, dropping dependent columns", columns.size, k)
        rows = absolute_rows(a[:, columns], offset)
        basis = _starting_rows(a[:, columns], warm_rows) if columns.size else []
    if max_pivots is None:
        max_pivots = 50 * (rows.g.shape[0] + k)

    pivots = 0
    if columns.size:
        solution, pivots = vertex_simplex(rows, basis, max_pivots)
        q[columns] = solution
    if constraint == Constraint.UNIT_SIMPLEX:
        q = np.maximum(q, 0.0)

    objective = float(np.sum(np.abs(a_eff @ q + b)))
    logger.debug("simplex finished after %d pivots, objective %.6e", pivots, objective)
    return MinimizeReport(
        q=q,
        objective=objective,
        iterations=pivots,
        converged=True,
        method="l1_lp",
        residual_l1=objective,
    )
