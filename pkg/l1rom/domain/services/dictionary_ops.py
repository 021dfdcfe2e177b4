"""Basis extraction, local selection, rank repair and POD compression."""

import logging
from typing import Optional

import numpy as np

from l1rom.domain.entities.dictionary import BasisMatrix, Dictionary
from l1rom.domain.entities.grid import Tau
from l1rom.domain.errors import DivisionGuardError, InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_PERTURB_EPS = 1e-12
DEFAULT_RANK_TOL = 1e-10
_WINDOW_SLACK = 1e-12


def basis_at_time(d: Dictionary, n: int, component: Optional[int] = None) -> BasisMatrix:
    """Members at time index n as columns, optionally one variable block only"""
    if not 0 <= n < d.n_times:
        raise IndexError(f"time index {n} out of range for {d.n_times} stored times")
    if component is None:
        columns = [entry.states[n].values for entry in d.entries]
        n_blocks = d.n_components
    else:
        columns = [entry.states[n].component(component) for entry in d.entries]
        n_blocks = 1
    return BasisMatrix(
        columns=np.column_stack(columns),
        source_taus=[entry.tau(n) for entry in d.entries],
        n_blocks=n_blocks,
    )


def snapshot_matrix(d: Dictionary, component: Optional[int] = None) -> BasisMatrix:
    """Every stored state of every member, member-major"""
    columns, taus = [], []
    for entry in d.entries:
        for n, state in enumerate(entry.states):
            columns.append(state.values if component is None else state.component(component))
            taus.append(entry.tau(n))
    return BasisMatrix(
        columns=np.column_stack(columns),
        source_taus=taus,
        n_blocks=d.n_components if component is None else 1,
    )


def _parameter_distance(d: Dictionary, mu) -> np.ndarray:
    target = np.asarray(mu, dtype=float)
    return np.array([np.max(np.abs(np.asarray(m) - target)) for m in d.mus])


def select_local(d: Dictionary, tau_star: Tau, window: float) -> Dictionary:
    """Members within window of tau_star.mu, else the two nearest ones"""
    if window <= 0:
        raise InvalidInputError("window must be positive")
    distance = _parameter_distance(d, tau_star.mu)
    inside = [i for i in range(len(d)) if distance[i] <= window + _WINDOW_SLACK]
    if not inside:
        nearest = np.argsort(distance, kind="stable")[:2]
        inside = sorted(int(i) for i in nearest)
        logger.debug("no member within %.3g of mu=%s, using the %d nearest", window, tau_star.mu, len(inside))
    return d.subset(inside)


def perturb(m: BasisMatrix, epsilon_rel: float = DEFAULT_PERTURB_EPS, seed: int = 0) -> BasisMatrix:
    """Add uniform noise of half-width epsilon_rel * L_ref, L_ref taken per block"""
    if epsilon_rel < 0:
        raise InvalidInputError("epsilon_rel must be non-negative")
    rng = np.random.default_rng(seed)
    columns = np.array(m.columns)
    for block in m.blocks():
        values = columns[block]
        epsilon = epsilon_rel * float(np.max(values) - np.min(values))
        columns[block] = values + rng.uniform(-epsilon, epsilon, size=values.shape)
    return BasisMatrix(columns=columns, source_taus=m.source_taus, perturbed=True, n_blocks=m.n_blocks)


def singular_values(m: BasisMatrix) -> np.ndarray:
    """Singular values of the columns, decreasing, from the k x k triangular factor"""
    r = np.linalg.qr(m.columns, mode="r")
    return np.linalg.svd(r, compute_uv=False)


def numerical_rank(m: BasisMatrix, tol_rel: float = DEFAULT_RANK_TOL) -> int:
    if tol_rel <= 0:
        raise InvalidInputError("tol_rel must be positive")
    sigma = singular_values(m)
    if sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > tol_rel * sigma[0]))


def ensure_full_rank(
    m: BasisMatrix,
    epsilon_rel: float = DEFAULT_PERTURB_EPS,
    seed: int = 0,
    tol_rel: float = DEFAULT_RANK_TOL,
) -> BasisMatrix:
    """Perturb the basis only when its numerical rank is below k"""
    rank = numerical_rank(m, tol_rel)
    if rank >= m.k:
        return m
    logger.warning("basis has rank %d < k=%d, perturbing with epsilon_rel=%.1e", rank, m.k, epsilon_rel)
    return perturb(m, epsilon_rel, seed)


def pod_compress(snapshots: BasisMatrix, eps_pod: float) -> BasisMatrix:
    """Orthonormal POD modes keeping all but an eps_pod fraction of the energy"""
    if not 0.0 < eps_pod < 1.0:
        raise InvalidInputError("eps_pod must lie in (0, 1)")
    u, sigma, _ = np.linalg.svd(snapshots.columns, full_matrices=False)
    energy = sigma ** 2
    total = float(np.sum(energy))
    if total == 0.0:
        raise DivisionGuardError("cannot compress an all-zero snapshot matrix")
    # tail[j] is the energy left out when keeping j + 1 modes
    tail = (total - np.cumsum(energy)) / total
    kept = int(np.argmax(tail <= eps_pod)) + 1
    logger.debug("POD eps=%.1e keeps %d of %d modes", eps_pod, kept, sigma.size)
    return BasisMatrix(columns=u[:, :kept], source_taus=[], n_blocks=snapshots.n_blocks)
