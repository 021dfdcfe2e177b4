"""Reduced-order solution drivers.

Steady problems minimize r(Vq) over the dictionary snapshots. Unsteady
problems project the explicit update S(w^n) onto the members at time n+1 by
minimizing dx (Vq - S(w^n)) in the configured norm, feeding each
reconstruction back into the next step.
"""

import logging
from enum import Enum
from typing import Any, Callable, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel

from l1rom.domain.entities.dictionary import BasisMatrix, Dictionary
from l1rom.domain.entities.grid import GridField, Tau
from l1rom.domain.entities.minimize import HuberParams, MinimizeProblem, MinimizeReport
from l1rom.domain.entities.problems import FluxId, SchemeConfig
from l1rom.domain.entities.rom import ErrorBoundReport, RomConfig, RomMethod, RomTrajectory
from l1rom.domain.errors import InvalidInputError
from l1rom.domain.services.dictionary_ops import basis_at_time, ensure_full_rank, select_local
from l1rom.domain.services.hdm.euler import euler_initial
from l1rom.domain.services.hdm.schemes import explicit_update
from l1rom.domain.services.minimize import (
    finite_difference_jacobian,
    galerkin_solve,
    irls_huber,
    irls_l1,
    l1_min_lp,
    l2_min,
)
from l1rom.domain.services.norms import l1_norm

logger = logging.getLogger(__name__)


class Reconstruction(str, Enum):
    """How a multi-component state is rebuilt from the members"""

    FULL = "full"
    SINGLE_EXPANSION = "single_expansion"
    PER_VARIABLE = "per_variable"


class AffineResidual(BaseModel):
    """r(w) = matrix w + offset"""

    matrix: Any
    offset: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    def __call__(self, w: np.ndarray) -> np.ndarray:
        return self.matrix @ w + self.offset


SteadyResidual = Union[AffineResidual, Callable[[np.ndarray], np.ndarray]]


class RomStep(BaseModel):
    """Coefficients, reconstruction and diagnostics of one ROM step"""

    coords: np.ndarray
    field: GridField
    reports: List[MinimizeReport]
    residual_norm: float
    perturbed: bool

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


def run_minimizer(problem: MinimizeProblem, cfg: RomConfig, q0: Optional[np.ndarray] = None) -> MinimizeReport:
    """Dispatch to the backend named by cfg.method"""
    if cfg.method == RomMethod.L1_LP:
        if not problem.is_affine:
            raise InvalidInputError("l1_lp needs an affine residual")
        return l1_min_lp(problem.a_eff, problem.offset, problem.constraint, max_rows=cfg.lp_max_rows)
    if cfg.method == RomMethod.L1_IRLS:
        return irls_l1(problem, q0, cfg.eps_tol, cfg.max_iterations)
    if cfg.method == RomMethod.HUBER_IRLS:
        return irls_huber(problem, q0, cfg.eps_tol, HuberParams(eps2=cfg.huber_eps2), cfg.max_iterations)
    if cfg.method == RomMethod.L2:
        return l2_min(problem, q0, cfg.eps_tol, cfg.max_iterations)
    return galerkin_solve(problem, q0, cfg.eps_tol, cfg.max_iterations)


def localize(d: Dictionary, mu_star: Optional[Tuple[float, ...]], cfg: RomConfig) -> Dictionary:
    """Restrict d to the local window around mu_star when one is configured"""
    if cfg.local_window is None or not mu_star:
        return d
    local = select_local(d, Tau(t=0.0, mu=tuple(mu_star)), cfg.local_window)
    logger.debug("local dictionary for mu=%s: %s", mu_star, local.mus)
    return local


def prepare_basis(basis: BasisMatrix, cfg: RomConfig, seed_offset: int = 0) -> BasisMatrix:
    return ensure_full_rank(basis, cfg.perturb_eps, cfg.seed + seed_offset, cfg.rank_tol)


def steady_problem(basis: BasisMatrix, residual: SteadyResidual, cfg: RomConfig) -> MinimizeProblem:
    v = basis.columns
    if isinstance(residual, AffineResidual):
        return MinimizeProblem.affine(
            np.asarray(residual.matrix @ v), residual.offset, cfg.eta, cfg.constraint, basis=v
        )

    def residual_fn(q):
        return np.asarray(residual(v @ q), dtype=float)

    def jacobian_fn(q):
        return finite_difference_jacobian(residual_fn, q)

    return MinimizeProblem(
        residual_fn=residual_fn,
        jacobian_fn=jacobian_fn,
        k=basis.k,
        eta=cfg.eta,
        constraint=cfg.constraint,
        basis=v,
    )


def solve_on_basis(
    basis: BasisMatrix, residual: SteadyResidual, cfg: RomConfig, q0: Optional[np.ndarray] = None
) -> Tuple[MinimizeReport, np.ndarray]:
    """Minimize r(Vq) over an arbitrary basis, returning the report and Vq"""
    report = run_minimizer(steady_problem(basis, residual, cfg), cfg, q0)
    return report, basis.reconstruct(report.q)


def rom_steady_trajectory(
    d: Dictionary, residual: SteadyResidual, cfg: RomConfig, mu_star: Tuple[float, ...]
) -> RomTrajectory:
    """Steady ROM solve wrapped as a single-level trajectory"""
    d = localize(d, mu_star, cfg)
    basis = prepare_basis(basis_at_time(d, 0), cfg)
    report, values = solve_on_basis(basis, residual, cfg)
    field = GridField(grid=d.grid, n_components=d.n_components, values=values)
    logger.info(
        "steady ROM mu=%s with %s: %d iterations, residual %.4e", mu_star, cfg.method.value, report.iterations, report.residual_l1
    )
    trajectory = RomTrajectory(
        mu=tuple(mu_star),
        times=np.zeros(1),
        reduced_coords=[report.q[np.newaxis, :]],
        reconstructed=[field],
        reports=[report],
        residual_norms=[report.residual_l1],
        perturbed=[basis.perturbed],
        initial=field,
        member_mus=d.mus,
    )
    return trajectory


def rom_solve_steady(
    d: Dictionary, residual: SteadyResidual, cfg: RomConfig, mu_star: Optional[Tuple[float, ...]] = None
) -> Tuple[MinimizeReport, GridField]:
    """Minimize r(Vq) over the steady snapshots and reconstruct Vq"""
    trajectory = rom_steady_trajectory(d, residual, cfg, mu_star if mu_star is not None else ())
    return trajectory.reports[0], trajectory.reconstructed[0]


def _fit_blocks(reconstruction: Reconstruction, n_components: int) -> List[Optional[int]]:
    if reconstruction == Reconstruction.FULL or n_components == 1:
        return [None]
    if reconstruction == Reconstruction.SINGLE_EXPANSION:
        return [0]
    return list(range(n_components))


def _fit(
    d: Dictionary,
    target: GridField,
    n: int,
    cfg: RomConfig,
    reconstruction: Reconstruction,
    q_previous: Optional[np.ndarray] = None,
) -> RomStep:
    """Configured-norm projection of target onto the members at time index n"""
    dx = d.grid.dx
    blocks = _fit_blocks(reconstruction, d.n_components)
    coords, reports, pieces = [], [], []
    perturbed = False
    for row, component in enumerate(blocks):
        basis = prepare_basis(basis_at_time(d, n, component), cfg, seed_offset=n)
        perturbed = perturbed or basis.perturbed
        values = target.values if component is None else target.component(component)
        v = basis.columns
        problem = MinimizeProblem.affine(dx * v, -dx * values, cfg.eta, cfg.constraint, basis=v)
        q0 = None if q_previous is None else q_previous[row]
        report = run_minimizer(problem, cfg, q0)
        coords.append(report.q)
        reports.append(report)
        pieces.append(basis.reconstruct(report.q))

    if reconstruction == Reconstruction.SINGLE_EXPANSION and d.n_components > 1:
        # density coefficients applied to every conserved variable
        values = basis_at_time(d, n).reconstruct(coords[0])
    else:
        values = np.concatenate(pieces)
    field = GridField(grid=d.grid, n_components=d.n_components, values=values)
    residual_norm = sum(report.residual_l1 for report in reports)
    return RomStep(
        coords=np.vstack(coords), field=field, reports=reports, residual_norm=residual_norm, perturbed=perturbed
    )


def rom_step_unsteady(
    d: Dictionary,
    w_rom_n: GridField,
    n: int,
    scheme: SchemeConfig,
    cfg: RomConfig,
    reconstruction: Reconstruction = Reconstruction.FULL,
    q_previous: Optional[np.ndarray] = None,
) -> RomStep:
    """Project S(w^n) onto span of the members at time n+1"""
    if n + 1 >= d.n_times:
        raise IndexError(f"no dictionary level at time index {n + 1}")
    if not w_rom_n.same_layout(d.entries[0].states[0]):
        raise InvalidInputError("ROM state does not live on the dictionary grid")
    update, _ = explicit_update(w_rom_n, scheme)
    return _fit(d, update, n + 1, cfg, reconstruction, q_previous)


def dictionary_scheme(d: Dictionary, flux_id: FluxId, gamma: float = 1.4, cfl: float = 1.0) -> SchemeConfig:
    """Fixed-step scheme matching the dictionary time grid

    The CFL guard uses the stability limit itself since ROM states may carry
    slightly larger signal speeds than the members.
    """
    times = d.time_grid
    if times.size < 2:
        raise InvalidInputError("an unsteady dictionary needs at least two stored times")
    return SchemeConfig(cfl=cfl, dt=float(times[1] - times[0]), t_final=float(times[-1]), flux_id=flux_id, gamma=gamma)


def rom_solve_unsteady(
    d: Dictionary,
    w0: GridField,
    scheme: SchemeConfig,
    cfg: RomConfig,
    t_final: Optional[float] = None,
    reconstruction: Reconstruction = Reconstruction.FULL,
    mu: Tuple[float, ...] = (),
) -> RomTrajectory:
    """Self-closing ROM loop over the shared time grid"""
    d = localize(d, mu if mu else None, cfg)
    times = d.time_grid
    last = times.size - 1 if t_final is None else int(np.searchsorted(times, t_final * (1.0 + 1e-12), side="right")) - 1
    if last < 0:
        raise InvalidInputError("t_final precedes the first stored time")

    step = _fit(d, w0, 0, cfg, reconstruction)
    steps = [step]
    for n in range(last):
        step = rom_step_unsteady(d, step.field, n, scheme, cfg, reconstruction, q_previous=step.coords)
        steps.append(step)
        if (n + 1) % 100 == 0:
            logger.debug("ROM mu=%s reached step %d of %d", mu, n + 1, last)

    logger.info(
        "unsteady ROM mu=%s with %s (%s): %d steps, cumulative residual %.4e",
        mu,
        cfg.method.value,
        reconstruction.value,
        last,
        sum(s.residual_norm for s in steps),
    )
    return RomTrajectory(
        mu=tuple(mu),
        times=times[: last + 1],
        reduced_coords=[s.coords for s in steps],
        reconstructed=[s.field for s in steps],
        reports=[report for s in steps for report in s.reports],
        residual_norms=[s.residual_norm for s in steps],
        perturbed=[s.perturbed for s in steps],
        initial=w0,
        member_mus=d.mus,
    )


def euler_rom_single_expansion(
    d: Dictionary, cfg: RomConfig, mu_star: float, t_final: Optional[float] = None, gamma: float = 1.4
) -> RomTrajectory:
    """One coefficient vector per step, fitted on density and applied to all variables"""
    if d.n_components != 3:
        raise InvalidInputError("Euler reconstruction needs a 3-component dictionary")
    scheme = dictionary_scheme(d, FluxId.RUSANOV_EULER, gamma)
    w0 = euler_initial(mu_star, d.grid, gamma)
    return rom_solve_unsteady(d, w0, scheme, cfg, t_final, Reconstruction.SINGLE_EXPANSION, (mu_star,))


def euler_rom_per_variable(
    d: Dictionary, cfg: RomConfig, mu_star: float, t_final: Optional[float] = None, gamma: float = 1.4
) -> RomTrajectory:
    """Independent coefficient vectors for density, momentum and energy"""
    if d.n_components != 3:
        raise InvalidInputError("Euler reconstruction needs a 3-component dictionary")
    scheme = dictionary_scheme(d, FluxId.RUSANOV_EULER, gamma)
    w0 = euler_initial(mu_star, d.grid, gamma)
    return rom_solve_unsteady(d, w0, scheme, cfg, t_final, Reconstruction.PER_VARIABLE, (mu_star,))


def check_error_bound(
    d: Dictionary,
    mu_star: Tuple[float, ...],
    trajectory: RomTrajectory,
    perturb_eps: float,
    truth=None,
    rel_tol: float = 1e-9,
) -> ErrorBoundReport:
    """Compare per-step projection residuals with min_mu ||w0(mu*) - w0(mu)||_1 + n eps

    When the HDM truth of mu* is given, the convex-hull estimate
    ||w^n_rom - w^n(mu*)||_1 <= max_mu ||w0(mu*) - w0(mu)||_1 + n eps is checked too.
    """
    if trajectory.member_mus:
        d = d.subset([d.find(mu) for mu in trajectory.member_mus if d.find(mu) is not None])
    dx = d.grid.dx
    initial = trajectory.initial.values
    distances = [dx * l1_norm(initial - entry.states[0].values) for entry in d.entries]
    bound = min(distances)

    allowance = 0.0
    if any(trajectory.perturbed):
        stacked = np.concatenate([np.concatenate([s.values for s in entry.states]) for entry in d.entries])
        l_ref = float(np.max(stacked) - np.min(stacked))
        extent = d.grid.x_max - d.grid.x_min
        largest_q = max(float(np.max(np.sum(np.abs(c), axis=1))) for c in trajectory.reduced_coords)
        allowance = perturb_eps * l_ref * extent * largest_q

    scale = 1.0 + dx * max(l1_norm(entry.states[0].values) for entry in d.entries)
    tolerance = rel_tol * scale
    margins = [bound + n * allowance - residual for n, residual in enumerate(trajectory.residual_norms)]
    worst = min(margins)

    sharp_bound = sharp_margins = sharp_passed = None
    if truth is not None:
        sharp_bound = max(distances)
        sharp_margins = [
            sharp_bound + n * allowance - dx * l1_norm(state.values - truth.states[n].values)
            for n, state in enumerate(trajectory.reconstructed)
        ]
        sharp_passed = min(sharp_margins) >= -tolerance

    report = ErrorBoundReport(
        passed=worst >= -tolerance,
        bound=bound,
        perturbation_allowance=allowance,
        margins=margins,
        worst_margin=worst,
        sharp_bound=sharp_bound,
        sharp_margins=sharp_margins,
        sharp_passed=sharp_passed,
    )
    if not report.passed:
        logger.warning("error bound violated for mu=%s, worst margin %.3e", mu_star, worst)
    return report
