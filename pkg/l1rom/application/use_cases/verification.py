"""Property checks of the monotone schemes and of the ROM error estimate."""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel

from l1rom.application.use_cases.experiments import BurgersExperiment
from l1rom.application.use_cases.rom import check_error_bound
from l1rom.domain.entities.grid import Grid1D, GridField
from l1rom.domain.entities.minimize import Constraint
from l1rom.domain.entities.problems import SchemeConfig
from l1rom.domain.entities.rom import ErrorBoundReport, RomConfig
from l1rom.domain.services.hdm.schemes import admissible_dt, explicit_step
from l1rom.domain.services.norms import l1_norm, total_variation

logger = logging.getLogger(__name__)

_SLACK = 1e-12


class SchemePropertyReport(BaseModel):
    n_pairs: int
    contraction_failures: int
    order_failures: int
    tv_failures: int
    worst_contraction_margin: float

    class Config:
        allow_mutation = False

    @property
    def passed(self) -> bool:
        return self.contraction_failures == 0 and self.order_failures == 0 and self.tv_failures == 0


def check_scheme_properties(
    scheme: SchemeConfig,
    n_pairs: int = 100,
    seed: int = 0,
    grid: Optional[Grid1D] = None,
    low: float = 0.1,
    high: float = 1.1,
) -> SchemePropertyReport:
    """L1 contraction, order preservation and TV decay of one explicit step on random pairs

    Both states of a pair advance with the same step, derived from cfl and the
    larger of their signal speeds.
    """
    if scheme.cfl > 1.0:
        logger.warning("checking a scheme beyond its stability bound, cfl=%.3g", scheme.cfl)
    grid = grid or Grid1D(x_min=0.0, x_max=2.0 * np.pi, n_cells=64, periodic=True)
    rng = np.random.default_rng(seed)
    contraction_failures = order_failures = tv_failures = 0
    worst = np.inf

    for _ in range(n_pairs):
        u = GridField(grid=grid, values=rng.uniform(low, high, grid.n_cells))
        v = GridField(grid=grid, values=rng.uniform(low, high, grid.n_cells))
        above = GridField(grid=grid, values=u.values + rng.uniform(0.0, high - low, grid.n_cells))
        dt = min(admissible_dt(state, scheme) for state in (u, v, above))
        fixed = scheme.copy(update={"dt": dt})
        su, sv, s_above = (explicit_step(state, fixed) for state in (u, v, above))

        before = l1_norm(u.values - v.values)
        margin = before - l1_norm(su.values - sv.values)
        worst = min(worst, margin)
        if margin < -_SLACK * max(1.0, before):
            contraction_failures += 1
        if np.any(s_above.values < su.values - _SLACK):
            order_failures += 1
        if total_variation(su) > total_variation(u) * (1.0 + _SLACK):
            tv_failures += 1

    report = SchemePropertyReport(
        n_pairs=n_pairs,
        contraction_failures=contraction_failures,
        order_failures=order_failures,
        tv_failures=tv_failures,
        worst_contraction_margin=float(worst),
    )
    logger.info(
        "scheme properties at cfl=%.3g: %d contraction, %d order, %d TV failures over %d pairs",
        scheme.cfl,
        contraction_failures,
        order_failures,
        tv_failures,
        n_pairs,
    )
    return report


class ErrorBoundVerification(BaseModel):
    free: ErrorBoundReport
    simplex: ErrorBoundReport

    class Config:
        allow_mutation = False

    @property
    def passed(self) -> bool:
        return self.free.passed and self.simplex.passed and bool(self.simplex.sharp_passed)


def verify_burgers_error_bound(
    experiment: BurgersExperiment,
    rom_cfg: RomConfig,
    mu_star: Optional[float] = None,
    members=(0.4, 0.6),
) -> ErrorBoundVerification:
    """Error estimate of the Burgers ROM, unconstrained and on the unit simplex"""
    mu_star = experiment.target_mu if mu_star is None else mu_star
    d = experiment.build_dictionary(members, seed=rom_cfg.seed)
    truth = experiment.solve_hdm(mu_star)
    reports = {}
    for constraint in (Constraint.NONE, Constraint.UNIT_SIMPLEX):
        cfg = rom_cfg.copy(update={"constraint": constraint})
        trajectory = experiment.rom(d, mu_star, cfg)
        reports[constraint] = check_error_bound(
            d, (mu_star,), trajectory, cfg.perturb_eps, truth=truth if constraint == Constraint.UNIT_SIMPLEX else None
        )
    return ErrorBoundVerification(free=reports[Constraint.NONE], simplex=reports[Constraint.UNIT_SIMPLEX])
