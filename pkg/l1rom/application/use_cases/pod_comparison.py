import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from l1rom.application.use_cases.experiments import Experiment
from l1rom.application.use_cases.rom import solve_on_basis
from l1rom.domain.entities.dictionary import Dictionary
from l1rom.domain.entities.greedy import GreedyHistory
from l1rom.domain.entities.grid import Trajectory
from l1rom.domain.entities.minimize import Constraint
from l1rom.domain.entities.rom import RomConfig
from l1rom.domain.errors import ConfigError
from l1rom.domain.services.dictionary_ops import pod_compress, snapshot_matrix
from l1rom.domain.services.norms import relative_l2_error

logger = logging.getLogger(__name__)

DEFAULT_POD_TOLERANCES = (1e-2, 1e-3, 1e-4)


class PodComparisonRow(BaseModel):
    """Candidate errors of one basis after one greedy iteration"""

    iteration: int
    n_snapshots: int
    basis: str
    basis_dim: int
    max_error: float
    mean_error: float

    class Config:
        allow_mutation = False


class PodComparisonUseCase:
    """Replay the greedy snapshot sets with POD-compressed bases

    Every prefix of the greedy selection is compressed at each energy
    tolerance and the candidates are re-solved on the compressed basis. The
    dictionary's own errors come from the greedy history.
    """

    def __init__(self, experiment: Experiment):
        if not experiment.is_steady:
            raise ConfigError("POD comparison is available for steady experiments")
        self.experiment = experiment

    def execute(
        self,
        d: Dictionary,
        history: GreedyHistory,
        rom_cfg: RomConfig,
        tolerances: Sequence[float] = DEFAULT_POD_TOLERANCES,
        truth: Optional[Dict[float, Trajectory]] = None,
    ) -> List[PodComparisonRow]:
        if not history.error_tables:
            raise ConfigError("the greedy history carries no candidate errors")
        # POD modes are not convex-combinable
        cfg = rom_cfg.copy(update={"constraint": Constraint.NONE, "local_window": None})
        mus = [float(c[0]) for c in history.candidates]
        truth = truth or {}
        for mu in mus:
            if mu not in truth:
                truth[mu] = self.experiment.solve_hdm(mu)
        order = [d.find(mu) for mu in history.selected]

        rows = []
        for iteration, errors in enumerate(history.error_tables):
            n_snapshots = iteration + 1
            rows.append(
                PodComparisonRow(
                    iteration=iteration,
                    n_snapshots=n_snapshots,
                    basis="dictionary",
                    basis_dim=n_snapshots,
                    max_error=max(errors),
                    mean_error=float(np.mean(errors)),
                )
            )
            snapshots = snapshot_matrix(d.subset(order[:n_snapshots]))
            for eps_pod in tolerances:
                basis = pod_compress(snapshots, eps_pod)
                pod_errors = []
                for mu in mus:
                    _, values = solve_on_basis(basis, self.experiment.residual(mu), cfg)
                    reference = truth[mu].states[0]
                    pod_errors.append(relative_l2_error(reference.with_values(values), reference))
                rows.append(
                    PodComparisonRow(
                        iteration=iteration,
                        n_snapshots=n_snapshots,
                        basis=f"pod_{eps_pod:g}",
                        basis_dim=basis.k,
                        max_error=max(pod_errors),
                        mean_error=float(np.mean(pod_errors)),
                    )
                )
                logger.info(
                    "POD eps=%g after iteration %d: dim %d, max error %.4e", eps_pod, iteration, basis.k, max(pod_errors)
                )
        return rows
