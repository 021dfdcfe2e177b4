"""Experiment definitions binding an HDM solver to its ROM driver.

Each experiment knows how to produce the HDM trajectory of one parameter,
how to run the ROM for a target parameter over a dictionary, and the
default parameter sets of its study.
"""

import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import List, Optional, Sequence, Type

import numpy as np

from l1rom.application.use_cases.rom import (
    AffineResidual,
    Reconstruction,
    dictionary_scheme,
    euler_rom_per_variable,
    euler_rom_single_expansion,
    rom_solve_unsteady,
    rom_steady_trajectory,
)
from l1rom.domain.entities.dictionary import Dictionary
from l1rom.domain.entities.grid import GridField, Trajectory
from l1rom.domain.entities.minimize import Constraint
from l1rom.domain.entities.problems import (
    AdvectionProblem,
    BurgersProblem,
    EulerProblem,
    FluxId,
    NozzleProblem,
)
from l1rom.domain.entities.rom import RomConfig, RomMethod, RomTrajectory
from l1rom.domain.errors import ConfigError
from l1rom.domain.services.hdm import (
    assemble_advection_system,
    burgers_initial,
    nozzle_steady_residual,
    solve_advection_steady,
    solve_burgers,
    solve_euler,
    solve_nozzle_steady,
)
from l1rom.domain.services.norms import relative_l2_error

logger = logging.getLogger(__name__)


class ExperimentKind(str, Enum):
    ADVECTION = "advection"
    BURGERS = "burgers"
    EULER = "euler"
    NOZZLE = "nozzle"


def steady_trajectory(mu: float, field: GridField, scheme_id: str) -> Trajectory:
    """Single-level trajectory holding a steady state"""
    return Trajectory(mu=(mu,), times=np.zeros(1), states=[field], scheme_id=scheme_id)


class Experiment(ABC):
    """HDM and ROM of one parameterized model problem"""

    kind: ExperimentKind
    is_steady: bool
    component_names: List[str] = ["u"]
    dictionary_mus: List[float]
    target_mu: float
    default_constraint: Constraint = Constraint.NONE
    default_method: RomMethod = RomMethod.L1_IRLS

    @abstractmethod
    def solve_hdm(self, mu: float) -> Trajectory:
        pass

    @abstractmethod
    def rom(self, d: Dictionary, mu: float, cfg: RomConfig) -> RomTrajectory:
        pass

    def build_dictionary(self, mus: Sequence[float], seed: int = 0) -> Dictionary:
        """Solve the HDM at every parameter, in order"""
        entries = [self.solve_hdm(mu) for mu in mus]
        logger.info("built %s dictionary with %d members", self.kind.value, len(entries))
        return Dictionary(entries=entries, seed=seed)

    def relative_error(self, rom_trajectory: RomTrajectory, truth: Trajectory, component: Optional[int] = None) -> float:
        """Relative L2 error at the last ROM time, optionally on one conserved variable"""
        index = len(rom_trajectory.times) - 1
        approx = rom_trajectory.reconstructed[index]
        reference = truth.states[index]
        if component is None:
            return relative_l2_error(approx, reference)
        grid = reference.grid
        return relative_l2_error(
            GridField(grid=grid, values=approx.component(component)),
            GridField(grid=grid, values=reference.component(component)),
        )


class AdvectionExperiment(Experiment):
    """Steady advection with a sharp source, ROM on the affine upwind residual"""

    kind = ExperimentKind.ADVECTION
    is_steady = True
    dictionary_mus = [0.3, 0.35, 0.4, 0.45, 0.5]
    target_mu = 0.4412
    candidates = [round(0.3 + 0.01 * i, 10) for i in range(21)]
    mu0 = 0.4
    default_method = RomMethod.HUBER_IRLS

    def __init__(self, n_cells: int = 1000, k: float = 100.0):
        self.n_cells = n_cells
        self.k = k

    def problem(self, mu: float) -> AdvectionProblem:
        return AdvectionProblem(mu=mu, k=self.k, n_cells=self.n_cells)

    def solve_hdm(self, mu: float) -> Trajectory:
        return steady_trajectory(mu, solve_advection_steady(self.problem(mu)), "fv-upwind-advection")

    def residual(self, mu: float) -> AffineResidual:
        matrix, offset = assemble_advection_system(self.problem(mu))
        return AffineResidual(matrix=matrix, offset=offset)

    def rom(self, d: Dictionary, mu: float, cfg: RomConfig) -> RomTrajectory:
        return rom_steady_trajectory(d, self.residual(mu), cfg, (mu,))


class BurgersExperiment(Experiment):
    """Periodic Burgers with a shared time grid across the parameter range"""

    kind = ExperimentKind.BURGERS
    is_steady = False
    dictionary_mus = [0.0, 0.2, 0.4, 0.6, 1.0]
    refined_mus = [0.0, 0.2, 0.4, 0.45, 0.55, 0.6, 1.0]
    refined_window = 0.1
    target_mu = 0.5

    def __init__(self, n_cells: int = 400, t_final: float = math.pi, cfl: float = 0.9):
        self.n_cells = n_cells
        self.t_final = t_final
        self.cfl = cfl

    def problem(self, mu: float) -> BurgersProblem:
        return BurgersProblem(mu=mu, n_cells=self.n_cells, t_final=self.t_final, cfl=self.cfl)

    def solve_hdm(self, mu: float) -> Trajectory:
        return solve_burgers(self.problem(mu))

    def rom(self, d: Dictionary, mu: float, cfg: RomConfig) -> RomTrajectory:
        scheme = dictionary_scheme(d, FluxId.GODUNOV_BURGERS)
        return rom_solve_unsteady(d, burgers_initial(mu, d.grid), scheme, cfg, self.t_final, Reconstruction.FULL, (mu,))


class EulerExperiment(Experiment):
    """Sod/Lax shock tube blend; per-variable reconstruction unless told otherwise"""

    kind = ExperimentKind.EULER
    is_steady = False
    component_names = ["rho", "m", "E"]
    dictionary_mus = [0.0, 0.2, 0.4, 0.5, 0.8, 1.0]
    target_mu = 0.6

    def __init__(
        self,
        n_cells: int = 1000,
        t_final: float = 0.16,
        cfl: float = 0.9,
        gamma: float = 1.4,
        reconstruction: Reconstruction = Reconstruction.PER_VARIABLE,
    ):
        if reconstruction == Reconstruction.FULL:
            raise ConfigError("Euler ROMs use single_expansion or per_variable reconstruction")
        self.n_cells = n_cells
        self.t_final = t_final
        self.cfl = cfl
        self.gamma = gamma
        self.reconstruction = reconstruction

    def problem(self, mu: float) -> EulerProblem:
        return EulerProblem(mu=mu, n_cells=self.n_cells, t_final=self.t_final, cfl=self.cfl, gamma=self.gamma)

    def solve_hdm(self, mu: float) -> Trajectory:
        return solve_euler(self.problem(mu))

    def rom(self, d: Dictionary, mu: float, cfg: RomConfig) -> RomTrajectory:
        if self.reconstruction == Reconstruction.SINGLE_EXPANSION:
            return euler_rom_single_expansion(d, cfg, mu, self.t_final, self.gamma)
        return euler_rom_per_variable(d, cfg, mu, self.t_final, self.gamma)


class NozzleExperiment(Experiment):
    """Steady Laval nozzle, ROM on the nonlinear area-weighted residual"""

    kind = ExperimentKind.NOZZLE
    is_steady = True
    component_names = ["rho", "m", "E"]
    dictionary_mus = [1.3, 1.4, 1.6, 1.7]
    target_mu = 1.5
    subsonic_mu = 1.9
    default_constraint = Constraint.UNIT_SIMPLEX

    def __init__(self, n_cells: int = 200, cfl: float = 0.8, gamma: float = 1.4):
        self.n_cells = n_cells
        self.cfl = cfl
        self.gamma = gamma

    def problem(self, mu: float) -> NozzleProblem:
        return NozzleProblem(mu=mu, n_cells=self.n_cells, cfl=self.cfl, gamma=self.gamma)

    def solve_hdm(self, mu: float) -> Trajectory:
        return steady_trajectory(mu, solve_nozzle_steady(self.problem(mu)), "fv-rusanov-nozzle")

    def residual(self, mu: float):
        problem = self.problem(mu)
        grid = problem.grid

        def residual(w: np.ndarray) -> np.ndarray:
            return nozzle_steady_residual(GridField(grid=grid, n_components=3, values=w), problem)

        return residual

    def rom(self, d: Dictionary, mu: float, cfg: RomConfig) -> RomTrajectory:
        return rom_steady_trajectory(d, self.residual(mu), cfg, (mu,))


_EXPERIMENTS = {
    ExperimentKind.ADVECTION: AdvectionExperiment,
    ExperimentKind.BURGERS: BurgersExperiment,
    ExperimentKind.EULER: EulerExperiment,
    ExperimentKind.NOZZLE: NozzleExperiment,
}


def experiment_class(kind) -> Type[Experiment]:
    try:
        return _EXPERIMENTS[ExperimentKind(kind)]
    except ValueError:
        raise ConfigError(f"unknown experiment {kind!r}") from None


def build_experiment(kind, **hdm_parameters) -> Experiment:
    """Instantiate an experiment by name, passing only non-None HDM overrides"""
    cls = experiment_class(kind)
    overrides = {key: value for key, value in hdm_parameters.items() if value is not None}
    try:
        return cls(**overrides)
    except TypeError as e:
        raise ConfigError(f"invalid parameters for {cls.kind.value}: {e}") from None
