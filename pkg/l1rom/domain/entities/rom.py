from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from l1rom.domain.entities.grid import GridField
from l1rom.domain.entities.minimize import Constraint, MinimizeReport


class RomMethod(str, Enum):
    """Reduced-order model reduction approaches"""

    GALERKIN = "galerkin"
    L2 = "l2"
    L1_LP = "l1_lp"
    L1_IRLS = "l1_irls"
    HUBER_IRLS = "huber_irls"


class RomConfig(BaseModel):
    method: RomMethod = RomMethod.L1_IRLS
    constraint: Constraint = Constraint.NONE
    eta: float = Field(1e-8, ge=0.0)
    eps_tol: float = 1e-4
    local_window: Optional[float] = None
    perturb_eps: float = Field(1e-12, ge=0.0)
    seed: int = 0
    max_iterations: int = 200
    huber_eps2: float = 1e-6
    lp_max_rows: int = 5000
    rank_tol: float = 1e-10

    class Config:
        allow_mutation = False

    @validator("eps_tol")
    def positive_tolerance(cls, v):
        if v <= 0:
            raise ValueError("eps_tol must be positive")
        return v

    @validator("local_window")
    def positive_window(cls, v):
        if v is not None and v <= 0:
            raise ValueError("local_window must be positive")
        return v

    @root_validator(skip_on_failure=True)
    def galerkin_is_unconstrained(cls, values):
        if values["method"] == RomMethod.GALERKIN and values["constraint"] != Constraint.NONE:
            raise ValueError("galerkin projection does not support constraints")
        return values


class RomTrajectory(BaseModel):
    """Reduced coordinates and reconstructions at every stored time

    reduced_coords[n] has shape (n_fits, k): one row for a single expansion,
    one row per conserved variable for per-variable reconstruction.
    residual_norms[n] is the dx-weighted L1 norm of the fit at step n.
    """

    mu: Tuple[float, ...]
    times: np.ndarray
    reduced_coords: List[np.ndarray]
    reconstructed: List[GridField]
    reports: List[MinimizeReport]
    residual_norms: List[float]
    perturbed: List[bool]
    initial: GridField
    member_mus: List[Tuple[float, ...]] = []

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def check_lengths(cls, values):
        n = len(values["times"])
        for name in ("reduced_coords", "reconstructed", "residual_norms", "perturbed"):
            if len(values[name]) != n:
                raise ValueError(f"{name} needs one entry per time")
        return values

    @property
    def final_state(self) -> GridField:
        return self.reconstructed[-1]

    @property
    def total_iterations(self) -> int:
        return sum(report.iterations for report in self.reports)

    @property
    def cumulative_residual(self) -> float:
        return float(sum(self.residual_norms))


class ErrorBoundReport(BaseModel):
    """Per-step comparison of projection residuals against the a-priori bound"""

    passed: bool
    bound: float
    perturbation_allowance: float
    margins: List[float]
    worst_margin: float
    sharp_bound: Optional[float] = None
    sharp_margins: Optional[List[float]] = None
    sharp_passed: Optional[bool] = None

    class Config:
        allow_mutation = False
