import math
from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, Field, root_validator, validator

from l1rom.domain.entities.grid import Grid1D


class FluxId(str, Enum):
    """Numerical fluxes available to the finite-volume schemes"""

    GODUNOV_BURGERS = "godunov_burgers"
    RUSANOV_EULER = "rusanov_euler"
    UPWIND_ADVECTION = "upwind_advection"


class SchemeConfig(BaseModel):
    """Time-stepping configuration of an explicit or implicit scheme"""

    cfl: float = 0.9
    dt: Optional[float] = None
    t_final: float = 1.0
    flux_id: FluxId = FluxId.GODUNOV_BURGERS
    gamma: float = 1.4
    # negative controls deliberately step beyond the monotonicity bound
    allow_unstable: bool = False

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def check_ranges(cls, values):
        cfl = values["cfl"]
        if cfl <= 0 or (cfl > 1 and not values["allow_unstable"]):
            raise ValueError("cfl must lie in (0, 1]")
        if values["t_final"] <= 0:
            raise ValueError("t_final must be positive")
        if values["dt"] is not None and values["dt"] <= 0:
            raise ValueError("dt must be positive")
        return values

    @property
    def is_scalar(self) -> bool:
        return self.flux_id != FluxId.RUSANOV_EULER


class AdvectionProblem(BaseModel):
    """Steady advection with a parameterized sigmoid-derivative source"""

    mu: float = Field(..., ge=0.3, le=0.5)
    k: float = 100.0
    n_cells: int = 1000
    u_left: float = 1.0

    class Config:
        allow_mutation = False

    @validator("k")
    def positive_steepness(cls, v):
        if v <= 0:
            raise ValueError("k must be positive")
        return v

    @property
    def grid(self) -> Grid1D:
        return Grid1D(x_min=0.0, x_max=1.0, n_cells=self.n_cells, periodic=False)


class BurgersProblem(BaseModel):
    """Periodic Burgers equation with u0 = mu |sin 2x| + 0.1 on [0, 2 pi]"""

    mu: float = Field(..., ge=0.0, le=1.0)
    n_cells: int = 400
    t_final: float = math.pi
    cfl: float = 0.9
    # upper end of the parameter range, fixes the shared time step
    mu_max: float = 1.0

    class Config:
        allow_mutation = False

    @property
    def grid(self) -> Grid1D:
        return Grid1D(x_min=0.0, x_max=2.0 * math.pi, n_cells=self.n_cells, periodic=True)

    def scheme(self) -> SchemeConfig:
        max_speed = max(self.mu_max, self.mu) + 0.1
        n_steps = math.ceil(self.t_final * max_speed / (self.cfl * self.grid.dx))
        return SchemeConfig(
            cfl=self.cfl,
            dt=self.t_final / n_steps,
            t_final=self.t_final,
            flux_id=FluxId.GODUNOV_BURGERS,
        )


class EulerProblem(BaseModel):
    """Shock tube blending the Sod (mu=1) and Lax (mu=0) initial states"""

    mu: float = Field(..., ge=0.0, le=1.0)
    gamma: float = 1.4
    n_cells: int = 1000
    t_final: float = 0.16
    cfl: float = 0.9
    mu_range: Tuple[float, float] = (0.0, 1.0)
    # wave speeds inside rarefactions exceed the initial ones
    speed_margin: float = 1.5

    class Config:
        allow_mutation = False

    @validator("gamma")
    def gamma_above_one(cls, v):
        if v <= 1:
            raise ValueError("gamma must exceed 1")
        return v

    @property
    def grid(self) -> Grid1D:
        return Grid1D(x_min=0.0, x_max=1.0, n_cells=self.n_cells, periodic=False)


class NozzleProblem(BaseModel):
    """Quasi-1D Laval nozzle with outlet static pressure p_out = mu * p_ref"""

    mu: float
    gamma: float = 1.4
    n_cells: int = 200
    p_total: float = 1.0
    rho_total: float = 1.0
    p_ref: float = 0.5
    cfl: float = 0.8
    max_iterations: int = 400_000
    rel_tol: float = 1e-8

    class Config:
        allow_mutation = False

    @validator("mu")
    def positive_mu(cls, v):
        if v <= 0:
            raise ValueError("mu must be positive")
        return v

    @property
    def grid(self) -> Grid1D:
        return Grid1D(x_min=0.0, x_max=1.0, n_cells=self.n_cells, periodic=False)

    @property
    def p_out(self) -> float:
        return self.mu * self.p_ref
