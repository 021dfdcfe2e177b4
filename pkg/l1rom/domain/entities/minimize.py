from enum import Enum
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from l1rom.domain.errors import InvalidInputError


class Constraint(str, Enum):
    """Admissible set of reduced coordinates"""

    NONE = "none"
    UNIT_SIMPLEX = "unit_simplex"


class MinimizeProblem(BaseModel):
    """Residual r(Vq) and its reduced Jacobian Z = J(Vq) V, handed to any minimizer

    Affine problems also carry a_eff and offset so that r(q) = a_eff q + offset
    can be solved as a linear program. basis is needed by Galerkin projection.
    """

    residual_fn: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Callable[[np.ndarray], np.ndarray]
    k: int = Field(..., ge=1)
    eta: float = Field(0.0, ge=0.0)
    constraint: Constraint = Constraint.NONE
    basis: Optional[np.ndarray] = None
    a_eff: Optional[np.ndarray] = None
    offset: Optional[np.ndarray] = None

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def is_affine(self) -> bool:
        return self.a_eff is not None and self.offset is not None

    @classmethod
    def affine(
        cls,
        a_eff: np.ndarray,
        offset: np.ndarray,
        eta: float = 0.0,
        constraint: Constraint = Constraint.NONE,
        basis: Optional[np.ndarray] = None,
    ) -> "MinimizeProblem":
        """r(q) = a_eff q + offset with the constant Jacobian a_eff"""
        a_eff = np.asarray(a_eff, dtype=float)
        if a_eff.ndim != 2:
            raise InvalidInputError("a_eff must be an N x k matrix")
        offset = np.asarray(offset, dtype=float).reshape(-1)
        return cls(
            residual_fn=lambda q: a_eff @ q + offset,
            jacobian_fn=lambda q: a_eff,
            k=a_eff.shape[1],
            eta=eta,
            constraint=constraint,
            basis=basis,
            a_eff=a_eff,
            offset=offset,
        )


class MinimizeReport(BaseModel):
    """Coefficients and diagnostics of one minimization"""

    q: np.ndarray
    objective: float
    iterations: int
    converged: bool
    weights_floor_hits: int = 0
    method: str = ""
    residual_l1: float = 0.0
    objective_history: List[float] = []

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def finite_when_converged(cls, values):
        if values["converged"] and not np.isfinite(values["objective"]):
            raise ValueError("a converged report needs a finite objective")
        return values


class HuberParams(BaseModel):
    """Threshold M = eps2 * max(1, max|r|), recomputed from the latest residual"""

    eps2: float = 1e-6
    M: Optional[float] = None

    class Config:
        allow_mutation = False

    @validator("eps2")
    def positive_eps2(cls, v):
        if v <= 0:
            raise ValueError("eps2 must be positive")
        return v

    def threshold(self, residual: np.ndarray) -> float:
        return self.eps2 * max(1.0, float(np.max(np.abs(residual))))
