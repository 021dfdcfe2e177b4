from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator

from l1rom.domain.entities.rom import RomConfig


class GreedyConfig(BaseModel):
    """Greedy sampling settings; max_samples bounds the number of added members"""

    candidates: List[Tuple[float, ...]]
    mu0: Tuple[float, ...]
    eps_stop: float = 0.0
    max_samples: int = 10
    rom_cfg: RomConfig = RomConfig()
    threads: int = 1

    class Config:
        allow_mutation = False

    @validator("candidates")
    def non_empty(cls, v):
        if not v:
            raise ValueError("the candidate set is empty")
        return v

    @root_validator(skip_on_failure=True)
    def seed_is_candidate(cls, values):
        mu0 = np.asarray(values["mu0"], dtype=float)
        if not any(np.allclose(np.asarray(c), mu0, rtol=0.0, atol=1e-12) for c in values["candidates"]):
            raise ValueError(f"mu0={values['mu0']} is not one of the candidates")
        if values["max_samples"] < 0:
            raise ValueError("max_samples must be non-negative")
        if values["threads"] < 1:
            raise ValueError("threads must be positive")
        return values

    def candidate_index(self, mu: Tuple[float, ...]) -> int:
        target = np.asarray(mu, dtype=float)
        for index, candidate in enumerate(self.candidates):
            if np.allclose(np.asarray(candidate), target, rtol=0.0, atol=1e-12):
                return index
        raise KeyError(mu)


class GreedyHistory(BaseModel):
    """Selections and per-candidate diagnostics after every greedy iteration

    indicator_tables[i] and error_tables[i] are aligned with the candidate list
    and describe the dictionary holding selected[: i + 1].
    """

    candidates: List[Tuple[float, ...]]
    selected: List[Tuple[float, ...]] = []
    indicator_max: List[float] = []
    error_max: List[float] = []
    error_mean: List[float] = []
    indicator_tables: List[List[float]] = []
    error_tables: List[List[float]] = []

    @property
    def iterations(self) -> int:
        return max(len(self.selected) - 1, 0)
