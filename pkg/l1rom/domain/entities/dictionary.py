from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator

from l1rom.domain.entities.grid import Grid1D, Tau, Trajectory


class Dictionary(BaseModel):
    """Ordered HDM trajectories sharing one grid and one time grid"""

    entries: List[Trajectory]
    seed: int = 0

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("entries")
    def non_empty(cls, v):
        if not v:
            raise ValueError("a dictionary needs at least one entry")
        return v

    @root_validator(skip_on_failure=True)
    def check_alignment(cls, values):
        entries = values["entries"]
        first = entries[0]
        for entry in entries[1:]:
            if entry.grid != first.grid or entry.n_components != first.n_components:
                raise ValueError(f"entry mu={entry.mu} lives on a different grid")
            if entry.times.shape != first.times.shape or np.any(entry.times != first.times):
                raise ValueError(f"entry mu={entry.mu} is not aligned with the shared time grid")
        mus = [entry.mu for entry in entries]
        if len(set(mus)) != len(mus):
            raise ValueError("dictionary parameters must be pairwise distinct")
        return values

    @property
    def grid(self) -> Grid1D:
        return self.entries[0].grid

    @property
    def n_components(self) -> int:
        return self.entries[0].n_components

    @property
    def time_grid(self) -> np.ndarray:
        return self.entries[0].times

    @property
    def n_times(self) -> int:
        return self.time_grid.size

    @property
    def mus(self) -> List[Tuple[float, ...]]:
        return [entry.mu for entry in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def with_entry(self, trajectory: Trajectory) -> "Dictionary":
        return Dictionary(entries=[*self.entries, trajectory], seed=self.seed)

    def subset(self, indices: List[int]) -> "Dictionary":
        return Dictionary(entries=[self.entries[i] for i in indices], seed=self.seed)

    def find(self, mu: Tuple[float, ...]) -> Optional[int]:
        """Index of the entry with parameter mu, if any"""
        for index, entry in enumerate(self.entries):
            if np.allclose(entry.mu, mu, rtol=0.0, atol=1e-14):
                return index
        return None


class BasisMatrix(BaseModel):
    """N x k matrix of snapshot columns

    n_blocks counts the component blocks stacked in each column (1 for a
    per-variable slice or a scalar problem).
    """

    columns: np.ndarray
    source_taus: List[Tau]
    perturbed: bool = False
    n_blocks: int = 1

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("columns", pre=True)
    def as_readonly_matrix(cls, v):
        matrix = np.array(v, dtype=float)
        if matrix.ndim == 1:
            matrix = matrix[:, np.newaxis]
        if matrix.ndim != 2 or matrix.shape[1] < 1:
            raise ValueError("a basis needs at least one column")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("basis columns must be finite")
        matrix.flags.writeable = False
        return matrix

    @root_validator(skip_on_failure=True)
    def check_shape(cls, values):
        columns = values["columns"]
        # compressed bases (POD modes) have no source instances
        if values["source_taus"] and len(values["source_taus"]) != columns.shape[1]:
            raise ValueError("one source tau per column is required")
        if values["n_blocks"] < 1 or columns.shape[0] % values["n_blocks"] != 0:
            raise ValueError("rows must split evenly into component blocks")
        return values

    @property
    def k(self) -> int:
        return self.columns.shape[1]

    @property
    def n_rows(self) -> int:
        return self.columns.shape[0]

    def blocks(self) -> List[slice]:
        size = self.n_rows // self.n_blocks
        return [slice(b * size, (b + 1) * size) for b in range(self.n_blocks)]

    def reconstruct(self, q: np.ndarray) -> np.ndarray:
        return self.columns @ np.asarray(q, dtype=float)
