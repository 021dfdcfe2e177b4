from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator

from l1rom.domain.errors import InvalidInputError


class Grid1D(BaseModel):
    """Uniform 1D grid of cells on [x_min, x_max]"""

    x_min: float
    x_max: float
    n_cells: int
    periodic: bool = False

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def check_extent(cls, values):
        if not values["x_max"] > values["x_min"]:
            raise ValueError("x_max must be greater than x_min")
        if values["n_cells"] < 2:
            raise ValueError("a grid needs at least 2 cells")
        return values

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


class GridField(BaseModel):
    """Scalar or p-component state on a grid, stored component-major"""

    grid: Grid1D
    n_components: int = 1
    values: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("values", pre=True)
    def as_readonly_array(cls, v):
        array = np.array(v, dtype=float).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise InvalidInputError("grid field values must be finite")
        array.flags.writeable = False
        return array

    @root_validator(skip_on_failure=True)
    def check_length(cls, values):
        p = values["n_components"]
        if p < 1:
            raise ValueError("n_components must be positive")
        expected = p * values["grid"].n_cells
        if values["values"].size != expected:
            raise ValueError(
                f"expected {expected} values for {p} component(s), got {values['values'].size}"
            )
        return values

    @classmethod
    def from_components(cls, grid: Grid1D, components: np.ndarray) -> "GridField":
        """Build a field from a (p, n_cells) or (n_cells,) array"""
        array = np.atleast_2d(np.asarray(components, dtype=float))
        return cls(grid=grid, n_components=array.shape[0], values=array.reshape(-1))

    def component(self, index: int) -> np.ndarray:
        """Contiguous read-only view of one variable"""
        if not 0 <= index < self.n_components:
            raise IndexError(f"component {index} out of range for {self.n_components} component(s)")
        n = self.grid.n_cells
        return self.values[index * n:(index + 1) * n]

    def as_components(self) -> np.ndarray:
        """Read-only (p, n_cells) view"""
        return self.values.reshape(self.n_components, self.grid.n_cells)

    def with_values(self, values: np.ndarray) -> "GridField":
        return GridField(grid=self.grid, n_components=self.n_components, values=values)

    def same_layout(self, other: "GridField") -> bool:
        return self.grid == other.grid and self.n_components == other.n_components


class Tau(BaseModel):
    """Time and parameter instance"""

    t: float
    mu: Tuple[float, ...]

    class Config:
        allow_mutation = False

    @validator("t")
    def non_negative_time(cls, v):
        if v < 0:
            raise ValueError("t must be non-negative")
        return v


class Trajectory(BaseModel):
    """Time-indexed HDM states for one parameter value"""

    mu: Tuple[float, ...]
    times: np.ndarray
    states: List[GridField]
    scheme_id: str

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("times", pre=True)
    def check_times(cls, v):
        times = np.array(v, dtype=float).reshape(-1)
        if times.size == 0 or times[0] != 0.0:
            raise ValueError("times must start at 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        times.flags.writeable = False
        return times

    @root_validator(skip_on_failure=True)
    def check_states(cls, values):
        states = values["states"]
        if len(states) != values["times"].size:
            raise ValueError("one state per time is required")
        first = states[0]
        if any(not state.same_layout(first) for state in states[1:]):
            raise ValueError("all states must share one grid and component count")
        return values

    @property
    def grid(self) -> Grid1D:
        return self.states[0].grid

    @property
    def n_components(self) -> int:
        return self.states[0].n_components

    @property
    def final_state(self) -> GridField:
        return self.states[-1]

    def tau(self, n: int) -> Tau:
        return Tau(t=float(self.times[n]), mu=self.mu)
