"""Norms and total variation over grid fields and coefficient vectors.

Norms are plain sums over entries. The cell-width weight of the discrete
residual is applied where residuals are assembled, so the same functions
serve grid fields and reduced coordinates.
"""

from typing import Union

import numpy as np

from l1rom.domain.entities.grid import GridField
from l1rom.domain.errors import DivisionGuardError, InvalidInputError

ArrayOrField = Union[GridField, np.ndarray, list, tuple]


def _as_array(f: ArrayOrField) -> np.ndarray:
    if isinstance(f, GridField):
        return f.values
    array = np.asarray(f, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise InvalidInputError("input contains non-finite entries")
    return array


def l1_norm(f: ArrayOrField) -> float:
    """Sum of absolute entries"""
    return float(np.sum(np.abs(_as_array(f))))


def relative_l2_error(approx: GridField, reference: GridField) -> float:
    """||approx - reference||_2 / ||reference||_2"""
    if not approx.same_layout(reference):
        raise InvalidInputError("fields live on different grids or component counts")
    reference_norm = float(np.linalg.norm(reference.values))
    if reference_norm == 0.0:
        raise DivisionGuardError("reference field has zero L2 norm")
    return float(np.linalg.norm(approx.values - reference.values)) / reference_norm


def total_variation(f: GridField, component: int = 0) -> float:
    """Sum of absolute neighbour differences, wrapping on periodic grids"""
    values = f.component(component)
    tv = float(np.sum(np.abs(np.diff(values))))
    if f.grid.periodic:
        tv += abs(float(values[0] - values[-1]))
    return tv
