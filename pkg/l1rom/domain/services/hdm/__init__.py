"""High-dimensional finite-volume models."""

from l1rom.domain.services.hdm.advection import (
    advection_source,
    analytic_advection_profile,
    assemble_advection_system,
    solve_advection_steady,
)
from l1rom.domain.services.hdm.burgers import (
    burgers_initial,
    rankine_hugoniot_speed,
    shock_position,
    solve_burgers,
    track_shock,
)
from l1rom.domain.services.hdm.euler import euler_initial, shared_scheme, solve_euler
from l1rom.domain.services.hdm.fluxes import godunov_flux_burgers, pressure, rusanov_flux_euler
from l1rom.domain.services.hdm.nozzle import (
    mach_number,
    nozzle_area,
    nozzle_steady_residual,
    primitive_variables,
    solve_nozzle_steady,
)
from l1rom.domain.services.hdm.schemes import explicit_residual, explicit_step, implicit_step

__all__ = [
    "advection_source",
    "analytic_advection_profile",
    "assemble_advection_system",
    "burgers_initial",
    "euler_initial",
    "explicit_residual",
    "explicit_step",
    "godunov_flux_burgers",
    "implicit_step",
    "mach_number",
    "nozzle_area",
    "nozzle_steady_residual",
    "pressure",
    "primitive_variables",
    "rankine_hugoniot_speed",
    "rusanov_flux_euler",
    "shared_scheme",
    "shock_position",
    "solve_advection_steady",
    "solve_burgers",
    "solve_euler",
    "solve_nozzle_steady",
    "track_shock",
]
