import numpy as np
import pytest

from l1rom.domain.entities.grid import Grid1D
from l1rom.domain.entities.problems import EulerProblem
from l1rom.domain.services.hdm import euler_initial, pressure, shared_scheme, solve_euler
from l1rom.domain.services.hdm.fluxes import max_wave_speed


@pytest.fixture
def grid():
    return Grid1D(x_min=0.0, x_max=1.0, n_cells=100)


def test_initial_state_blends_sod_and_lax(grid):
    """Test the primitive blend left and right of the diaphragm"""
    state = euler_initial(0.6, grid).as_components()
    rho, m, _ = state[:, 0]

    assert rho == pytest.approx(0.6 + 0.4 * 0.445)
    assert m / rho == pytest.approx(0.2792)
    assert pressure(state[:, 0]) == pytest.approx(0.6 + 0.4 * 3.528)
    assert state[1, -1] == 0.0
    assert state[0, -1] == pytest.approx(0.6 * 0.125 + 0.4 * 0.5)


def test_sod_momentum_starts_at_rest(grid):
    """Test that the pure Sod state has no momentum"""
    np.testing.assert_array_equal(euler_initial(1.0, grid).component(1), 0.0)


def test_shared_scheme_covers_the_parameter_range(grid):
    """Test that one step serves every member within the CFL bound"""
    sod = EulerProblem(mu=1.0, n_cells=100)
    lax = EulerProblem(mu=0.0, n_cells=100)
    dt = shared_scheme(sod).dt

    assert shared_scheme(lax).dt == dt
    for mu in (0.0, 0.5, 1.0):
        speed = np.max(max_wave_speed(euler_initial(mu, grid).as_components(), 1.4))
        assert dt * speed / grid.dx <= sod.cfl


@pytest.mark.parametrize("mu", [0.0, 0.6, 1.0])
def test_mass_changes_only_through_the_inflow(mu):
    """Test conservation up to the constant boundary fluxes while waves stay inside"""
    trajectory = solve_euler(EulerProblem(mu=mu, n_cells=100, t_final=0.05))
    first = trajectory.states[0].as_components()
    last = trajectory.final_state.as_components()
    dx = trajectory.grid.dx
    inflow = trajectory.times[-1] * (first[1, 0] - first[1, -1]) / dx

    assert np.sum(last[0]) == pytest.approx(np.sum(first[0]) + inflow, rel=1e-10)


@pytest.mark.parametrize("mu", [0.0, 1.0])
def test_states_stay_physical(mu):
    """Test positive density and pressure at the final time"""
    last = solve_euler(EulerProblem(mu=mu, n_cells=100, t_final=0.05)).final_state.as_components()

    assert np.all(last[0] > 0)
    assert np.all(pressure(last) > 0)
