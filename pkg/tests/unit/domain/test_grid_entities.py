import numpy as np
import pytest

from l1rom.domain.entities.dictionary import BasisMatrix, Dictionary
from l1rom.domain.entities.grid import Grid1D, GridField, Tau, Trajectory
from l1rom.domain.entities.problems import AdvectionProblem, SchemeConfig


@pytest.fixture
def grid():
    """Fixture for a small periodic grid"""
    return Grid1D(x_min=0.0, x_max=1.0, n_cells=4, periodic=True)


def _trajectory(grid, mu, times=(0.0, 0.5)):
    states = [GridField(grid=grid, values=np.full(grid.n_cells, mu + t)) for t in times]
    return Trajectory(mu=(mu,), times=list(times), states=states, scheme_id="test")


def test_grid_geometry(grid):
    """Test cell width, centers and faces of a uniform grid"""
    assert grid.dx == 0.25
    np.testing.assert_allclose(grid.centers, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(grid.faces, [0.0, 0.25, 0.5, 0.75, 1.0])


def test_grid_rejects_empty_extent():
    """Test that x_max must exceed x_min"""
    with pytest.raises(ValueError):
        Grid1D(x_min=1.0, x_max=1.0, n_cells=4)


def test_grid_field_is_read_only(grid):
    """Test that stored values cannot be written through"""
    field = GridField(grid=grid, values=[1.0, 2.0, 3.0, 4.0])

    with pytest.raises(ValueError):
        field.values[0] = 5.0


def test_grid_field_rejects_non_finite_values(grid):
    """Test that NaN entries are refused"""
    with pytest.raises(ValueError):
        GridField(grid=grid, values=[1.0, np.nan, 3.0, 4.0])


def test_grid_field_rejects_wrong_length(grid):
    """Test that the value count must match components times cells"""
    with pytest.raises(ValueError):
        GridField(grid=grid, n_components=2, values=np.ones(4))


def test_grid_field_components(grid):
    """Test component-major access of a multi-component field"""
    components = np.arange(12, dtype=float).reshape(3, 4)
    field = GridField.from_components(grid, components)

    assert field.n_components == 3
    np.testing.assert_array_equal(field.component(1), [4.0, 5.0, 6.0, 7.0])
    np.testing.assert_array_equal(field.as_components(), components)
    with pytest.raises(IndexError):
        field.component(3)


def test_tau_rejects_negative_time():
    """Test that time instances are non-negative"""
    with pytest.raises(ValueError):
        Tau(t=-1.0, mu=(0.5,))


def test_trajectory_requires_increasing_times(grid):
    """Test that stored times start at zero and increase"""
    with pytest.raises(ValueError):
        _trajectory(grid, 0.1, times=(0.0, 0.0))
    with pytest.raises(ValueError):
        _trajectory(grid, 0.1, times=(0.5, 1.0))


def test_trajectory_properties(grid):
    """Test grid, final state and tau helpers of a trajectory"""
    trajectory = _trajectory(grid, 0.2)

    assert trajectory.grid == grid
    assert trajectory.n_components == 1
    np.testing.assert_allclose(trajectory.final_state.values, 0.7)
    assert trajectory.tau(1) == Tau(t=0.5, mu=(0.2,))


def test_dictionary_rejects_duplicate_parameters(grid):
    """Test that member parameters are pairwise distinct"""
    with pytest.raises(ValueError):
        Dictionary(entries=[_trajectory(grid, 0.1), _trajectory(grid, 0.1)])


def test_dictionary_rejects_misaligned_times(grid):
    """Test that every member shares the time grid"""
    with pytest.raises(ValueError):
        Dictionary(entries=[_trajectory(grid, 0.1), _trajectory(grid, 0.2, times=(0.0, 0.4))])


def test_dictionary_growth_and_lookup(grid):
    """Test with_entry, subset and find"""
    d = Dictionary(entries=[_trajectory(grid, 0.1)], seed=3)
    d = d.with_entry(_trajectory(grid, 0.2)).with_entry(_trajectory(grid, 0.3))

    assert len(d) == 3
    assert d.seed == 3
    assert d.mus == [(0.1,), (0.2,), (0.3,)]
    assert d.find((0.2,)) == 1
    assert d.find((0.25,)) is None
    assert d.subset([2, 0]).mus == [(0.3,), (0.1,)]


def test_basis_matrix_blocks():
    """Test that rows split into equal component blocks"""
    basis = BasisMatrix(columns=np.ones((6, 2)), source_taus=[], n_blocks=3)

    assert basis.k == 2
    assert basis.blocks() == [slice(0, 2), slice(2, 4), slice(4, 6)]
    with pytest.raises(ValueError):
        BasisMatrix(columns=np.ones((5, 2)), source_taus=[], n_blocks=3)


def test_scheme_config_cfl_range():
    """Test that the CFL number is bounded unless a negative control asks otherwise"""
    with pytest.raises(ValueError):
        SchemeConfig(cfl=1.5)

    scheme = SchemeConfig(cfl=2.0, allow_unstable=True)

    assert scheme.cfl == 2.0


def test_advection_problem_parameter_range():
    """Test that the advection parameter is confined to [0.3, 0.5]"""
    with pytest.raises(ValueError):
        AdvectionProblem(mu=0.6)
