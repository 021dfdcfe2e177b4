import numpy as np
import pytest

from l1rom.domain.entities.dictionary import BasisMatrix, Dictionary
from l1rom.domain.entities.grid import Grid1D, GridField, Tau, Trajectory
from l1rom.domain.entities.problems import EulerProblem
from l1rom.domain.errors import DivisionGuardError, InvalidInputError
from l1rom.domain.services.dictionary_ops import (
    basis_at_time,
    ensure_full_rank,
    numerical_rank,
    perturb,
    pod_compress,
    select_local,
    snapshot_matrix,
)
from l1rom.domain.services.hdm import euler_initial


@pytest.fixture
def grid():
    return Grid1D(x_min=0.0, x_max=1.0, n_cells=20)


def _member(grid, mu):
    x = grid.centers
    bump = np.exp(-(((x - mu) / 0.1) ** 2))
    states = [GridField(grid=grid, values=bump + t) for t in (0.0, 1.0, 2.0)]
    return Trajectory(mu=(mu,), times=[0.0, 0.1, 0.2], states=states, scheme_id="test")


@pytest.fixture
def dictionary(grid):
    """Fixture for five members with three stored times"""
    return Dictionary(entries=[_member(grid, mu) for mu in (0.0, 0.2, 0.4, 0.6, 1.0)])


@pytest.fixture
def euler_momentum_basis():
    """Fixture for the t=0 momentum block of the shock-tube dictionary"""
    grid = EulerProblem(mu=0.0, n_cells=50).grid
    mus = [0.0, 0.2, 0.4, 0.5, 0.8, 1.0]
    columns = np.column_stack([euler_initial(mu, grid).component(1) for mu in mus])
    return BasisMatrix(columns=columns, source_taus=[Tau(t=0.0, mu=(mu,)) for mu in mus])


def test_basis_at_time(dictionary):
    """Test one column per member at the requested level"""
    basis = basis_at_time(dictionary, 1)

    assert basis.columns.shape == (20, 5)
    np.testing.assert_array_equal(basis.columns[:, 2], dictionary.entries[2].states[1].values)
    assert basis.source_taus[2] == Tau(t=0.1, mu=(0.4,))


def test_basis_at_time_out_of_range(dictionary):
    """Test the time-index guard"""
    with pytest.raises(IndexError):
        basis_at_time(dictionary, 3)


def test_snapshot_matrix_is_member_major(dictionary):
    """Test that every stored state becomes a column"""
    snapshots = snapshot_matrix(dictionary)

    assert snapshots.k == 15
    np.testing.assert_array_equal(snapshots.columns[:, 4], dictionary.entries[1].states[1].values)


def test_select_local_window(dictionary):
    """Test selection of the members within the window"""
    local = select_local(dictionary, Tau(t=0.0, mu=(0.5,)), 0.1)

    assert local.mus == [(0.4,), (0.6,)]


def test_select_local_falls_back_to_nearest(dictionary):
    """Test the two-nearest fallback when the window is empty"""
    local = select_local(dictionary, Tau(t=0.0, mu=(0.8,)), 0.05)

    assert local.mus == [(0.6,), (1.0,)]


def test_select_local_rejects_non_positive_window(dictionary):
    with pytest.raises(InvalidInputError):
        select_local(dictionary, Tau(t=0.0, mu=(0.5,)), 0.0)


def test_euler_momentum_is_rank_one(euler_momentum_basis):
    """Test that the shock-tube momentum at t=0 spans a single direction"""
    assert numerical_rank(euler_momentum_basis) == 1


def test_perturbation_restores_full_rank(euler_momentum_basis):
    """Test that a noise level above the rank tolerance recovers rank k"""
    perturbed = perturb(euler_momentum_basis, epsilon_rel=1e-8, seed=1)

    assert perturbed.perturbed
    assert numerical_rank(perturbed) == euler_momentum_basis.k


def test_perturbation_is_bounded_and_seeded(euler_momentum_basis):
    """Test the noise bound and reproducibility by seed"""
    columns = euler_momentum_basis.columns
    l_ref = np.max(columns) - np.min(columns)

    first = perturb(euler_momentum_basis, epsilon_rel=1e-6, seed=7)
    second = perturb(euler_momentum_basis, epsilon_rel=1e-6, seed=7)
    other = perturb(euler_momentum_basis, epsilon_rel=1e-6, seed=8)

    assert np.max(np.abs(first.columns - columns)) <= 1e-6 * l_ref
    np.testing.assert_array_equal(first.columns, second.columns)
    assert not np.array_equal(first.columns, other.columns)


def test_ensure_full_rank_leaves_independent_columns(dictionary):
    """Test that a full-rank basis passes through untouched"""
    basis = basis_at_time(dictionary, 0)

    assert ensure_full_rank(basis) is basis


def test_ensure_full_rank_perturbs_deficient_bases(euler_momentum_basis):
    """Test that a rank-deficient basis is flagged as perturbed"""
    assert ensure_full_rank(euler_momentum_basis, epsilon_rel=1e-8).perturbed


def test_pod_modes_are_orthonormal(dictionary):
    """Test orthonormality and the energy-based truncation"""
    snapshots = snapshot_matrix(dictionary)

    modes = pod_compress(snapshots, 1e-4)

    np.testing.assert_allclose(modes.columns.T @ modes.columns, np.eye(modes.k), atol=1e-12)
    assert 1 <= modes.k <= snapshots.k
    assert pod_compress(snapshots, 1e-2).k <= modes.k


def test_pod_of_repeated_columns_keeps_one_mode():
    """Test that identical snapshots compress to a single mode"""
    column = np.linspace(0.0, 1.0, 10)
    snapshots = BasisMatrix(columns=np.column_stack([column, column, 2.0 * column]), source_taus=[])

    assert pod_compress(snapshots, 1e-3).k == 1


def test_pod_guards():
    """Test the tolerance range and the all-zero guard"""
    zeros = BasisMatrix(columns=np.zeros((4, 2)), source_taus=[])

    with pytest.raises(DivisionGuardError):
        pod_compress(zeros, 1e-3)
    with pytest.raises(InvalidInputError):
        pod_compress(BasisMatrix(columns=np.eye(3), source_taus=[]), 1.5)
