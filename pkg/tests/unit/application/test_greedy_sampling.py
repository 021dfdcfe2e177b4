from unittest.mock import MagicMock

import numpy as np
import pytest

from l1rom.application.use_cases.experiments import AdvectionExperiment
from l1rom.application.use_cases.greedy_sampling import GreedySamplingUseCase, greedy_sample
from l1rom.domain.entities.greedy import GreedyConfig
from l1rom.domain.entities.grid import Grid1D, GridField, Trajectory
from l1rom.domain.entities.rom import RomConfig, RomMethod
from l1rom.domain.errors import ConvergenceError, GreedyAbortedError

CANDIDATES = [(0.3,), (0.35,), (0.4,), (0.45,), (0.5,)]


def _steady(mu):
    grid = Grid1D(x_min=0.0, x_max=1.0, n_cells=4)
    return Trajectory(mu=(mu,), times=[0.0], states=[GridField(grid=grid, values=np.full(4, mu))], scheme_id="test")


@pytest.fixture
def mock_experiment():
    """Fixture for an experiment whose candidates all share one indicator"""
    experiment = MagicMock()
    experiment.solve_hdm.side_effect = _steady
    experiment.rom.return_value = MagicMock(cumulative_residual=1.0)
    experiment.relative_error.return_value = 0.5
    return experiment


@pytest.fixture(scope="module")
def advection():
    return AdvectionExperiment(n_cells=100)


def _config(**kwargs):
    params = dict(candidates=CANDIDATES, mu0=(0.4,), max_samples=2, rom_cfg=RomConfig(method=RomMethod.L1_LP))
    params.update(kwargs)
    return GreedyConfig(**params)


def test_greedy_adds_distinct_members(advection):
    """Test that every iteration adds one new candidate"""
    d, history = GreedySamplingUseCase(advection).execute(_config())

    assert len(d) == 3
    assert len(set(d.mus)) == 3
    assert d.mus[0] == (0.4,)
    assert history.selected == d.mus
    assert history.iterations == 2
    assert len(history.indicator_tables) == 3
    assert all(len(table) == len(CANDIDATES) for table in history.indicator_tables)


def test_greedy_picks_the_largest_indicator(advection):
    """Test the second member against the first indicator table"""
    d, history = GreedySamplingUseCase(advection).execute(_config(max_samples=1))

    first = history.indicator_tables[0]
    expected = max((i for i in range(len(CANDIDATES)) if i != 2), key=lambda i: first[i])
    assert d.mus[1] == CANDIDATES[expected]


def test_greedy_is_deterministic_across_threads(advection):
    """Test that a thread pool reproduces the serial selection"""
    _, serial = GreedySamplingUseCase(advection).execute(_config())
    _, threaded = GreedySamplingUseCase(advection).execute(_config(threads=2))

    assert serial.selected == threaded.selected
    np.testing.assert_allclose(serial.indicator_max, threaded.indicator_max)


def test_single_candidate_stops_immediately(mock_experiment):
    d, history = greedy_sample(GreedyConfig(candidates=[(0.4,)], mu0=(0.4,)), mock_experiment)

    assert len(d) == 1
    assert history.iterations == 0
    assert len(history.indicator_max) == 1


def test_ties_go_to_the_lowest_index(mock_experiment):
    """Test the selection order when every indicator is equal"""
    _, history = GreedySamplingUseCase(mock_experiment).execute(_config(max_samples=3))

    assert history.selected == [(0.4,), (0.3,), (0.35,), (0.45,)]


def test_eps_stop_ends_the_loop(mock_experiment):
    """Test that indicators at or below the threshold add nothing"""
    d, history = GreedySamplingUseCase(mock_experiment).execute(_config(eps_stop=1.0))

    assert len(d) == 1
    assert history.indicator_max == [1.0]


def test_compute_errors_solves_every_truth_once(mock_experiment):
    """Test that candidate truths are solved up front and cached"""
    use_case = GreedySamplingUseCase(mock_experiment, compute_errors=True)

    _, history = use_case.execute(_config())

    assert mock_experiment.solve_hdm.call_count == len(CANDIDATES)
    assert sorted(use_case.truth) == [mu[0] for mu in CANDIDATES]
    assert history.error_max == [0.5, 0.5, 0.5]
    assert history.error_mean == [0.5, 0.5, 0.5]


def test_hdm_failure_aborts_with_partial_results(mock_experiment):
    """Test that the error carries the dictionary and history built so far"""
    mock_experiment.solve_hdm.side_effect = [_steady(0.4), ConvergenceError("no convergence", 1.0, 50)]

    with pytest.raises(GreedyAbortedError) as excinfo:
        GreedySamplingUseCase(mock_experiment).execute(_config())

    assert excinfo.value.history.selected == [(0.4,)]
    assert len(excinfo.value.dictionary) == 1
    assert isinstance(excinfo.value.__cause__, ConvergenceError)


def test_seed_must_be_a_candidate():
    with pytest.raises(ValueError):
        GreedyConfig(candidates=CANDIDATES, mu0=(0.42,))
