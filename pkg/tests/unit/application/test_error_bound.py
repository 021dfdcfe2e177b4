import math

import pytest

from l1rom.application.use_cases.experiments import BurgersExperiment
from l1rom.application.use_cases.rom import check_error_bound
from l1rom.application.use_cases.verification import verify_burgers_error_bound
from l1rom.domain.entities.minimize import Constraint
from l1rom.domain.entities.rom import RomConfig, RomMethod


@pytest.fixture(scope="module")
def burgers():
    return BurgersExperiment(n_cells=64, t_final=math.pi / 4)


@pytest.fixture(scope="module")
def simplex_run(burgers):
    """Fixture for a simplex-constrained ROM of mu = 0.5 over two neighbours"""
    d = burgers.build_dictionary([0.4, 0.6])
    cfg = RomConfig(method=RomMethod.L1_LP, constraint=Constraint.UNIT_SIMPLEX)
    return d, burgers.rom(d, 0.5, cfg)


def test_burgers_rom_satisfies_the_bound(burgers):
    """Test both the residual bound and the convex-hull estimate"""
    verification = verify_burgers_error_bound(burgers, RomConfig(method=RomMethod.L1_LP))

    assert verification.free.passed
    assert verification.simplex.passed
    assert verification.simplex.sharp_passed
    assert verification.passed
    assert verification.free.sharp_bound is None


def test_bound_is_the_nearest_initial_distance(simplex_run):
    """Test bound = min over members of dx ||w0 - u0_j||_1"""
    d, trajectory = simplex_run

    report = check_error_bound(d, (0.5,), trajectory, 0.0)

    # u0 differs by 0.1 |sin 2x| from both neighbours
    expected = d.grid.dx * sum(0.1 * abs(math.sin(2.0 * x)) for x in d.grid.centers)
    assert report.bound == pytest.approx(expected, rel=1e-12)
    assert len(report.margins) == len(trajectory.times)


def test_inflated_residuals_violate_the_bound(simplex_run):
    """Test that a residual above the bound is reported"""
    d, trajectory = simplex_run
    inflated = trajectory.copy(update={"residual_norms": [10.0] * len(trajectory.times)})

    report = check_error_bound(d, (0.5,), inflated, 0.0)

    assert not report.passed
    assert report.worst_margin < 0.0


def test_perturbation_allowance_grows_the_bound(simplex_run):
    """Test the n eps allowance once any step used a perturbed basis"""
    d, trajectory = simplex_run
    flagged = trajectory.copy(update={"perturbed": [True] * len(trajectory.times)})

    plain = check_error_bound(d, (0.5,), trajectory, 0.0)
    report = check_error_bound(d, (0.5,), flagged, 1e-6)

    assert report.perturbation_allowance > 0.0
    assert report.margins[-1] > plain.margins[-1]
