import numpy as np
import pytest

from l1rom.domain.entities.minimize import Constraint, MinimizeProblem
from l1rom.domain.errors import InvalidInputError, RankDeficiencyError
from l1rom.domain.services.minimize import galerkin_solve, l2_min


@pytest.fixture
def linear_problem(rng):
    """Fixture for an overdetermined affine residual with its basis"""
    a = rng.standard_normal((25, 3))
    b = rng.standard_normal(25)
    return MinimizeProblem.affine(a, b, basis=a)


def test_l2_min_solves_linear_least_squares(linear_problem):
    """Test Gauss-Newton against the normal-equation solution"""
    report = l2_min(linear_problem, eps_tol=1e-12)
    expected = np.linalg.lstsq(linear_problem.a_eff, -linear_problem.offset, rcond=None)[0]

    assert report.converged
    np.testing.assert_allclose(report.q, expected, atol=1e-10)
    assert report.method == "l2"


def test_l2_min_nonlinear_residual():
    """Test Gauss-Newton on r(q) = (q0^2 - 4, q1 - 1)"""
    problem = MinimizeProblem(
        residual_fn=lambda q: np.array([q[0] ** 2 - 4.0, q[1] - 1.0]),
        jacobian_fn=lambda q: np.array([[2.0 * q[0], 0.0], [0.0, 1.0]]),
        k=2,
    )

    report = l2_min(problem, eps_tol=1e-12)

    np.testing.assert_allclose(report.q, [2.0, 1.0], atol=1e-8)
    assert report.objective_history[-1] <= report.objective_history[0]


def test_galerkin_matches_least_squares_when_the_test_space_is_the_jacobian(linear_problem):
    """Test V^T (A q + b) = 0 with V = A, i.e. the normal equations"""
    report = galerkin_solve(linear_problem, eps_tol=1e-12)
    expected = np.linalg.lstsq(linear_problem.a_eff, -linear_problem.offset, rcond=None)[0]

    np.testing.assert_allclose(report.q, expected, atol=1e-9)
    assert report.converged


def test_galerkin_recovers_an_exact_member():
    """Test that a residual vanishing at a basis column is solved exactly"""
    v = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    target = v[:, 1]
    problem = MinimizeProblem.affine(v, -target, basis=v)

    report = galerkin_solve(problem, eps_tol=1e-12)

    np.testing.assert_allclose(report.q, [0.0, 1.0], atol=1e-12)


def test_galerkin_needs_a_basis():
    problem = MinimizeProblem.affine(np.eye(2), np.zeros(2))

    with pytest.raises(InvalidInputError):
        galerkin_solve(problem)


def test_galerkin_refuses_constraints():
    problem = MinimizeProblem.affine(np.eye(2), np.zeros(2), constraint=Constraint.UNIT_SIMPLEX, basis=np.eye(2))

    with pytest.raises(InvalidInputError):
        galerkin_solve(problem)


def test_galerkin_singular_reduced_jacobian():
    """Test that a rank-deficient V^T Z is reported"""
    a = np.array([[1.0, 1.0], [1.0, 1.0]])
    problem = MinimizeProblem.affine(a, np.ones(2), basis=a)

    with pytest.raises(RankDeficiencyError):
        galerkin_solve(problem)
