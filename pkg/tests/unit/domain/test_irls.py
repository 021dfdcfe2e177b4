import numpy as np
import pytest

from l1rom.domain.entities.minimize import Constraint, HuberParams, MinimizeProblem
from l1rom.domain.errors import EvaluationError, InvalidInputError
from l1rom.domain.services.minimize import huber_value, irls_huber, irls_l1, l1_min_lp
from l1rom.domain.services.minimize.irls import default_initial_guess, huber_weights


@pytest.fixture
def median_problem():
    """Fixture for r(q) = q - (1, 2, 10), minimized in L1 at the median"""
    return MinimizeProblem.affine(np.ones((3, 1)), -np.array([1.0, 2.0, 10.0]))


def test_huber_value():
    """Test the quadratic and linear branches"""
    assert huber_value(0.5, 1.0) == pytest.approx(0.25)
    assert huber_value(-3.0, 1.0) == pytest.approx(5.0)
    np.testing.assert_allclose(huber_value(np.array([0.5, 3.0]), 1.0), [0.25, 5.0])


def test_huber_value_rejects_non_positive_threshold():
    with pytest.raises(InvalidInputError):
        huber_value(1.0, 0.0)


def test_irls_l1_finds_the_median(median_problem):
    """Test the one-dimensional L1 fit from a start away from the data"""
    report = irls_l1(median_problem, q0=np.array([0.0]), eps_tol=1e-12, max_iterations=500)

    assert report.converged
    assert report.q[0] == pytest.approx(2.0, abs=1e-6)
    assert report.residual_l1 == pytest.approx(9.0, abs=1e-5)


def test_irls_huber_finds_the_median(median_problem):
    """Test that a small Huber threshold behaves like L1"""
    report = irls_huber(median_problem, q0=np.array([0.0]), eps_tol=1e-12, max_iterations=500)

    assert report.q[0] == pytest.approx(2.0, abs=1e-6)
    assert report.method == "huber_irls"


@pytest.mark.parametrize("seed", range(50))
def test_irls_l1_matches_the_linear_program(seed):
    """Test the IRLS objective at default settings against the exact LP optimum"""
    rng = np.random.default_rng(seed)
    n, k = int(rng.integers(20, 201)), int(rng.integers(1, 11))
    a = rng.standard_normal((n, k))
    b = rng.standard_normal(n)

    exact = l1_min_lp(a, b).objective
    report = irls_l1(MinimizeProblem.affine(a, b))

    assert abs(report.residual_l1 - exact) <= 1e-6 * (1.0 + exact)


def test_objective_history_starts_at_the_initial_guess(median_problem):
    """Test that the history records the start and every iteration"""
    report = irls_l1(median_problem, q0=np.array([0.0]), eps_tol=1e-3)

    assert report.objective_history[0] == pytest.approx(13.0)
    assert len(report.objective_history) == report.iterations + 1
    assert report.objective == report.objective_history[-1]


def test_iteration_cap_is_reported(median_problem):
    """Test that hitting the cap returns an unconverged report"""
    report = irls_l1(median_problem, q0=np.array([0.0]), eps_tol=1e-14, max_iterations=2)

    assert not report.converged
    assert report.iterations == 2


def test_simplex_constraint_keeps_coefficients_feasible(rng):
    """Test projection onto the unit simplex after every step"""
    a = rng.standard_normal((30, 3))
    b = rng.standard_normal(30)
    problem = MinimizeProblem.affine(a, b, constraint=Constraint.UNIT_SIMPLEX)

    report = irls_l1(problem, eps_tol=1e-10, max_iterations=500)

    assert np.all(report.q >= 0.0)
    assert np.sum(report.q) == pytest.approx(1.0)


def test_regularization_shrinks_coefficients():
    """Test that eta pulls an underdetermined fit towards small coefficients"""
    a = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-9]])
    b = -np.array([2.0, 2.0])
    problem = MinimizeProblem.affine(a, b, eta=1e-4)

    report = irls_l1(problem, q0=np.array([0.0, 0.0]), eps_tol=1e-10, max_iterations=500)

    assert np.sum(np.abs(report.q)) < 2.5
    np.testing.assert_allclose(report.q, [1.0, 1.0], atol=1e-2)


def test_non_finite_residual_raises():
    """Test that a NaN residual is reported as an evaluation error"""
    problem = MinimizeProblem(
        residual_fn=lambda q: np.array([np.nan, 1.0]),
        jacobian_fn=lambda q: np.ones((2, 1)),
        k=1,
    )

    with pytest.raises(EvaluationError):
        irls_l1(problem)


def test_fixed_huber_threshold_is_respected(median_problem):
    """Test that an explicit threshold seeds the first weights"""
    report = irls_huber(median_problem, q0=np.array([0.0]), eps_tol=1e-10, hp=HuberParams(M=100.0), max_iterations=1)

    # every residual below M: a plain least-squares step to the mean
    assert report.q[0] == pytest.approx(13.0 / 3.0)


def test_huber_weights_are_scaled_by_the_threshold():
    """Test 1/M inside the threshold and the L1 weight |r|^(-1/2) outside"""
    np.testing.assert_allclose(huber_weights(np.array([5e-7, -4.0]), 1e-6), [1e6, 0.5])


def test_irls_huber_moves_off_the_start_on_small_residuals(rng):
    """Test that eta = 1e-8 does not pin the coefficients when every residual is tiny"""
    a = 1e-4 * rng.standard_normal((40, 3))
    q_true = np.array([0.2, 0.5, 0.3])
    problem = MinimizeProblem.affine(a, -a @ q_true, eta=1e-8)

    report = irls_huber(problem)

    np.testing.assert_allclose(report.q, q_true, atol=1e-2)


def test_default_initial_guess_is_uniform():
    np.testing.assert_allclose(default_initial_guess(4), [0.25] * 4)


def test_irls_l1_finishes_on_a_vertex(rng):
    """Test that the last iterate is moved to the LP vertex when that lowers the objective"""
    a = rng.standard_normal((60, 4))
    b = rng.standard_normal(60)

    report = irls_l1(MinimizeProblem.affine(a, b), max_iterations=3)

    assert report.residual_l1 == pytest.approx(l1_min_lp(a, b).objective, rel=1e-9)
    assert report.objective == report.objective_history[-1]
    assert report.iterations == 3
