import numpy as np
import pytest

from l1rom.domain.errors import InvalidInputError, RankDeficiencyError
from l1rom.domain.services.minimize import project_to_simplex, weighted_lsq
from l1rom.domain.services.minimize.least_squares import _stacked_solve


def test_unit_weights_give_the_least_squares_step(rng):
    """Test the step against numpy's least-squares solver"""
    z = rng.standard_normal((20, 3))
    r = rng.standard_normal(20)
    q = rng.standard_normal(3)

    step = weighted_lsq(z, r, np.ones(20), 0.0, q)

    np.testing.assert_allclose(step, np.linalg.lstsq(z, -r, rcond=None)[0], atol=1e-10)


def test_weights_scale_the_rows(rng):
    """Test that weights act as sqrt-scaled rows"""
    z = rng.standard_normal((15, 2))
    r = rng.standard_normal(15)
    w = rng.uniform(0.5, 2.0, 15)

    step = weighted_lsq(z, r, w, 0.0, np.zeros(2))

    expected = np.linalg.lstsq(w[:, np.newaxis] * z, -w * r, rcond=None)[0]
    np.testing.assert_allclose(step, expected, atol=1e-10)


def test_regularization_penalizes_the_new_coefficients():
    """Test the closed form of the regularized normal equations"""
    z = np.eye(2)
    r = np.array([-1.0, -1.0])
    q = np.array([0.5, 0.0])

    step = weighted_lsq(z, r, np.ones(2), 1.0, q)

    # (I + I) dq = 1 - q
    np.testing.assert_allclose(step, [0.25, 0.5])


def test_singular_system_raises():
    """Test rank deficiency without regularization"""
    z = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])

    with pytest.raises(RankDeficiencyError):
        weighted_lsq(z, np.ones(3), np.ones(3), 0.0, np.zeros(2))


def test_regularization_repairs_singular_systems():
    """Test that eta > 0 keeps the normal equations solvable"""
    z = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])

    step = weighted_lsq(z, -np.ones(3), np.ones(3), 1e-6, np.zeros(2))

    assert step[0] == pytest.approx(step[1])


def test_negative_weights_raise():
    with pytest.raises(InvalidInputError):
        weighted_lsq(np.eye(2), np.ones(2), np.array([1.0, -1.0]), 0.0, np.zeros(2))


@pytest.mark.parametrize(
    "v, expected",
    [
        ([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]),
        ([1.0, 1.0], [0.5, 0.5]),
        ([2.0, 0.0, -1.0], [1.0, 0.0, 0.0]),
        ([0.0, 0.0, 0.0, 0.0], [0.25, 0.25, 0.25, 0.25]),
    ],
)
def test_project_to_simplex(v, expected):
    """Test fixed points and clipping of the simplex projection"""
    np.testing.assert_allclose(project_to_simplex(np.array(v)), expected, atol=1e-15)


def test_projection_lands_on_the_simplex(rng):
    """Test feasibility of projected random points"""
    for _ in range(20):
        q = project_to_simplex(rng.standard_normal(5) * 3.0)
        assert np.all(q >= 0.0)
        assert np.sum(q) == pytest.approx(1.0)


def test_stacked_form_matches_the_normal_equations(rng):
    """Test that the fallback for indefinite regularized systems solves the same problem"""
    z = rng.standard_normal((12, 3))
    r = rng.standard_normal(12)
    w = rng.uniform(0.5, 2.0, 12)
    q = rng.standard_normal(3)

    np.testing.assert_allclose(_stacked_solve(z, r, w, 0.3, q), weighted_lsq(z, r, w, 0.3, q), atol=1e-10)
