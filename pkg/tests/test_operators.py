import itertools

import numpy as np
import pytest

from sodsim.core import NonUnitInputError, RngHandle
from sodsim.operators import (
    BallSpec,
    dykstra_intersection,
    hard_threshold,
    project_l1_ball,
    project_l2_ball,
    project_orthogonal,
)

from oracles import l1_projection_bisection


def test_hard_threshold_basic():
    np.testing.assert_allclose(hard_threshold([1, -3, 2, 0], 2), [0, -3, 2, 0])


def test_hard_threshold_tie_lowest_index():
    np.testing.assert_allclose(hard_threshold([1, 1, 1], 2), [1, 1, 0])


def test_hard_threshold_s_exceeds_length():
    np.testing.assert_allclose(hard_threshold([5], 3), [5])


def test_hard_threshold_best_s_term():
    rng = RngHandle(20, 0).generator()
    for _ in range(100):
        n = int(rng.integers(2, 10))
        s = int(rng.integers(1, n + 1))
        v = rng.standard_normal(n)
        best = hard_threshold(v, s)
        for support in itertools.combinations(range(n), s):
            w = np.zeros(n)
            w[list(support)] = v[list(support)]
            assert np.linalg.norm(v - best) <= np.linalg.norm(v - w) + 1e-12


def test_project_orthogonal_axis():
    np.testing.assert_allclose(project_orthogonal([1, 0], [3.5, -2.0]), [0, -2.0])


def test_project_orthogonal_parallel():
    u = np.array([0.6, 0.8])
    np.testing.assert_allclose(project_orthogonal(u, 3 * u), [0, 0], atol=1e-12)


def test_project_orthogonal_diagonal():
    u = np.array([1, 1]) / np.sqrt(2)
    np.testing.assert_allclose(project_orthogonal(u, [1, 0]), [0.5, -0.5])


def test_project_orthogonal_requires_unit():
    with pytest.raises(NonUnitInputError):
        project_orthogonal([1, 1], [1, 0])


def test_project_orthogonal_idempotent_self_adjoint():
    rng = RngHandle(21, 0).generator()
    for _ in range(50):
        u = rng.standard_normal(6)
        u /= np.linalg.norm(u)
        a = rng.standard_normal(6)
        b = rng.standard_normal(6)
        pa = project_orthogonal(u, a)
        np.testing.assert_allclose(project_orthogonal(u, pa), pa, atol=1e-12)
        assert np.dot(pa, b) == pytest.approx(np.dot(a, project_orthogonal(u, b)), abs=1e-10)
        assert abs(np.dot(pa, u)) <= 1e-9 * max(np.linalg.norm(a), 1.0)


def test_project_l2_ball_cases():
    np.testing.assert_allclose(project_l2_ball([0.1, 0.1], 1.0), [0.1, 0.1])
    np.testing.assert_allclose(project_l2_ball([3, 4], 1.0), [0.6, 0.8])
    np.testing.assert_allclose(project_l2_ball([0, 0], 1.0), [0, 0])


def test_project_l1_ball_cases():
    np.testing.assert_allclose(project_l1_ball([0.3, 0.2], 1.0), [0.3, 0.2])
    np.testing.assert_allclose(project_l1_ball([3, 0], 1.0), [1, 0])
    np.testing.assert_allclose(project_l1_ball([1, 1], 1.0), [0.5, 0.5])


def test_project_l1_ball_matches_bisection():
    rng = RngHandle(22, 0).generator()
    for _ in range(500):
        n = int(rng.integers(1, 20))
        v = rng.standard_normal(n) * rng.uniform(0.1, 5)
        r = rng.uniform(0.1, 3)
        np.testing.assert_allclose(
            project_l1_ball(v, r), l1_projection_bisection(v, r), atol=1e-8)
        assert np.abs(project_l1_ball(v, r)).sum() <= r + 1e-9


def test_dykstra_feasible_point_unchanged():
    balls = BallSpec(l2_radius=1.0, l1_radius=1.0)
    v = np.array([0.2, 0.1])
    np.testing.assert_allclose(dykstra_intersection(v, balls), v)


def test_dykstra_l2_binds():
    balls = BallSpec(l2_radius=1.0, l1_radius=np.sqrt(2))
    d = dykstra_intersection(np.array([2.0, 0.0]), balls)
    np.testing.assert_allclose(d, [1, 0], atol=1e-7)


def test_dykstra_l1_binds():
    balls = BallSpec(l2_radius=10.0, l1_radius=1.0)
    d = dykstra_intersection(np.array([2.0, 2.0]), balls)
    np.testing.assert_allclose(d, [0.5, 0.5], atol=1e-7)
    np.testing.assert_allclose(d, project_l1_ball(np.array([2.0, 2.0]), 1.0), atol=1e-7)


def _random_feasible(balls, n, rng):
    x = rng.standard_normal(n)
    x = project_l2_ball(x, balls.l2_radius * rng.random())
    return project_l1_ball(x, balls.l1_radius * rng.random() + 1e-12)


def test_dykstra_optimality_against_feasible_points():
    rng = RngHandle(23, 0).generator()
    tol = 1e-8
    for _ in range(20):
        n = int(rng.integers(2, 8))
        balls = BallSpec(l2_radius=rng.uniform(0.5, 2), l1_radius=rng.uniform(0.5, 2))
        v = rng.standard_normal(n) * 2
        d = dykstra_intersection(v, balls, tol=tol)
        assert np.linalg.norm(d) <= balls.l2_radius + 10 * tol
        assert np.abs(d).sum() <= balls.l1_radius + 10 * tol
        for _ in range(50):
            q = _random_feasible(balls, n, rng)
            assert np.linalg.norm(v - d) <= np.linalg.norm(v - q) + 10 * tol


def test_ballspec_validation():
    with pytest.raises(ValueError):
        BallSpec(l2_radius=0.0, l1_radius=1.0)
    assert BallSpec.approx_sparse(4).l1_radius == pytest.approx(2.0)
