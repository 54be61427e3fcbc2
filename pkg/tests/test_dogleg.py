import numpy as np
import pytest

from adctr.dogleg import Branch, QuadSubproblem, quad_model, solve_dogleg, solve_quad
from adctr.errors import NotPositiveDefinite
from adctr.linalg import spectral_norm


def random_spd(rng, n):
    M = rng.uniform(-1.0, 1.0, (n, n))
    return M.T @ M + np.eye(n)


def test_identity_inside_ball_is_newton():
    g = np.array([0.3, -0.4])
    step = solve_dogleg(g, np.eye(2), 1.0)
    np.testing.assert_allclose(step.s, -g)
    assert step.branch is Branch.NEWTON
    assert not step.on_boundary
    assert step.pred == pytest.approx(0.5 * g @ g)


def test_scaled_cauchy():
    step = solve_dogleg(np.array([1.0, 0.0]), np.eye(2), 0.5)
    np.testing.assert_allclose(step.s, [-0.5, 0.0])
    assert step.branch is Branch.SCALED_CAUCHY
    assert step.on_boundary


def test_interpolated_hand_case():
    # B = diag(1, 10), g = (1, 1): Newton (-1, -0.1), Cauchy -(2/11) g
    g = np.array([1.0, 1.0])
    B = np.diag([1.0, 10.0])
    step = solve_dogleg(g, B, 0.5)
    assert step.branch is Branch.INTERPOLATED
    assert np.linalg.norm(step.s) == pytest.approx(0.5, rel=1e-12)
    s_c = -(2.0 / 11.0) * g
    s_n = np.array([-1.0, -0.1])
    # the step lies on the segment from the Cauchy to the Newton point
    lam = (step.s - s_c)[0] / (s_n - s_c)[0]
    np.testing.assert_allclose(step.s, s_c + lam * (s_n - s_c), atol=1e-14)
    assert 0.0 < lam < 1.0


def test_solve_quad_wrapper():
    p = QuadSubproblem(np.array([1.0, 2.0]), np.eye(2), 10.0)
    np.testing.assert_allclose(solve_quad(p).s, [-1.0, -2.0])


def test_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        solve_dogleg(np.ones(2), np.diag([1.0, -1.0]), 1.0)


def test_rejects_bad_radius():
    with pytest.raises(ValueError):
        solve_dogleg(np.ones(2), np.eye(2), 0.0)


def test_coincident_points_clip_newton():
    # B = 2I makes the Newton and Cauchy points equal
    g = np.array([2.0, 0.0])
    step = solve_dogleg(g, 2.0 * np.eye(2), 0.25)
    np.testing.assert_allclose(step.s, [-0.25, 0.0])
    assert step.on_boundary


def _random_cases(seed=11, count=500):
    rng = np.random.default_rng(seed)
    return [(random_spd(rng, n), rng.uniform(-1, 1, n), float(rng.exponential(1.0)) + 1e-3)
            for n in rng.integers(2, 11, size=count)]


class TestRandom:
    cases = _random_cases()

    def test_cauchy_decrease(self):
        for B, g, delta in self.cases:
            step = solve_dogleg(g, B, delta)
            gnorm = np.linalg.norm(g)
            assert step.pred >= 0.5 * gnorm * min(delta, gnorm / spectral_norm(B)) * (1 - 1e-12)
            assert np.linalg.norm(step.s) <= delta * (1.0 + 1e-12)
            assert step.on_boundary == (np.linalg.norm(step.s) >= delta * (1.0 - 1e-10))
            assert step.pred > 0.0

    def test_branch_properties(self):
        for B, g, delta in self.cases:
            step = solve_dogleg(g, B, delta)
            s_c = -(g @ g) / (g @ B @ g) * g
            if step.branch is Branch.NEWTON:
                assert np.linalg.norm(B @ step.s + g) <= 1e-8 * np.linalg.norm(g)
            elif step.branch is Branch.INTERPOLATED:
                assert np.linalg.norm(step.s) == pytest.approx(delta, rel=1e-10)
                assert quad_model(g, B, step.s) <= quad_model(g, B, s_c) + 1e-14
