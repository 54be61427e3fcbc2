import numpy as np
import pytest

from adctr.errors import BadDimension, UnknownProblem
from adctr.problems import (
    NUMBERED,
    TABLE2,
    TABLE3,
    canonical_name,
    fd_check,
    get_problem,
    problem_names,
    sample_points,
)


def test_catalogue_size():
    assert len(problem_names()) == 15
    assert len(NUMBERED) == 16
    assert NUMBERED[8] == NUMBERED[16] == "Extended Trigonometric"
    assert {NUMBERED[no] for no, _, _ in TABLE2} == set(problem_names())


@pytest.mark.parametrize("name,x_star", [
    ("Rosenbrock", [1.0, 1.0]),
    ("Beale", [3.0, 0.5]),
    ("Cube", [1.0, 1.0, 1.0]),
    ("Conic", [1.0, 1.0, 1.0]),
    ("Variably Dimensioned", [1.0, 1.0, 1.0, 1.0]),
    ("Extended Powell", [0.0, 0.0, 0.0, 0.0]),
    ("Cragg and Levy", [0.0, 1.0, 1.0, 1.0]),
    ("Brown", [0.0, 0.0, 0.0]),
])
def test_known_minimisers(name, x_star):
    x = np.array(x_star)
    p = get_problem(name, x.size)
    assert p.objective(x) == pytest.approx(0.0, abs=1e-28)
    assert np.linalg.norm(p.gradient(x)) <= 1e-12


def test_standard_starting_points():
    np.testing.assert_array_equal(get_problem("Rosenbrock", 4).x0, [-1.2, 1.0, -1.2, 1.0])
    np.testing.assert_array_equal(get_problem("Extended Powell", 8).x0, [3, -1, 0, 1, 3, -1, 0, 1])
    np.testing.assert_array_equal(get_problem("Brown", 3).x0, [-1.0, 1.0, -1.0])


def test_bad_dimension():
    with pytest.raises(BadDimension):
        get_problem("Extended Powell", 6)
    with pytest.raises(BadDimension):
        get_problem("Rosenbrock", 3)


def test_unknown():
    with pytest.raises(UnknownProblem):
        get_problem("Himmelblau", 2)
    with pytest.raises(UnknownProblem):
        canonical_name(17)


def test_lookup_aliases():
    assert canonical_name("extended rosenbrock") == "Rosenbrock"
    assert canonical_name("penalty 1") == "Penalty-I"
    assert canonical_name("13") == "Broyden Tridiagonal"
    assert canonical_name(16) == "Extended Trigonometric"


def _dims():
    small = {(NUMBERED[no], n) for no, n, _ in TABLE2}
    mid = {(NUMBERED[no], n) for no, n, _ in TABLE3 if n <= 400}
    return sorted(small | mid)


@pytest.mark.parametrize("name,n", _dims())
def test_gradients_match_finite_differences(name, n):
    p = get_problem(name, n)
    rng = np.random.default_rng(abs(hash((name, n))) % 2**32)
    assert fd_check(p) <= 1e-6
    for x in sample_points(p, 10, rng):
        f = p.objective(x)
        assert np.isfinite(f) and f >= 0.0
        assert fd_check(p, x) <= 1e-6


def _corrupt(p, k):
    def bad(x):
        g = np.array(p.gradient(x), dtype=float)
        g[k] += 1.0
        return g

    return type(p)(p.name, p.n, p.objective, bad, p.x0)


def test_corrupted_gradient_at_minimiser():
    p = get_problem("Rosenbrock", 2)
    assert fd_check(_corrupt(p, 0), [1.0, 1.0]) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("name,n", sorted({(NUMBERED[no], n) for no, n, _ in TABLE2}))
def test_corrupted_gradient_fails_check(name, n):
    p = get_problem(name, n)
    g = p.gradient(p.x0)
    err = fd_check(_corrupt(p, int(np.argmin(np.abs(g)))))
    if np.max(np.abs(g)) > 1e6:
        # Troesch at x0 has ||g|| near 4e8, so a unit error sits below difference noise
        assert fd_check(_corrupt(p, 0), np.full(n, 0.5)) > 1e-6
        return
    assert err > 1e-6
    # the error is 1 / max(1, ||g||_inf) up to difference noise
    assert err == pytest.approx(1.0 / max(1.0, np.max(np.abs(g))), rel=1e-3)


def test_fd_check_deterministic():
    p = get_problem("Troesch", 4)
    assert fd_check(p) == fd_check(p)
