"""Test problems with analytic gradients.

Least-squares problems use ``f = sum F_i(x)^2`` without a factor 1/2.

======================  =====================================================
name                    definition
======================  =====================================================
Cube                    F_1 = x_1 - 1, F_i = 10 (x_i - x_{i-1}^3);
                        x0 = (-1.2, 1, -1.2, 1, ...)
Penalty-I               1e-5 sum (x_i - 1)^2 + (sum x_i^2 - 1/4)^2; x0_i = i
Beale                   per pair: (1.5 - x1(1 - x2))^2 + (2.25 - x1(1 - x2^2))^2
                        + (2.625 - x1(1 - x2^3))^2; x0 = (1, 1, ...); n even
Conic                   d = x - 1, D = diag(1 + (i-1)/(n-1)), c = 1/(2n) (1..1):
                        f = d^T D d / (2 (1 - c^T d)^2); x0 = 0
Extended Powell         per block of 4: (x1 + 10 x2)^2 + 5 (x3 - x4)^2
                        + (x2 - 2 x3)^4 + 10 (x1 - x4)^4; x0 = (3, -1, 0, 1, ...)
Variably Dimensioned    sum (x_i - 1)^2 + S^2 + S^4 with S = sum i (x_i - 1);
                        x0_i = 1 - i/n
Rosenbrock              per pair: 100 (x2 - x1^2)^2 + (1 - x1)^2;
                        x0 = (-1.2, 1, ...); n even
Extended Trigonometric  F_i = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i;
                        x0_i = 1/n
Tridiagonal Exponential F_i = x_i - exp(cos(h (x_{i-1} + x_i + x_{i+1}))),
                        h = 1/(n+1), x_0 = x_{n+1} = 0; x0_i = 1.5
Brent                   F_i = 3 x_i (x_{i+1} - 2 x_i + x_{i-1})
                        + (x_{i+1} - x_{i-1})^2 / 4, x_0 = 0, x_{n+1} = 20;
                        x0_i = 10
Troesch                 F_i = 2 x_i - x_{i-1} - x_{i+1} + rho h^2 sinh(rho x_i),
                        rho = 10, h = 1/(n+1), x_0 = 0, x_{n+1} = 1; x0_i = 1
Cragg and Levy          per block of 4: (e^{x1} - x2)^4 + 100 (x2 - x3)^6
                        + tan^4(x3 - x4) + x1^8 + (x4 - 1)^2; x0 = (1, 2, 2, 2, ...)
Broyden Tridiagonal     F_i = (3 - 2 x_i) x_i - x_{i-1} - 2 x_{i+1} + 1,
                        x_0 = x_{n+1} = 0; x0_i = -1
Brown                   sum_{i<n} (x_i^2)^(x_{i+1}^2 + 1) + (x_{i+1}^2)^(x_i^2 + 1);
                        x0 = (-1, 1, -1, 1, ...)
Discrete Boundary Value F_i = 2 x_i - x_{i-1} - x_{i+1} + h^2 (x_i + t_i + 1)^3 / 2,
                        t_i = i h, x_0 = x_{n+1} = 0; x0_i = t_i (t_i - 1)
======================  =====================================================

Extended Trigonometric is listed twice in the experiment tables (problems 8
and 16); both numbers resolve to the same definition.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BadDimension, UnknownProblem


@dataclass(frozen=True)
class TestProblem:
    __test__ = False  # not a pytest class

    name: str
    n: int
    objective: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    x0: np.ndarray
    f_opt: Optional[float] = None


def _tridiag_jtf(F, lower, diag, upper):
    """``J^T F`` for a tridiagonal Jacobian.

    ``lower[i] = dF_i/dx_{i-1}``, ``diag[i] = dF_i/dx_i``, ``upper[i] = dF_i/dx_{i+1}``.
    """
    out = diag * F
    out[1:] += upper[:-1] * F[:-1]
    out[:-1] += lower[1:] * F[1:]
    return out


def _padded(x, left, right):
    return np.concatenate(([left], x, [right]))


def _lsq(residual_and_jtf):
    def objective(x):
        F, _ = residual_and_jtf(np.asarray(x, dtype=float), jtf=False)
        return float(F @ F)

    def gradient(x):
        _, jtf = residual_and_jtf(np.asarray(x, dtype=float), jtf=True)
        return 2.0 * jtf

    return objective, gradient


# ---------------------------------------------------------------- cube

def _cube_res(x, jtf):
    F = np.empty_like(x)
    F[0] = x[0] - 1.0
    F[1:] = 10.0 * (x[1:] - x[:-1] ** 3)
    if not jtf:
        return F, None
    diag = np.full_like(x, 10.0)
    diag[0] = 1.0
    lower = np.zeros_like(x)
    lower[1:] = -30.0 * x[:-1] ** 2
    return F, _tridiag_jtf(F, lower, diag, np.zeros_like(x))


def cube(n):
    obj, grad = _lsq(_cube_res)
    return obj, grad, np.tile([-1.2, 1.0], n)[:n]


# ---------------------------------------------------------------- penalty I

def penalty1(n):
    alpha = 1e-5

    def obj(x):
        t = x @ x - 0.25
        return float(alpha * np.sum((x - 1.0) ** 2) + t * t)

    def grad(x):
        t = x @ x - 0.25
        return 2.0 * alpha * (x - 1.0) + 4.0 * t * x

    return obj, grad, np.arange(1.0, n + 1.0)


# ---------------------------------------------------------------- beale

_BEALE_Y = np.array([1.5, 2.25, 2.625])


def beale(n):
    def parts(x):
        x1, x2 = x[0::2], x[1::2]
        k = np.arange(1, 4)[:, None]
        F = _BEALE_Y[:, None] - x1 * (1.0 - x2**k)
        return x1, x2, k, F

    def obj(x):
        *_, F = parts(x)
        return float(np.sum(F * F))

    def grad(x):
        x1, x2, k, F = parts(x)
        g = np.empty_like(x)
        g[0::2] = 2.0 * np.sum(F * -(1.0 - x2**k), axis=0)
        g[1::2] = 2.0 * np.sum(F * x1 * k * x2 ** (k - 1), axis=0)
        return g

    return obj, grad, np.ones(n)


# ---------------------------------------------------------------- conic

def conic(n):
    D = 1.0 + np.arange(n) / max(n - 1, 1)
    c = np.full(n, 1.0 / (2.0 * n))

    def obj(x):
        d = x - 1.0
        den = 1.0 - c @ d
        return float((d @ (D * d)) / (2.0 * den * den))

    def grad(x):
        d = x - 1.0
        den = 1.0 - c @ d
        q = d @ (D * d)
        return (D * d) / den**2 + (q / den**3) * c

    return obj, grad, np.zeros(n)


# ---------------------------------------------------------------- extended powell

def powell(n):
    def obj(x):
        x1, x2, x3, x4 = x[0::4], x[1::4], x[2::4], x[3::4]
        return float(np.sum((x1 + 10 * x2) ** 2 + 5 * (x3 - x4) ** 2
                            + (x2 - 2 * x3) ** 4 + 10 * (x1 - x4) ** 4))

    def grad(x):
        x1, x2, x3, x4 = x[0::4], x[1::4], x[2::4], x[3::4]
        t1 = x1 + 10 * x2
        t2 = x3 - x4
        t3 = (x2 - 2 * x3) ** 3
        t4 = (x1 - x4) ** 3
        g = np.empty_like(x)
        g[0::4] = 2 * t1 + 40 * t4
        g[1::4] = 20 * t1 + 4 * t3
        g[2::4] = 10 * t2 - 8 * t3
        g[3::4] = -10 * t2 - 40 * t4
        return g

    return obj, grad, np.tile([3.0, -1.0, 0.0, 1.0], n // 4)


# ---------------------------------------------------------------- variably dimensioned

def variably_dimensioned(n):
    w = np.arange(1.0, n + 1.0)

    def obj(x):
        d = x - 1.0
        S = w @ d
        return float(d @ d + S**2 + S**4)

    def grad(x):
        d = x - 1.0
        S = w @ d
        return 2.0 * d + (2.0 * S + 4.0 * S**3) * w

    return obj, grad, 1.0 - w / n


# ---------------------------------------------------------------- rosenbrock

def rosenbrock(n):
    def obj(x):
        x1, x2 = x[0::2], x[1::2]
        return float(np.sum(100.0 * (x2 - x1**2) ** 2 + (1.0 - x1) ** 2))

    def grad(x):
        x1, x2 = x[0::2], x[1::2]
        t = x2 - x1**2
        g = np.empty_like(x)
        g[0::2] = -400.0 * t * x1 - 2.0 * (1.0 - x1)
        g[1::2] = 200.0 * t
        return g

    return obj, grad, np.tile([-1.2, 1.0], n // 2)


# ---------------------------------------------------------------- trigonometric

def trigonometric(n):
    i = np.arange(1.0, n + 1.0)

    def residual(x):
        return n - np.sum(np.cos(x)) + i * (1.0 - np.cos(x)) - np.sin(x)

    def obj(x):
        F = residual(x)
        return float(F @ F)

    def grad(x):
        F = residual(x)
        return 2.0 * (np.sin(x) * np.sum(F) + F * (i * np.sin(x) - np.cos(x)))

    return obj, grad, np.full(n, 1.0 / n)


# ---------------------------------------------------------------- tridiagonal exponential

def tridiagonal_exponential(n):
    h = 1.0 / (n + 1)

    def res(x, jtf):
        xp = _padded(x, 0.0, 0.0)
        arg = h * (xp[:-2] + xp[1:-1] + xp[2:])
        e = np.exp(np.cos(arg))
        F = x - e
        if not jtf:
            return F, None
        band = e * np.sin(arg) * h
        return F, _tridiag_jtf(F, band, 1.0 + band, band)

    obj, grad = _lsq(res)
    return obj, grad, np.full(n, 1.5)


# ---------------------------------------------------------------- brent

def brent(n):
    def res(x, jtf):
        xp = _padded(x, 0.0, 20.0)
        lo, hi = xp[:-2], xp[2:]
        F = 3.0 * x * (hi - 2.0 * x + lo) + (hi - lo) ** 2 / 4.0
        if not jtf:
            return F, None
        diag = 3.0 * (hi - 2.0 * x + lo) - 6.0 * x
        lower = 3.0 * x - (hi - lo) / 2.0
        upper = 3.0 * x + (hi - lo) / 2.0
        return F, _tridiag_jtf(F, lower, diag, upper)

    obj, grad = _lsq(res)
    return obj, grad, np.full(n, 10.0)


# ---------------------------------------------------------------- troesch

TROESCH_RHO = 10.0


def troesch(n):
    h = 1.0 / (n + 1)
    r = TROESCH_RHO

    def res(x, jtf):
        xp = _padded(x, 0.0, 1.0)
        F = 2.0 * x - xp[:-2] - xp[2:] + r * h * h * np.sinh(r * x)
        if not jtf:
            return F, None
        diag = 2.0 + r * r * h * h * np.cosh(r * x)
        off = np.full_like(x, -1.0)
        return F, _tridiag_jtf(F, off, diag, off)

    obj, grad = _lsq(res)
    return obj, grad, np.ones(n)


# ---------------------------------------------------------------- cragg and levy

def cragg_levy(n):
    def obj(x):
        x1, x2, x3, x4 = x[0::4], x[1::4], x[2::4], x[3::4]
        return float(np.sum((np.exp(x1) - x2) ** 4 + 100.0 * (x2 - x3) ** 6
                            + np.tan(x3 - x4) ** 4 + x1**8 + (x4 - 1.0) ** 2))

    def grad(x):
        x1, x2, x3, x4 = x[0::4], x[1::4], x[2::4], x[3::4]
        e = np.exp(x1)
        t1 = 4.0 * (e - x2) ** 3
        t2 = 600.0 * (x2 - x3) ** 5
        tn = np.tan(x3 - x4)
        t3 = 4.0 * tn**3 * (1.0 + tn * tn)
        g = np.empty_like(x)
        g[0::4] = t1 * e + 8.0 * x1**7
        g[1::4] = -t1 + t2
        g[2::4] = -t2 + t3
        g[3::4] = -t3 + 2.0 * (x4 - 1.0)
        return g

    return obj, grad, np.tile([1.0, 2.0, 2.0, 2.0], n // 4)


# ---------------------------------------------------------------- broyden tridiagonal

def broyden_tridiagonal(n):
    def res(x, jtf):
        xp = _padded(x, 0.0, 0.0)
        F = (3.0 - 2.0 * x) * x - xp[:-2] - 2.0 * xp[2:] + 1.0
        if not jtf:
            return F, None
        return F, _tridiag_jtf(F, np.full_like(x, -1.0), 3.0 - 4.0 * x, np.full_like(x, -2.0))

    obj, grad = _lsq(res)
    return obj, grad, np.full(n, -1.0)


# ---------------------------------------------------------------- brown

def _pow_terms(u, v):
    """``(u^2)^(v^2 + 1)`` and its partial derivatives in ``u`` and ``v``."""
    u2 = u * u
    p = v * v + 1.0
    val = u2**p
    du = 2.0 * p * u * u2 ** (p - 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        dv = np.where(u2 > 0.0, val * np.log(u2) * 2.0 * v, 0.0)
    return val, du, dv


def brown(n):
    def obj(x):
        a, _, _ = _pow_terms(x[:-1], x[1:])
        b, _, _ = _pow_terms(x[1:], x[:-1])
        return float(np.sum(a + b))

    def grad(x):
        _, a_du, a_dv = _pow_terms(x[:-1], x[1:])
        _, b_du, b_dv = _pow_terms(x[1:], x[:-1])
        g = np.zeros_like(x)
        g[:-1] += a_du + b_dv
        g[1:] += a_dv + b_du
        return g

    return obj, grad, np.tile([-1.0, 1.0], (n + 1) // 2)[:n]


# ---------------------------------------------------------------- discrete boundary value

def discrete_boundary_value(n):
    h = 1.0 / (n + 1)
    t = h * np.arange(1.0, n + 1.0)

    def res(x, jtf):
        xp = _padded(x, 0.0, 0.0)
        F = 2.0 * x - xp[:-2] - xp[2:] + h * h * (x + t + 1.0) ** 3 / 2.0
        if not jtf:
            return F, None
        diag = 2.0 + 1.5 * h * h * (x + t + 1.0) ** 2
        off = np.full_like(x, -1.0)
        return F, _tridiag_jtf(F, off, diag, off)

    obj, grad = _lsq(res)
    return obj, grad, t * (t - 1.0)


# ---------------------------------------------------------------- catalogue

def _any(n):
    return n >= 1


def _at_least_2(n):
    return n >= 2


def _even(n):
    return n >= 2 and n % 2 == 0


def _by_4(n):
    return n >= 4 and n % 4 == 0


# name -> (builder, admissible dimension, description of the rule, known optimum)
_CATALOGUE = {
    "Cube": (cube, _at_least_2, "n >= 2", 0.0),
    "Penalty-I": (penalty1, _any, "n >= 1", None),
    "Beale": (beale, _even, "n even", 0.0),
    "Conic": (conic, _any, "n >= 1", 0.0),
    "Extended Powell": (powell, _by_4, "n divisible by 4", 0.0),
    "Variably Dimensioned": (variably_dimensioned, _any, "n >= 1", 0.0),
    "Rosenbrock": (rosenbrock, _even, "n even", 0.0),
    "Extended Trigonometric": (trigonometric, _any, "n >= 1", None),
    "Tridiagonal Exponential": (tridiagonal_exponential, _any, "n >= 1", 0.0),
    "Brent": (brent, _any, "n >= 1", None),
    "Troesch": (troesch, _any, "n >= 1", 0.0),
    "Cragg and Levy": (cragg_levy, _by_4, "n divisible by 4", 0.0),
    "Broyden Tridiagonal": (broyden_tridiagonal, _any, "n >= 1", 0.0),
    "Brown": (brown, _at_least_2, "n >= 2", 0.0),
    "Discrete Boundary Value": (discrete_boundary_value, _any, "n >= 1", 0.0),
}

# problem numbers as used in the result tables
NUMBERED = {
    1: "Cube",
    2: "Penalty-I",
    3: "Beale",
    4: "Conic",
    5: "Extended Powell",
    6: "Variably Dimensioned",
    7: "Rosenbrock",
    8: "Extended Trigonometric",
    9: "Tridiagonal Exponential",
    10: "Brent",
    11: "Troesch",
    12: "Cragg and Levy",
    13: "Broyden Tridiagonal",
    14: "Brown",
    15: "Discrete Boundary Value",
    16: "Extended Trigonometric",
}

# (number, n, reference iteration count) for the small-dimension table
TABLE2 = [
    (1, 2, 52), (2, 2, 10), (3, 2, 18), (4, 2, 16),
    (5, 4, 41), (6, 4, 32), (7, 2, 50), (8, 4, 47),
    (9, 4, 7), (10, 4, 81), (11, 4, 59), (12, 4, 48),
    (13, 4, 35), (14, 2, 91), (15, 4, 23), (16, 4, 14),
]

# (number, n, reference iteration count) for the scaled-up comparison table
TABLE3 = [
    (1, 20, 100), (1, 200, 82), (1, 1000, 74),
    (2, 200, 79), (2, 500, 78), (2, 1000, 86),
    (3, 2, 18), (3, 20, 24), (3, 200, 26), (3, 2000, 35),
    (4, 20, 16), (4, 200, 19), (4, 2000, 19),
    (5, 40, 48), (5, 1000, 92), (5, 2000, 69),
    (6, 40, 145), (6, 400, 1124),
    (7, 20, 83), (7, 200, 61), (7, 2000, 71),
    (8, 4, 47), (8, 40, 354),
    (9, 40, 6), (9, 400, 6), (9, 4000, 11),
    (10, 4, 81), (10, 40, 1260),
    (11, 4, 59), (11, 40, 132), (11, 500, 1119),
    (12, 4, 48), (12, 40, 190), (12, 400, 351),
    (13, 4, 35), (13, 40, 47), (13, 400, 55), (13, 1000, 52),
    (14, 2, 91), (14, 20, 125), (14, 200, 209),
    (15, 4, 23), (15, 400, 35), (15, 1000, 21), (15, 4000, 25),
    (16, 4, 14), (16, 40, 63), (16, 400, 60),
]


def _normalise(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


_LOOKUP = {_normalise(k): k for k in _CATALOGUE}
_LOOKUP.update({"penalty1": "Penalty-I", "penalty": "Penalty-I",
                "extendedrosenbrock": "Rosenbrock", "powell": "Extended Powell",
                "trigonometric": "Extended Trigonometric", "craggandlevy": "Cragg and Levy",
                "cragglevy": "Cragg and Levy", "chainedbrown": "Brown"})


def problem_names() -> list[str]:
    return list(_CATALOGUE)


def canonical_name(name) -> str:
    if isinstance(name, int) or (isinstance(name, str) and name.isdigit()):
        number = int(name)
        if number not in NUMBERED:
            raise UnknownProblem(f"no problem number {number}")
        return NUMBERED[number]
    key = _normalise(name)
    if key not in _LOOKUP:
        raise UnknownProblem(f"unknown problem {name!r}")
    return _LOOKUP[key]


def get_problem(name, n: int) -> TestProblem:
    canon = canonical_name(name)
    builder, admissible, rule, f_opt = _CATALOGUE[canon]
    if not admissible(n):
        raise BadDimension(f"{canon} needs {rule}, got n = {n}")
    obj, grad, x0 = builder(n)
    return TestProblem(canon, n, obj, grad, np.asarray(x0, dtype=float), f_opt)


def fd_gradient(objective, x, h=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    step = np.finfo(float).eps ** (1.0 / 3.0) * (1.0 + np.abs(x)) if h is None else np.full_like(x, h)
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = step[i]
        out[i] = (objective(x + e) - objective(x - e)) / (2.0 * step[i])
    return out


def fd_check(p: TestProblem, x=None) -> float:
    """Largest component error between analytic and central-difference gradients.

    Errors are relative to ``max(1, ||g||_inf)``. A per-component scale would
    let central-difference round-off in large objectives swamp tiny
    components, while this one still compares near-zero gradients absolutely.
    """
    x = p.x0 if x is None else np.asarray(x, dtype=float)
    g = np.asarray(p.gradient(x), dtype=float)
    g_fd = fd_gradient(p.objective, x)
    scale = max(1.0, float(np.max(np.abs(g))))
    return float(np.max(np.abs(g - g_fd)) / scale)


def sample_points(p: TestProblem, count: int, rng: np.random.Generator, radius: float = 0.5) -> list:
    """Random points in the box of half-width ``radius`` around ``x0``."""
    return [p.x0 + rng.uniform(-radius, radius, p.n) for _ in range(count)]
