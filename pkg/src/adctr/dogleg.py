"""Single dogleg step for the quadratic trust-region subproblem

    min  g^T s + 1/2 s^T B s   s.t.  ||s|| <= delta

with ``B`` positive definite.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import cholesky, solve_spd


class Branch(enum.Enum):
    NEWTON = "Newton"
    SCALED_CAUCHY = "ScaledCauchy"
    INTERPOLATED = "Interpolated"


class QuadSubproblem(NamedTuple):
    g: np.ndarray
    B: np.ndarray
    delta: float


@dataclass(frozen=True)
class DoglegStep:
    s: np.ndarray
    pred: float
    on_boundary: bool
    branch: Branch


def quad_model(g, B, s) -> float:
    return float(g @ s + 0.5 * (s @ (B @ s)))


def _finish(g, B, delta, s, branch) -> DoglegStep:
    pred = -quad_model(g, B, s)
    on_boundary = bool(np.linalg.norm(s) >= delta * (1.0 - 1e-10))
    return DoglegStep(s=s, pred=pred, on_boundary=on_boundary, branch=branch)


def solve_dogleg(g, B, delta: float) -> DoglegStep:
    """Return the dogleg step.

    Raises NotPositiveDefinite if ``B`` has no Cholesky factor.
    """
    g = np.asarray(g, dtype=float)
    B = np.asarray(B, dtype=float)
    if not delta > 0.0:
        raise ValueError(f"trust radius must be positive, got {delta}")

    s_newton = -solve_spd(cholesky(B), g)
    norm_newton = np.linalg.norm(s_newton)
    if norm_newton <= delta:
        return _finish(g, B, delta, s_newton, Branch.NEWTON)

    gg = g @ g
    gBg = g @ (B @ g)
    s_cauchy = -(gg / gBg) * g
    if np.linalg.norm(s_cauchy) >= delta:
        s = -(delta / math.sqrt(gg)) * g
        return _finish(g, B, delta, s, Branch.SCALED_CAUCHY)

    diff = s_newton - s_cauchy
    d = diff @ diff
    if d <= 1e-30:
        # Newton and Cauchy points coincide; clip to the ball
        s = s_newton * (delta / norm_newton)
        return _finish(g, B, delta, s, Branch.NEWTON)
    e = diff @ s_cauchy
    f = s_cauchy @ s_cauchy - delta * delta
    disc = max(e * e - d * f, 0.0)
    lam = (-e + math.sqrt(disc)) / d
    s = s_cauchy + lam * diff
    # the root satisfies ||s|| = delta only up to rounding
    norm_s = np.linalg.norm(s)
    if norm_s > delta:
        s *= delta / norm_s
    return _finish(g, B, delta, s, Branch.INTERPOLATED)


def solve_quad(p: QuadSubproblem) -> DoglegStep:
    return solve_dogleg(p.g, p.B, p.delta)
