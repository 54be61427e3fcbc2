"""Conic trust-region subproblem

    min  phi(s) = g^T s / (1 - a^T s) + s^T B s / (2 (1 - a^T s)^2)
    s.t. ||s|| <= delta,  |1 - a^T s| >= eps0

solved either by the two-stage alternating-direction scheme (a closed-form
search along ``a``, then a dogleg in the null space of ``a``) or by the
conic dogleg used as a baseline.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dogleg import QuadSubproblem, solve_dogleg
from .errors import DegenerateConicStep, PoleAtTauM, ZeroHorizon
from .linalg import (
    NullSpaceBasis,
    apply_Q,
    apply_Qt,
    cholesky,
    nullspace_of,
    project_matrix,
    solve_spd,
)

# |a^T g| below this fraction of ||a|| ||g|| counts as zero
ORTHO_TOL = 1e-14


class Case(enum.Enum):
    P1 = "P1"  # 1 - delta ||a|| >= eps0: whole interval left of the pole
    P2 = "P2"  # |1 - delta ||a||| < eps0: pole gap clips the right end
    P3 = "P3"  # 1 - delta ||a|| <= -eps0: two intervals around the pole


class Hit(enum.Enum):
    ZERO = "Zero"
    PLUS_TAU_DELTA = "PlusTauDelta"
    MINUS_TAU_DELTA = "MinusTauDelta"
    TAU_D = "TauD"
    TAU_U = "TauU"
    TAU_CP = "TauCP"


class Strategy(enum.Enum):
    ADM = "ADM"
    DCTR = "DCTR"
    QUAD_DOGLEG = "QuadDogleg"


@dataclass(frozen=True)
class ConicSubproblem:
    a: np.ndarray
    g: np.ndarray
    B: np.ndarray
    delta: float
    eps0: float = 1e-5

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float))
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float))
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not 0.0 < self.eps0 < 1.0:
            raise ValueError(f"eps0 must lie in (0, 1), got {self.eps0}")

    @property
    def n(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True)
class TauQuantities:
    tau_delta: float
    tau_d: float
    tau_m: float
    tau_u: float
    a_tau: float
    tau_cp: Optional[float]
    cos_ag: float
    aa: float
    ag: float
    aBa: float


@dataclass(frozen=True)
class TauResult:
    tau: float
    case: Case
    hit: Hit
    rho: float


@dataclass(frozen=True)
class SubproblemResult:
    s: np.ndarray
    pred: float
    on_boundary: bool
    strategy: Strategy
    tau: Optional[TauResult] = None
    # horizon the model actually used; zero when the solve fell back to the quadratic model
    a_used: Optional[np.ndarray] = None
    cos_ag: float = 0.0


def gauge_margin(eps0: float) -> float:
    """Gauge actually enforced: ``eps0`` plus a few ulps of headroom.

    Points chosen exactly on ``|1 - a^T s| = eps0`` fail the constraint after
    rounding, so the closed-form stage works with this slightly larger value.
    """
    return eps0 + max(1e-9 * eps0, 64.0 * np.finfo(float).eps)


def tau_quantities(p: ConicSubproblem) -> TauQuantities:
    a, g, B = p.a, p.g, p.B
    aa = float(a @ a)
    if aa == 0.0:
        raise ZeroHorizon("horizon vector is zero")
    norm_a = math.sqrt(aa)
    ag = float(a @ g)
    aBa = float(a @ (B @ a))
    a_tau = aBa - aa * ag
    tau_cp = -ag / a_tau if a_tau != 0.0 else None
    norm_g = float(np.linalg.norm(g))
    cos_ag = abs(ag) / (norm_a * norm_g) if norm_g > 0.0 else 0.0
    return TauQuantities(
        tau_delta=p.delta / norm_a,
        tau_d=(1.0 - p.eps0) / aa,
        tau_m=1.0 / aa,
        tau_u=(1.0 + p.eps0) / aa,
        a_tau=a_tau,
        tau_cp=tau_cp,
        cos_ag=min(cos_ag, 1.0),
        aa=aa,
        ag=ag,
        aBa=aBa,
    )


def _rho(ag, aa, aBa, tau):
    den = 1.0 - tau * aa
    return tau * ag / den + tau * tau * aBa / (2.0 * den * den)


def rho(p: ConicSubproblem, tau):
    """Conic model along ``a``: ``phi(tau * a)``. Accepts scalars or arrays."""
    aa = float(p.a @ p.a)
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(np.abs(1.0 - tau_arr * aa) < 1e-300):
        raise PoleAtTauM("tau sits on the pole 1/||a||^2")
    val = _rho(float(p.a @ p.g), aa, float(p.a @ (p.B @ p.a)), tau_arr)
    return float(val) if np.ndim(val) == 0 else val


def conic_model(g, B, a, s) -> float:
    den = 1.0 - a @ s
    return float(g @ s / den + (s @ (B @ s)) / (2.0 * den * den))


def conic_pred(g, B, a, s) -> float:
    """Predicted reduction ``phi(0) - phi(s)``."""
    return -conic_model(g, B, a, s)


def classify(p: ConicSubproblem, norm_a: float) -> Case:
    gap = gauge_margin(p.eps0)
    t = 1.0 - p.delta * norm_a
    if t >= gap:
        return Case.P1
    if t > -gap:
        return Case.P2
    return Case.P3


def solve_tau_stage(p: ConicSubproblem) -> TauResult:
    """Global minimiser of ``rho`` over the feasible set along ``a``."""
    q = tau_quantities(p)
    norm_a = math.sqrt(q.aa)
    norm_g = float(np.linalg.norm(p.g))
    case = classify(p, norm_a)
    if abs(q.ag) <= ORTHO_TOL * norm_a * norm_g:
        return TauResult(0.0, case, Hit.ZERO, 0.0)

    gap = gauge_margin(p.eps0)
    t_delta = q.tau_delta
    t_d = (1.0 - gap) / q.aa
    t_u = (1.0 + gap) / q.aa
    a_tau, ag, t_cp = q.a_tau, q.ag, q.tau_cp

    def done(tau, hit):
        return TauResult(tau, case, hit, float(_rho(ag, q.aa, q.aBa, tau)))

    if case is Case.P3 and a_tau < 0.0:
        # ag > 0 here and the stationary point lies right of the pole
        if t_cp <= t_u:
            return done(t_u, Hit.TAU_U)
        if t_cp < t_delta:
            return done(t_cp, Hit.TAU_CP)
        r_minus = _rho(ag, q.aa, q.aBa, -t_delta)
        r_plus = _rho(ag, q.aa, q.aBa, t_delta)
        if r_plus < r_minus:
            return done(t_delta, Hit.PLUS_TAU_DELTA)
        return done(-t_delta, Hit.MINUS_TAU_DELTA)

    if a_tau <= 0.0:
        return done(-t_delta, Hit.MINUS_TAU_DELTA)
    if ag > 0.0:
        if t_cp <= -t_delta:
            return done(-t_delta, Hit.MINUS_TAU_DELTA)
        return done(t_cp, Hit.TAU_CP)
    # a_tau > 0, ag < 0: 0 < t_cp < tau_m
    if case is Case.P1:
        hi, hi_hit = t_delta, Hit.PLUS_TAU_DELTA
    else:
        hi, hi_hit = t_d, Hit.TAU_D
    if t_cp < hi:
        return done(t_cp, Hit.TAU_CP)
    return done(hi, hi_hit)


def reduce(p: ConicSubproblem, tau: float, basis: NullSpaceBasis) -> QuadSubproblem:
    """Quadratic subproblem in ``u`` for the step ``tau * a + Q u``."""
    aa = float(p.a @ p.a)
    den = 1.0 - tau * aa
    g_red = apply_Qt(basis, p.g) / den + (tau / (den * den)) * apply_Qt(basis, p.B @ p.a)
    B_red = project_matrix(basis, p.B) / (den * den)
    delta_red = math.sqrt(max(p.delta * p.delta - tau * tau * aa, 0.0))
    return QuadSubproblem(g_red, B_red, delta_red)


def _result(p, s, strategy, tau=None, a_used=None, cos_ag=0.0) -> SubproblemResult:
    a = p.a if a_used is None else a_used
    pred = conic_pred(p.g, p.B, a, s)
    on_boundary = bool(np.linalg.norm(s) >= p.delta * (1.0 - 1e-10))
    return SubproblemResult(s, pred, on_boundary, strategy, tau, a, cos_ag)


def solve_conic_adm(p: ConicSubproblem) -> SubproblemResult:
    """Alternating-direction step: closed form along ``a``, dogleg across it."""
    norm_a = float(np.linalg.norm(p.a))
    norm_g = float(np.linalg.norm(p.g))
    ag = float(p.a @ p.g)
    if norm_a == 0.0 or abs(ag) <= ORTHO_TOL * norm_a * norm_g:
        step = solve_dogleg(p.g, p.B, p.delta)
        return _result(p, step.s, Strategy.QUAD_DOGLEG, a_used=np.zeros_like(p.a))

    cos_ag = min(abs(ag) / (norm_a * norm_g), 1.0)
    tr = solve_tau_stage(p)
    s = tr.tau * p.a
    if tr.hit in (Hit.PLUS_TAU_DELTA, Hit.MINUS_TAU_DELTA) or p.n == 1:
        return _result(p, s, Strategy.ADM, tr, cos_ag=cos_ag)

    basis = nullspace_of(p.a)
    sub = reduce(p, tr.tau, basis)
    if sub.delta <= 1e-14 or not np.any(sub.g):
        return _result(p, s, Strategy.ADM, tr, cos_ag=cos_ag)
    step = solve_dogleg(sub.g, sub.B, sub.delta)
    s = s + apply_Q(basis, step.s)
    return _result(p, s, Strategy.ADM, tr, cos_ag=cos_ag)


def solve_conic_dogleg(p: ConicSubproblem) -> SubproblemResult:
    """Dogleg between the conic Newton and conic Cauchy points.

    The step is pulled back along itself when it lands in the gauge band
    around the pole. Raises DegenerateConicStep when either point is
    undefined or the final step does not decrease the model.
    """
    a, g, B, delta = p.a, p.g, p.B, p.delta
    if not np.any(a):
        step = solve_dogleg(g, B, delta)
        return _result(p, step.s, Strategy.DCTR)

    Binv_g = solve_spd(cholesky(B), g)
    aBg = float(a @ Binv_g)
    den_n = 1.0 - aBg
    if abs(den_n) <= 1e-12 * max(1.0, abs(aBg)):
        raise DegenerateConicStep("conic Newton step has a vanishing denominator")
    s_newton = -Binv_g / den_n
    norm_newton = np.linalg.norm(s_newton)

    if norm_newton <= delta:
        s = s_newton
    else:
        gg = float(g @ g)
        gBg = float(g @ (B @ g))
        ag = float(a @ g)
        den_c = gBg - ag * gg
        if abs(den_c) <= 1e-12 * max(gBg, abs(ag) * gg):
            raise DegenerateConicStep("conic Cauchy step has a vanishing denominator")
        s_cauchy = -(gg / den_c) * g
        if np.linalg.norm(s_cauchy) >= delta:
            s = -(delta / math.sqrt(gg)) * g
        else:
            diff = s_newton - s_cauchy
            d = float(diff @ diff)
            if d <= 1e-30:
                s = s_newton * (delta / norm_newton)
            else:
                e = float(diff @ s_cauchy)
                f = float(s_cauchy @ s_cauchy) - delta * delta
                lam = (-e + math.sqrt(max(e * e - d * f, 0.0))) / d
                s = s_cauchy + lam * diff
                norm_s = np.linalg.norm(s)
                if norm_s > delta:
                    s = s * (delta / norm_s)

    gap = gauge_margin(p.eps0)
    as_ = float(a @ s)
    if abs(1.0 - as_) < gap:
        # as_ is within gap of 1, hence positive
        s = s * ((1.0 - gap) / as_)
    res = _result(p, s, Strategy.DCTR)
    if not (np.isfinite(res.pred) and res.pred > 0.0):
        raise DegenerateConicStep(f"conic dogleg step has pred = {res.pred}")
    return res
