"""Conic trust-region outer loop with ratio test and radius control."""
from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .conic import (
    ConicSubproblem,
    Hit,
    Strategy,
    SubproblemResult,
    solve_conic_adm,
    solve_conic_dogleg,
)
from .errors import DegenerateConicStep, NotPositiveDefinite
from .linalg import spectral_norm
from .update import StepRecord, update_hessian, update_horizon

logger = logging.getLogger(__name__)


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    STALLED = "Stalled"
    SUBPROBLEM_FAILURE = "SubproblemFailure"


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-5
    eps0: float = 1e-5
    eta1: float = 0.01
    eta2: float = 0.75
    delta1: float = 0.5
    delta2: float = 2.0
    delta0: float = 1.0
    delta_max: float = 10.0
    max_iter: int = 5000
    delta_min: float = 1e-30
    max_rejections: int = 60
    max_degenerate: int = 5
    check_bounds: bool = False
    strategy: Strategy = Strategy.ADM

    def __post_init__(self):
        if isinstance(self.strategy, str):
            object.__setattr__(self, "strategy", Strategy(self.strategy.upper()))
        if self.strategy not in (Strategy.ADM, Strategy.DCTR):
            raise ValueError(f"strategy must be ADM or DCTR, got {self.strategy}")
        if not 0.0 < self.eta1 < self.eta2 < 1.0:
            raise ValueError("need 0 < eta1 < eta2 < 1")
        if not 0.0 < self.delta1 < 1.0 < self.delta2:
            raise ValueError("need 0 < delta1 < 1 < delta2")
        if not 0.0 < self.delta0 <= self.delta_max:
            raise ValueError("need 0 < delta0 <= delta_max")
        if not 0.0 < self.eps0 < 1.0:
            raise ValueError("need 0 < eps0 < 1")
        if not (self.delta_min > 0.0 and self.tol > 0.0 and self.max_iter >= 0):
            raise ValueError("delta_min and tol must be positive, max_iter non-negative")


@dataclass
class ConicState:
    x: np.ndarray
    f: float
    g: np.ndarray
    a: np.ndarray
    B: np.ndarray
    delta: float


@dataclass(frozen=True)
class Trial:
    """One subproblem solve and its outcome."""

    delta: float
    pred: float
    ared: float
    ratio: float
    accepted: bool
    strategy: str
    hit: Optional[str]
    step_norm: float
    gauge: float  # |1 - a^T s| for the horizon the model used
    eps0: float
    gnorm: float
    cos_ag: float
    a_norm: float
    B_norm: float = float("nan")  # filled only with check_bounds
    evaluated: bool = True


@dataclass
class RunReport:
    status: Status
    iters: int
    nf: int
    ng: int
    accepted: int
    f_final: float
    gnorm_final: float
    x_final: np.ndarray
    trace: list = field(default_factory=list)
    wall_time: float = 0.0


def _solve_sub(state: ConicState, cfg: SolverConfig) -> SubproblemResult:
    p = ConicSubproblem(state.a, state.g, state.B, state.delta, cfg.eps0)
    if cfg.strategy is Strategy.DCTR:
        return solve_conic_dogleg(p)
    return solve_conic_adm(p)


def minimize(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    x0,
    config: Optional[SolverConfig] = None,
) -> RunReport:
    """Minimise ``objective`` from ``x0`` with the conic trust-region method.

    ``iters`` counts evaluated trial steps. The objective is evaluated once at
    ``x0`` and once per trial, the gradient once at ``x0`` and once per
    accepted point, so ``nf == iters + 1`` and ``ng == accepted + 1``.
    """
    cfg = config or SolverConfig()
    t_start = time.perf_counter()
    x = np.array(x0, dtype=float)
    n = x.shape[0]
    f = float(objective(x))
    g = np.asarray(gradient(x), dtype=float)
    if not (np.isfinite(f) and np.all(np.isfinite(g))):
        raise ValueError("objective or gradient is not finite at the starting point")
    state = ConicState(x, f, g, np.zeros(n), np.eye(n), cfg.delta0)
    nf = ng = 1
    iters = accepted = 0
    rejections = degenerate = 0
    trace: list[Trial] = []
    gnorm = float(np.linalg.norm(g))
    status = None

    while True:
        if gnorm <= cfg.tol:
            status = Status.CONVERGED
            break
        if iters >= cfg.max_iter:
            status = Status.MAX_ITER
            break
        if state.delta < cfg.delta_min or rejections >= cfg.max_rejections:
            status = Status.STALLED
            break

        try:
            res = _solve_sub(state, cfg)
            ok = np.isfinite(res.pred) and res.pred > 0.0
        except (DegenerateConicStep, NotPositiveDefinite) as exc:
            logger.debug("degenerate subproblem at delta=%g: %s", state.delta, exc)
            res, ok = None, False
        if not ok:
            degenerate += 1
            trace.append(_unevaluated(state, cfg, res, gnorm))
            if degenerate >= cfg.max_degenerate:
                status = Status.SUBPROBLEM_FAILURE
                break
            state.delta *= cfg.delta1
            rejections += 1
            continue
        degenerate = 0

        s = res.s
        x_trial = state.x + s
        f_trial = float(objective(x_trial))
        nf += 1
        iters += 1
        ared = state.f - f_trial
        ratio = ared / res.pred if np.isfinite(f_trial) else -math.inf
        step_norm = float(np.linalg.norm(s))
        is_accepted = ratio > cfg.eta1
        trace.append(_trial(state, cfg, res, gnorm, ared, ratio, is_accepted, step_norm))

        if not is_accepted:
            state.delta *= cfg.delta1
            rejections += 1
            continue

        g_trial = np.asarray(gradient(x_trial), dtype=float)
        ng += 1
        accepted += 1
        rejections = 0
        if ratio >= cfg.eta2 and abs(step_norm - state.delta) <= 1e-10 * state.delta:
            state.delta = min(cfg.delta2 * state.delta, cfg.delta_max)
        record = StepRecord(s=s, f_prev=state.f, f_cur=f_trial, g_prev=state.g, g_cur=g_trial)
        state.a = update_horizon(record)
        state.B = update_hessian(state.B, s, record.y)
        state.x, state.f, state.g = x_trial, f_trial, g_trial
        gnorm = float(np.linalg.norm(g_trial))

    return RunReport(
        status=status,
        iters=iters,
        nf=nf,
        ng=ng,
        accepted=accepted,
        f_final=state.f,
        gnorm_final=gnorm,
        x_final=state.x,
        trace=trace,
        wall_time=time.perf_counter() - t_start,
    )


def _trial(state, cfg, res, gnorm, ared, ratio, accepted, step_norm) -> Trial:
    a = res.a_used
    return Trial(
        delta=state.delta,
        pred=res.pred,
        ared=ared,
        ratio=ratio,
        accepted=accepted,
        strategy=res.strategy.value,
        hit=res.tau.hit.value if res.tau is not None else None,
        step_norm=step_norm,
        gauge=abs(1.0 - float(a @ res.s)),
        eps0=cfg.eps0,
        gnorm=gnorm,
        cos_ag=res.cos_ag,
        a_norm=float(np.linalg.norm(a)),
        B_norm=spectral_norm(state.B) if cfg.check_bounds else float("nan"),
    )


def _unevaluated(state, cfg, res, gnorm) -> Trial:
    return Trial(
        delta=state.delta,
        pred=res.pred if res is not None else float("nan"),
        ared=float("nan"),
        ratio=float("nan"),
        accepted=False,
        strategy=cfg.strategy.value,
        hit=None,
        step_norm=float("nan"),
        gauge=float("nan"),
        eps0=cfg.eps0,
        gnorm=gnorm,
        cos_ag=float("nan"),
        a_norm=float(np.linalg.norm(state.a)),
        evaluated=False,
    )


@dataclass(frozen=True)
class BoundViolation:
    index: int
    bound: str
    pred: float
    required: float


def pred_lower_bounds(t: Trial) -> dict:
    """Lower bounds on ``pred`` that apply to an ADM trial."""
    out = {}
    if t.strategy == Strategy.QUAD_DOGLEG.value:
        out["cauchy"] = 0.5 * t.gnorm * min(t.delta, t.gnorm / t.B_norm)
        return out
    if t.strategy != Strategy.ADM.value:
        return out
    eps, e0 = t.cos_ag, t.eps0
    c1 = eps / (2.0 + e0)
    if t.hit in (Hit.PLUS_TAU_DELTA.value, Hit.MINUS_TAU_DELTA.value):
        out["boundary"] = 0.5 * c1 * t.delta * t.gnorm
    c4 = min(c1, eps * eps, eps * (1.0 - e0) / e0)
    out["global"] = 0.5 * c4 * t.gnorm * min(t.delta, 1.0 / t.a_norm, t.gnorm / t.B_norm)
    return out


def verify_pred_bounds(trace, slack: float = 1e-8) -> list[BoundViolation]:
    """Trials whose predicted reduction falls below the theoretical floor.

    Trials must have been recorded with ``check_bounds`` so that ``B_norm``
    is available; DCTR trials carry no bound and are skipped.
    """
    violations = []
    for i, t in enumerate(trace):
        if not t.evaluated:
            continue
        if not np.isfinite(t.B_norm):
            raise ValueError(f"trial {i} was recorded without check_bounds")
        for name, required in pred_lower_bounds(t).items():
            if t.pred < (1.0 - slack) * required:
                violations.append(BoundViolation(i, name, t.pred, required))
    return violations
