"""Randomised brute-force checks of the subproblem solvers and model updates.

Each oracle draws instances from a seeded generator, compares the solver
against an independent computation and records every failing instance in a
JSON-serialisable form so that it can be replayed with :func:`replay`.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .conic import Case, ConicSubproblem, TauResult, conic_pred, solve_conic_adm, solve_tau_stage
from .dogleg import solve_dogleg
from .linalg import is_positive_definite, spectral_norm
from .update import update_hessian

GRID_POINTS = 100_000
DEFAULT_COUNTS = {"tau_grid": 500, "feasibility": 500, "pred_bounds": 500, "bfgs_pd": 500}


@dataclass
class OracleOutcome:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class OracleReport:
    seed: int
    outcomes: list

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def summary_lines(self) -> list[str]:
        lines = []
        for o in self.outcomes:
            tag = "PASS" if o.passed else "FAIL"
            lines.append(f"{tag} {o.name}: {o.checked} instances, {len(o.failures)} failures")
        return lines

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "outcomes": [asdict(o) for o in self.outcomes]},
                          indent=2, sort_keys=True)


def _instance_dict(p: ConicSubproblem) -> dict:
    return {"a": p.a.tolist(), "g": p.g.tolist(), "B": p.B.tolist(),
            "delta": p.delta, "eps0": p.eps0}


def replay(instance: dict) -> ConicSubproblem:
    """Rebuild a serialised subproblem instance."""
    return ConicSubproblem(np.array(instance["a"]), np.array(instance["g"]),
                           np.array(instance["B"]), float(instance["delta"]),
                           float(instance.get("eps0", 1e-5)))


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    M = rng.uniform(-1.0, 1.0, (n, n))
    return M.T @ M + np.eye(n)


def random_instance(rng: np.random.Generator, case: Case, eps0: float = 1e-5) -> ConicSubproblem:
    """Random subproblem whose radius lands in the requested case."""
    n = int(rng.integers(2, 9))
    a = rng.uniform(-1.0, 1.0, n)
    g = rng.uniform(-1.0, 1.0, n)
    B = random_spd(rng, n)
    norm_a = np.linalg.norm(a)
    if case is Case.P1:
        reach = rng.uniform(0.01, 0.99) * (1.0 - eps0)
    elif case is Case.P2:
        reach = 1.0 + rng.uniform(-0.9, 0.9) * eps0
    else:
        reach = 1.0 + 1.1 * eps0 + rng.exponential(2.0)
    return ConicSubproblem(a, g, B, reach / norm_a, eps0)


def feasible_grid(p: ConicSubproblem, points: int = GRID_POINTS) -> np.ndarray:
    """Sample of the feasible set for the step length along ``a``.

    Built from the raw definition ``|tau| ||a|| <= delta`` and
    ``|1 - tau ||a||^2| >= eps0``, independently of the solver's case logic.
    """
    aa = float(p.a @ p.a)
    t_delta = p.delta / math.sqrt(aa)
    t_d = (1.0 - p.eps0) / aa
    t_u = (1.0 + p.eps0) / aa
    pieces = [(-t_delta, min(t_d, t_delta))]
    if t_u <= t_delta:
        pieces.append((t_u, t_delta))
    total = sum(hi - lo for lo, hi in pieces)
    grids = []
    for lo, hi in pieces:
        k = max(2, int(round(points * (hi - lo) / total)))
        grids.append(np.linspace(lo, hi, k))
    return np.concatenate(grids)


def phi_along(p: ConicSubproblem, taus: np.ndarray) -> np.ndarray:
    """Conic model evaluated at ``s = tau * a`` from the full vector form."""
    S = np.outer(taus, p.a)
    den = 1.0 - S @ p.a
    return (S @ p.g) / den + np.einsum("ij,jk,ik->i", S, p.B, S) / (2.0 * den * den)


def _tau_feasible(p: ConicSubproblem, tau: float) -> bool:
    aa = float(p.a @ p.a)
    return (abs(tau) * math.sqrt(aa) <= p.delta * (1.0 + 1e-12)
            and abs(1.0 - tau * aa) >= p.eps0 * (1.0 - 1e-12))


def check_tau_grid(rng, count, tau_solver) -> OracleOutcome:
    out = OracleOutcome("tau_grid")
    for case in Case:
        for _ in range(count):
            p = random_instance(rng, case)
            if abs(p.a @ p.g) <= 1e-14 * np.linalg.norm(p.a) * np.linalg.norm(p.g):
                continue
            res: TauResult = tau_solver(p)
            out.checked += 1
            grid_vals = phi_along(p, feasible_grid(p))
            rho_min = float(np.min(grid_vals))
            rho_star = float(phi_along(p, np.array([res.tau]))[0])
            tol = 1e-8 * (1.0 + abs(rho_min))
            problems = []
            if res.case is not case:
                problems.append(f"classified {res.case.value}, expected {case.value}")
            if not _tau_feasible(p, res.tau):
                problems.append("tau infeasible")
            if not rho_star <= rho_min + tol:
                problems.append(f"rho(tau*) = {rho_star!r} exceeds grid minimum {rho_min!r}")
            if problems:
                out.failures.append({"instance": _instance_dict(p), "tau": res.tau,
                                     "hit": res.hit.value, "problems": problems})
    return out


def check_feasibility(rng, count) -> OracleOutcome:
    out = OracleOutcome("feasibility")
    cases = list(Case)
    for i in range(count):
        p = random_instance(rng, cases[i % 3])
        res = solve_conic_adm(p)
        out.checked += 1
        a = res.a_used
        problems = []
        if np.linalg.norm(res.s) > p.delta * (1.0 + 1e-12):
            problems.append("step outside trust region")
        if abs(1.0 - a @ res.s) < p.eps0 * (1.0 - 1e-12):
            problems.append("step violates the gauge constraint")
        if not res.pred > 0.0:
            problems.append(f"pred = {res.pred!r}")
        if not math.isclose(res.pred, conic_pred(p.g, p.B, a, res.s), rel_tol=1e-12, abs_tol=1e-300):
            problems.append("stored pred disagrees with recomputation")
        if problems:
            out.failures.append({"instance": _instance_dict(p), "problems": problems})
    return out


def check_pred_bounds(rng, count) -> tuple[OracleOutcome, OracleOutcome]:
    """Predicted-reduction floors on random instances.

    Returns two outcomes: the floor ``1/2 c1 delta ||g||`` claimed for steps
    that end on the trust-region boundary along ``a``, and the floor
    ``1/2 c4 ||g|| min(delta, 1/||a||, ||g||/||B||)`` claimed for every step.
    """
    from .driver import Trial, pred_lower_bounds

    boundary = OracleOutcome("pred_bounds_boundary")
    overall = OracleOutcome("pred_bounds_global")
    cases = list(Case)
    for i in range(count):
        p = random_instance(rng, cases[i % 3])
        res = solve_conic_adm(p)
        gnorm = float(np.linalg.norm(p.g))
        t = Trial(delta=p.delta, pred=res.pred, ared=float("nan"), ratio=float("nan"),
                  accepted=False, strategy=res.strategy.value,
                  hit=res.tau.hit.value if res.tau is not None else None,
                  step_norm=float(np.linalg.norm(res.s)), gauge=abs(1.0 - res.a_used @ res.s),
                  eps0=p.eps0, gnorm=gnorm, cos_ag=res.cos_ag,
                  a_norm=float(np.linalg.norm(res.a_used)), B_norm=spectral_norm(p.B))
        bounds = pred_lower_bounds(t)
        overall.checked += 1
        if "boundary" in bounds:
            boundary.checked += 1
        for name, required in bounds.items():
            if res.pred < (1.0 - 1e-8) * required:
                target = boundary if name == "boundary" else overall
                target.failures.append({
                    "instance": _instance_dict(p), "bound": name, "pred": res.pred,
                    "required": required, "case": res.tau.case.value if res.tau else None,
                    "hit": t.hit,
                })
    return boundary, overall


def check_bfgs_pd(rng, count) -> OracleOutcome:
    out = OracleOutcome("bfgs_pd")
    for _ in range(count):
        n = int(rng.integers(2, 11))
        B = random_spd(rng, n)
        s = rng.uniform(-1.0, 1.0, n)
        y = rng.uniform(-1.0, 1.0, n)
        B_new = update_hessian(B, s, y)
        out.checked += 1
        if not is_positive_definite(B_new):
            out.failures.append({"B": B.tolist(), "s": s.tolist(), "y": y.tolist()})
    return out


def check_dogleg_cauchy(rng, count) -> OracleOutcome:
    """Dogleg decrease against the Cauchy-point floor ``1/2 ||g|| min(delta, ||g||/||B||)``."""
    out = OracleOutcome("dogleg_cauchy")
    for _ in range(count):
        n = int(rng.integers(2, 11))
        B = random_spd(rng, n)
        g = rng.uniform(-1.0, 1.0, n)
        delta = float(rng.exponential(1.0)) + 1e-3
        step = solve_dogleg(g, B, delta)
        out.checked += 1
        gnorm = float(np.linalg.norm(g))
        floor = 0.5 * gnorm * min(delta, gnorm / spectral_norm(B))
        if step.pred < (1.0 - 1e-12) * floor or np.linalg.norm(step.s) > delta * (1.0 + 1e-12):
            out.failures.append({"g": g.tolist(), "B": B.tolist(), "delta": delta,
                                 "pred": step.pred, "floor": floor})
    return out


def run_oracles(
    seed: int = 0,
    counts: Optional[dict] = None,
    tau_solver: Callable[[ConicSubproblem], TauResult] = solve_tau_stage,
) -> OracleReport:
    """Run every oracle; ``counts`` maps oracle name to instances (per case for ``tau_grid``).

    ``tau_solver`` can be replaced with a deliberately broken variant to
    confirm that the grid oracle catches it.
    """
    c = dict(DEFAULT_COUNTS)
    c["dogleg_cauchy"] = c["bfgs_pd"]
    if counts is not None:
        c.update(counts)
    rng = np.random.default_rng(seed)
    outcomes = [
        check_tau_grid(rng, c["tau_grid"], tau_solver),
        check_feasibility(rng, c["feasibility"]),
        *check_pred_bounds(rng, c["pred_bounds"]),
        check_bfgs_pd(rng, c["bfgs_pd"]),
        check_dogleg_cauchy(rng, c["dogleg_cauchy"]),
    ]
    return OracleReport(seed=seed, outcomes=outcomes)
