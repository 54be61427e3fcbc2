"""Conic-model trust-region minimisation with an alternating-direction subproblem solver.

Typical use::

    from adctr import get_problem, minimize, SolverConfig

    p = get_problem("Rosenbrock", 2)
    report = minimize(p.objective, p.gradient, p.x0, SolverConfig(strategy="DCTR"))
"""
from .conic import (
    Case,
    ConicSubproblem,
    Hit,
    Strategy,
    SubproblemResult,
    TauResult,
    solve_conic_adm,
    solve_conic_dogleg,
    solve_tau_stage,
)
from .dogleg import DoglegStep, QuadSubproblem, solve_dogleg
from .driver import RunReport, SolverConfig, Status, minimize, verify_pred_bounds
from .problems import TestProblem, fd_check, get_problem, problem_names
from .update import StepRecord, update_hessian, update_horizon

__all__ = [
    "Case",
    "ConicSubproblem",
    "DoglegStep",
    "Hit",
    "QuadSubproblem",
    "RunReport",
    "SolverConfig",
    "Status",
    "StepRecord",
    "Strategy",
    "SubproblemResult",
    "TauResult",
    "TestProblem",
    "fd_check",
    "get_problem",
    "minimize",
    "problem_names",
    "solve_conic_adm",
    "solve_conic_dogleg",
    "solve_dogleg",
    "solve_tau_stage",
    "update_hessian",
    "update_horizon",
    "verify_pred_bounds",
]
