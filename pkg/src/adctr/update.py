"""Between-iteration updates of the conic model: horizon vector and damped BFGS."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .linalg import is_positive_definite

logger = logging.getLogger(__name__)

# uniform bound on ||a_k||
MAX_HORIZON_NORM = 1e3


@dataclass(frozen=True)
class StepRecord:
    """An accepted step ``x_prev -> x_cur``."""

    s: np.ndarray
    f_prev: float
    f_cur: float
    g_prev: np.ndarray
    g_cur: np.ndarray

    @property
    def y(self) -> np.ndarray:
        return self.g_cur - self.g_prev


def horizon_beta(r: StepRecord) -> float:
    df = r.f_cur - r.f_prev
    return df * df - float(r.g_prev @ r.s) * float(r.g_cur @ r.s)


def horizon_scale(r: StepRecord) -> float:
    """The scalar ``beta_k``; 1 means the model stays quadratic."""
    beta = horizon_beta(r)
    gs = float(r.g_prev @ r.s)
    if not (beta > 0.0) or abs(gs) <= 1e-14 * np.linalg.norm(r.g_prev) * np.linalg.norm(r.s):
        return 1.0
    return (r.f_prev - r.f_cur + math.sqrt(beta)) / (-gs)


def update_horizon(r: StepRecord, max_norm: float = MAX_HORIZON_NORM) -> np.ndarray:
    """Horizon vector for the conic model at ``x_cur``."""
    beta_k = horizon_scale(r)
    if beta_k == 1.0:
        return np.zeros_like(r.g_prev)
    a = ((1.0 - beta_k) / float(r.g_prev @ r.s)) * r.g_prev
    norm_a = np.linalg.norm(a)
    if not np.isfinite(norm_a):
        return np.zeros_like(r.g_prev)
    if norm_a > max_norm:
        a *= max_norm / norm_a
    return a


def damping_theta(sBs: float, ys: float) -> float:
    if ys >= 0.2 * sBs:
        return 1.0
    return 0.8 * sBs / (sBs - ys)


def update_hessian(B, s, y) -> np.ndarray:
    """Powell-damped BFGS update.

    Returns ``B`` unchanged when ``s^T B s`` is negligible or the update
    would lose positive definiteness to rounding.
    """
    B = np.asarray(B, dtype=float)
    Bs = B @ s
    sBs = float(s @ Bs)
    if sBs <= 1e-30:
        logger.debug("skipping BFGS update: s^T B s = %g", sBs)
        return B
    theta = damping_theta(sBs, float(y @ s))
    z = theta * y + (1.0 - theta) * Bs
    B_new = B - np.outer(Bs, Bs) / sBs + np.outer(z, z) / float(z @ s)
    B_new = 0.5 * (B_new + B_new.T)
    if not is_positive_definite(B_new):
        logger.debug("skipping BFGS update: result not positive definite")
        return B
    return B_new
