"""Dense linear algebra helpers.

Vectors are 1-d float64 numpy arrays and symmetric matrices are 2-d arrays.
The null-space operator ``Q`` of a horizon vector is never formed; it is
applied through a single Householder reflector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, Dimension1, NotPositiveDefinite, ZeroVector


@dataclass(frozen=True)
class SpdFactor:
    """Lower-triangular ``L`` with ``B = L L^T``."""

    L: np.ndarray

    @property
    def n(self) -> int:
        return self.L.shape[0]


def cholesky(B) -> SpdFactor:
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {B.shape}")
    if not np.all(np.isfinite(B)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    d = np.diag(L)
    if not np.all(np.isfinite(L)) or np.any(d <= 0.0):
        raise NotPositiveDefinite("non-positive pivot")
    return SpdFactor(L)


def solve_spd(F: SpdFactor, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (F.n,):
        raise DimensionMismatch(f"rhs has shape {b.shape}, factor is {F.n}x{F.n}")
    return scipy.linalg.cho_solve((F.L, True), b, check_finite=False)


def is_positive_definite(B) -> bool:
    try:
        cholesky(B)
    except NotPositiveDefinite:
        return False
    return True


def spectral_norm(B) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    B = np.asarray(B, dtype=float)
    return float(np.max(np.abs(np.linalg.eigvalsh(B))))


def power_norm(B, iters: int = 50, seed: int = 0) -> float:
    """Cheap lower estimate of ``||B||_2`` by power iteration."""
    B = np.asarray(B, dtype=float)
    v = np.random.default_rng(seed).standard_normal(B.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = B @ v
        lam = np.linalg.norm(w)
        if lam == 0.0:
            return 0.0
        v = w / lam
    return float(lam)


@dataclass(frozen=True)
class NullSpaceBasis:
    """Orthonormal basis of ``{y : a^T y = 0}``.

    ``H = I - 2 v v^T / (v^T v)`` maps ``a`` to ``sign * ||a|| * e_1``; the
    basis is columns ``2..n`` of ``H``.
    """

    v: np.ndarray
    sign: float
    vtv: float

    @property
    def n(self) -> int:
        return self.v.shape[0]

    def reflect(self, w: np.ndarray) -> np.ndarray:
        return w - (2.0 * (self.v @ w) / self.vtv) * self.v

    def matrix(self) -> np.ndarray:
        """Dense ``n x (n-1)`` basis; for tests and small problems only."""
        H = np.eye(self.n) - (2.0 / self.vtv) * np.outer(self.v, self.v)
        return H[:, 1:]


def nullspace_of(a) -> NullSpaceBasis:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise DimensionMismatch("horizon must be a vector")
    norm_a = np.linalg.norm(a)
    if norm_a == 0.0:
        raise ZeroVector("null space of the zero vector is undefined here")
    if a.shape[0] == 1:
        raise Dimension1("n = 1 has a trivial null space")
    # target sign * ||a|| * e1 with sign opposite to a[0] avoids cancellation in v[0]
    sign = -1.0 if a[0] >= 0.0 else 1.0
    v = a.copy()
    v[0] -= sign * norm_a
    return NullSpaceBasis(v=v, sign=sign, vtv=float(v @ v))


def apply_Q(basis: NullSpaceBasis, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (basis.n - 1,):
        raise DimensionMismatch(f"u has shape {u.shape}, expected ({basis.n - 1},)")
    w = np.concatenate(([0.0], u))
    return basis.reflect(w)


def apply_Qt(basis: NullSpaceBasis, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (basis.n,):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({basis.n},)")
    return basis.reflect(y)[1:]


def project_matrix(basis: NullSpaceBasis, B) -> np.ndarray:
    """Dense ``Q^T B Q`` computed as the trailing block of ``H B H``."""
    B = np.asarray(B, dtype=float)
    if B.shape != (basis.n, basis.n):
        raise DimensionMismatch(f"B has shape {B.shape}, expected {basis.n}x{basis.n}")
    v, c = basis.v, 2.0 / basis.vtv
    Bv = B @ v
    vBv = v @ Bv
    HBH = B - c * np.outer(v, Bv) - c * np.outer(Bv, v) + (c * c * vBv) * np.outer(v, v)
    out = HBH[1:, 1:]
    return 0.5 * (out + out.T)
