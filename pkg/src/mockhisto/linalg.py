"""Dense linear algebra: pivoted LU, 2-norm condition number, KKT systems.

Matrices are plain C-ordered float64 numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import InvalidParameterError, SingularKKTError, SingularMatrixError

PIVOT_TOL = 1e-300


def _as_matrix(A) -> np.ndarray:
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise InvalidParameterError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidParameterError("matrix has non-finite entries")
    return A


class LUFactorization:
    """Row-pivoted LU of a square matrix, reusable across right-hand sides."""

    def __init__(self, A, error=SingularMatrixError):
        A = _as_matrix(A)
        if A.shape[0] != A.shape[1]:
            raise InvalidParameterError(f"LU needs a square matrix, got {A.shape}")
        self.shape = A.shape
        self._lu, self._perm, bad = _core.lu_factor(A, PIVOT_TOL)
        if bad >= 0:
            raise error(f"zero pivot in column {bad} of a {A.shape[0]}x{A.shape[0]} matrix")

    def solve(self, b) -> np.ndarray:
        b = np.ascontiguousarray(b, dtype=np.float64)
        if b.shape[0] != self.shape[0]:
            raise InvalidParameterError("right-hand side length does not match matrix")
        if b.ndim == 1:
            return _core.lu_solve(self._lu, self._perm, b)
        cols = [_core.lu_solve(self._lu, self._perm, np.ascontiguousarray(b[:, j]))
                for j in range(b.shape[1])]
        return np.stack(cols, axis=1)


def lu_solve(A, b) -> np.ndarray:
    return LUFactorization(A).solve(b)


def relative_residual(A, x, b) -> float:
    """Normwise backward error ``|Ax-b| / (|A||x| + |b|)`` in the inf-norm."""
    A = np.asarray(A)
    r = A @ x - b
    den = np.abs(A).sum(axis=1).max() * np.max(np.abs(x)) + np.max(np.abs(b))
    if den == 0.0:
        return 0.0
    return float(np.max(np.abs(r)) / den)


def condition_number_2(A) -> float:
    """sigma_max / sigma_min; ``inf`` when sigma_min is zero or the ratio overflows."""
    A = _as_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise InvalidParameterError("condition number of a zero matrix")
    if s[-1] == 0.0:
        return float("inf")
    with np.errstate(over="ignore"):
        c = s[0] / s[-1]
    return float(c) if np.isfinite(c) else float("inf")


@dataclass(eq=False)
class KKTSystem:
    """Equality-constrained least squares in KKT form.

    ``G`` is r x r, ``C`` is m x r, ``rhs_c`` has length r and ``rhs_d``
    length m.
    """

    G: np.ndarray
    C: np.ndarray
    rhs_c: np.ndarray
    rhs_d: np.ndarray

    def __post_init__(self):
        self.G = _as_matrix(self.G)
        self.C = np.ascontiguousarray(self.C, dtype=np.float64).reshape(-1, self.G.shape[0])
        self.rhs_c = np.asarray(self.rhs_c, dtype=np.float64).reshape(-1)
        self.rhs_d = np.asarray(self.rhs_d, dtype=np.float64).reshape(-1)
        r, m = self.G.shape[0], self.C.shape[0]
        if self.G.shape != (r, r) or self.rhs_c.size != r or self.rhs_d.size != m:
            raise InvalidParameterError("inconsistent KKT block dimensions")
        if m > r:
            raise InvalidParameterError(f"{m} constraints exceed {r} unknowns")

    @property
    def r(self) -> int:
        return self.G.shape[0]

    @property
    def m(self) -> int:
        return self.C.shape[0]

    def matrix(self) -> np.ndarray:
        r, m = self.r, self.m
        M = np.zeros((r + m, r + m))
        M[:r, :r] = self.G
        M[:r, r:] = self.C.T
        M[r:, :r] = self.C
        return M

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.rhs_c, self.rhs_d])


def solve_kkt(k: KKTSystem) -> tuple[np.ndarray, np.ndarray]:
    """Solve the assembled KKT system with one pivoted LU; returns ``(a, z)``."""
    M = k.matrix()
    sol = LUFactorization(M, error=SingularKKTError).solve(k.rhs())
    return sol[: k.r], sol[k.r:]
