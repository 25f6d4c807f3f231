"""Pure numpy versions of the compiled kernels.

Signatures and results match ``_kernels`` (up to rounding order).
"""

from __future__ import annotations

import numpy as np


def chebval(x: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    two_x = 2.0 * x
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for c in coeffs[:0:-1]:
        b1, b2 = c + two_x * b1 - b2, b1
    return coeffs[0] + x * b1 - b2


def cheb_vander(x: np.ndarray, degree: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    v = np.empty((x.shape[0], degree + 1))
    v[:, 0] = 1.0
    if degree >= 1:
        v[:, 1] = x
    for k in range(2, degree + 1):
        v[:, k] = 2.0 * x * v[:, k - 1] - v[:, k - 2]
    return v


def segment_means(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    ta = cheb_vander(a, degree + 1)
    tb = cheb_vander(b, degree + 1)
    h = (b - a)[:, None]
    out = np.empty((a.shape[0], degree + 1))
    out[:, 0] = 1.0
    if degree >= 1:
        out[:, 1] = 0.5 * (a + b)
    if degree >= 2:
        k = np.arange(2, degree + 1)
        d = tb - ta
        out[:, 2:] = 0.5 * (d[:, k + 1] / (k + 1) - d[:, k - 1] / (k - 1)) / h
    return out


def abs_row_sums(x: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    v = cheb_vander(x, coeffs.shape[1] - 1)
    return np.abs(v @ coeffs.T).sum(axis=1)


def lu_factor(A: np.ndarray, pivot_tol: float):
    lu = np.array(A, dtype=np.float64, copy=True, order="C")
    n = lu.shape[0]
    perm = np.arange(n, dtype=np.intp)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= pivot_tol:
            return lu, perm, k
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, -1


def lu_solve(lu: np.ndarray, perm: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    x = np.asarray(rhs, dtype=np.float64)[perm].copy()
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x
