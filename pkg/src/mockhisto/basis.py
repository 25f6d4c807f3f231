"""Chebyshev first-kind polynomials and their exact segment means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import DegenerateSegmentError, InvalidParameterError
from .grid import Segment, SegmentSet

CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ChebPoly:
    """Polynomial ``sum coeffs[k] * T_k``; ``degree`` is ``len(coeffs) - 1``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=np.float64).reshape(-1)
        if c.size == 0:
            raise InvalidParameterError("ChebPoly needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return eval_poly(self, x)


def _clamp(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > 1.0 + CLAMP_TOL):
        raise InvalidParameterError("evaluation point outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def eval_T(k: int, x):
    """T_k(x) by the three-term recurrence; scalar or array ``x``."""
    if k < 0:
        raise InvalidParameterError("Chebyshev index must be nonnegative")
    xs = _clamp(x)
    t_prev, t = np.ones_like(xs), xs
    if k == 0:
        out = t_prev
    else:
        for _ in range(k - 1):
            t_prev, t = t, 2.0 * xs * t - t_prev
        out = t
    return float(out) if np.ndim(x) == 0 else out


def eval_poly(p: ChebPoly, x):
    """Clenshaw evaluation of ``p`` at scalar or array ``x``."""
    xs = _clamp(x)
    vals = _core.chebval(np.ascontiguousarray(xs.reshape(-1)), p.coeffs)
    if np.ndim(x) == 0:
        return float(vals[0])
    return vals.reshape(xs.shape)


def antiderivative_T(k: int) -> ChebPoly:
    """Antiderivative of T_k with zero constant term."""
    if k < 0:
        raise InvalidParameterError("Chebyshev index must be nonnegative")
    c = np.zeros(k + 2)
    if k == 0:
        c[1] = 1.0
    elif k == 1:
        c[2] = 0.25
    else:
        c[k + 1] = 0.5 / (k + 1)
        c[k - 1] = -0.5 / (k - 1)
    return ChebPoly(c)


def segment_average_T(k: int, s: Segment) -> float:
    """Mean of T_k over ``s``."""
    if k < 0:
        raise InvalidParameterError("Chebyshev index must be nonnegative")
    a, b = float(s.a), float(s.b)
    if not a < b:
        raise DegenerateSegmentError(f"segment [{a}, {b}] has no positive length")
    _clamp([a, b])
    m = _core.segment_means(np.array([a]), np.array([b]), k)
    return float(m[0, k])


def segment_average_poly(p: ChebPoly, s: Segment) -> float:
    row = _core.segment_means(np.array([float(s.a)]), np.array([float(s.b)]), p.degree)
    return float(row[0] @ p.coeffs)


def mean_matrix(segs: SegmentSet, degree: int) -> np.ndarray:
    """Matrix of means of T_0..T_degree (columns) over each segment (rows)."""
    if degree < 0:
        raise InvalidParameterError("degree must be nonnegative")
    a = np.clip(_clamp(segs.a), -1.0, 1.0)
    b = np.clip(_clamp(segs.b), -1.0, 1.0)
    return _core.segment_means(np.ascontiguousarray(a), np.ascontiguousarray(b), int(degree))
