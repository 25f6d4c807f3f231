"""Histopolation engine and the three mock-Chebyshev reconstruction methods.

A histopolant of degree ``d`` on ``d+1`` segments matches the segment means
of the data exactly. The methods here differ only in which segments (and
which aggregated means) they feed to that solve:

* full equispaced: all ``n`` segments, degree ``n-1`` (ill-conditioned baseline)
* concatenated: ``m`` unions of equispaced segments with mock-Chebyshev endpoints
* quasi-nodal: the ``m`` equispaced segments containing the roots of T_m
* constrained: quasi-nodal means enforced exactly, all ``n`` means fitted in
  least squares, degree ``r-1``
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _core
from .basis import ChebPoly, mean_matrix
from .errors import (
    InvalidConfigurationError,
    InvalidParameterError,
    MethodError,
    SingularMatrixError,
    UnisolvenceError,
)
from .grid import (
    SegmentKind,
    SegmentSet,
    concatenated_mock_segments,
    constrained_degree,
    max_mock_degree,
    quasi_nodal_segments,
)
from .linalg import KKTSystem, LUFactorization, condition_number_2, relative_residual, solve_kkt

DEFAULT_GRID_POINTS = 10001


class Provenance(enum.Enum):
    EXACT_ANTIDERIVATIVE = "exact-antiderivative"
    QUADRATURE = "quadrature"
    INGESTED = "ingested"
    COMPUTED = "computed"


class Method(enum.Enum):
    FULL_EQUISPACED = "full"
    CONCATENATED_MC = "concatenated"
    QUASI_NODAL_MCF = "quasi-nodal"
    CONSTRAINED_MCF = "constrained"


@dataclass(frozen=True, eq=False)
class AveragesVector:
    values: np.ndarray
    segset: SegmentSet
    provenance: Provenance = Provenance.COMPUTED

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "values", v)
        if v.size != len(self.segset):
            raise InvalidParameterError(
                f"{v.size} averages for {len(self.segset)} segments"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidParameterError("averages must be finite")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class Gramian:
    matrix: np.ndarray
    segset: SegmentSet
    degree: int


@dataclass(frozen=True, eq=False)
class LagrangeBasis:
    polys: list[ChebPoly]
    segset: SegmentSet

    @property
    def coeff_matrix(self) -> np.ndarray:
        """Row ``i`` holds the Chebyshev coefficients of the i-th cardinal function."""
        return np.stack([p.coeffs for p in self.polys])


@dataclass(eq=False)
class MethodReport:
    poly: ChebPoly
    method: Method
    cond: float
    residual: float
    segset: SegmentSet
    max_err: float | None = None
    lebesgue: float | None = None
    n: int | None = None
    m: int | None = None
    r: int | None = None
    extra: dict = field(default_factory=dict)


def build_gramian(s: SegmentSet, degree: int) -> Gramian:
    return Gramian(mean_matrix(s, degree), s, int(degree))


def _solve_square(G: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    x = _factor_gramian(G).solve(rhs)
    return x, relative_residual(G, x, rhs)


def histopolate(s: SegmentSet, data: AveragesVector) -> ChebPoly:
    """Unique polynomial of degree ``len(s)-1`` reproducing the means in ``data``."""
    if len(data) != len(s):
        raise InvalidParameterError("data does not match the segment set")
    coeffs, _, _ = _histopolate(s, data.values)
    return ChebPoly(coeffs)


def _histopolate(s: SegmentSet, values: np.ndarray):
    G = mean_matrix(s, len(s) - 1)
    coeffs, res = _solve_square(G, values)
    misfit = float(np.max(np.abs(G @ coeffs - values)))
    if misfit > 1e-8 * (1.0 + np.max(np.abs(values))):
        if condition_number_2(G) <= 1e10:
            raise MethodError(f"histopolant misses the data by {misfit:.3e} on a well-conditioned system")
    return coeffs, res, G


def lagrange_basis(s: SegmentSet) -> LagrangeBasis:
    """Cardinal polynomials: the mean of ``polys[i]`` over segment ``j`` is delta_ij."""
    G = mean_matrix(s, len(s) - 1)
    fac = _factor_gramian(G)
    inv = fac.solve(np.eye(len(s)))
    return LagrangeBasis([ChebPoly(inv[:, i]) for i in range(len(s))], s)


def _factor_gramian(G):
    try:
        return LUFactorization(G, error=UnisolvenceError)
    except SingularMatrixError as exc:
        raise UnisolvenceError(f"segment set is not unisolvent: {exc}") from exc


def eval_grid(points: int, interval: str = "full") -> np.ndarray:
    if points < 2:
        raise InvalidParameterError("evaluation grid needs at least 2 points")
    if interval == "full":
        lo = -1.0
    elif interval == "right-half":
        lo = 0.0
    else:
        raise InvalidParameterError(f"unknown interval {interval!r}")
    x = np.linspace(lo, 1.0, points)
    x[-1] = 1.0
    return x


def lebesgue_function(s: SegmentSet, x) -> np.ndarray:
    """sum_i |l_i(x)| at the points ``x``."""
    basis = lagrange_basis(s)
    return _core.abs_row_sums(np.ascontiguousarray(x, dtype=np.float64), basis.coeff_matrix)


def lebesgue_constant(s: SegmentSet, eval_points: int = DEFAULT_GRID_POINTS) -> float:
    """Grid estimate of the segmental Lebesgue constant on [-1, 1]."""
    if eval_points < 1001:
        raise InvalidParameterError("use at least 1001 evaluation points")
    return float(np.max(lebesgue_function(s, eval_grid(eval_points))))


def max_error(poly: ChebPoly, f: Callable, grid_points: int = DEFAULT_GRID_POINTS,
              interval: str = "full") -> float:
    x = eval_grid(grid_points, interval)
    fx = np.asarray(f(x), dtype=np.float64)
    px = _core.chebval(x, poly.coeffs)
    return float(np.max(np.abs(fx - px)))


def _check_chain(n: int, data_eq: AveragesVector) -> None:
    s = data_eq.segset
    if s.kind is not SegmentKind.EQUISPACED_CHAIN:
        raise InvalidConfigurationError("method needs data on an equispaced chain")
    if len(s) != n:
        raise InvalidConfigurationError(f"expected {n} equispaced means, got {len(s)}")


def _finish(report: MethodReport, reference, grid_points, interval, with_lebesgue):
    if reference is not None:
        report.max_err = max_error(report.poly, reference, grid_points, interval)
    if with_lebesgue:
        report.lebesgue = lebesgue_constant(report.segset, max(grid_points, 1001))
    return report


def aggregate_means(data_eq: AveragesVector, segs: SegmentSet) -> np.ndarray:
    """Average equispaced means over each concatenated segment's source range."""
    if segs.source_indices is None:
        raise InvalidParameterError("segment set carries no source indices")
    v = data_eq.values
    return np.array([v[lo:hi].sum() / (hi - lo) for lo, hi in segs.source_indices])


def method_full_equispaced(n: int, data_eq: AveragesVector, *, reference=None,
                           grid_points: int = DEFAULT_GRID_POINTS, interval: str = "full",
                           with_lebesgue: bool = False) -> MethodReport:
    _check_chain(n, data_eq)
    s = data_eq.segset
    coeffs, res, G = _histopolate(s, data_eq.values)
    rep = MethodReport(ChebPoly(coeffs), Method.FULL_EQUISPACED, condition_number_2(G), res, s, n=n)
    return _finish(rep, reference, grid_points, interval, with_lebesgue)


def method_concatenated(n: int, m: int, data_eq: AveragesVector, *, reference=None,
                        grid_points: int = DEFAULT_GRID_POINTS, interval: str = "full",
                        with_lebesgue: bool = False) -> MethodReport:
    _check_chain(n, data_eq)
    segs = concatenated_mock_segments(n, m)
    mu = aggregate_means(data_eq, segs)
    coeffs, res, G = _histopolate(segs, mu)
    rep = MethodReport(ChebPoly(coeffs), Method.CONCATENATED_MC, condition_number_2(G), res, segs,
                       n=n, m=m)
    rep.extra["aggregated_means"] = mu
    return _finish(rep, reference, grid_points, interval, with_lebesgue)


def method_quasi_nodal(n: int, m: int, data_eq: AveragesVector, *, reference=None,
                       grid_points: int = DEFAULT_GRID_POINTS, interval: str = "full",
                       with_lebesgue: bool = False) -> MethodReport:
    _check_chain(n, data_eq)
    segs = quasi_nodal_segments(n, m)
    rows = np.array([lo for lo, _ in segs.source_indices])
    coeffs, res, G = _histopolate(segs, data_eq.values[rows])
    rep = MethodReport(ChebPoly(coeffs), Method.QUASI_NODAL_MCF, condition_number_2(G), res, segs,
                       n=n, m=m)
    return _finish(rep, reference, grid_points, interval, with_lebesgue)


def constrained_fit(segs: SegmentSet, values: np.ndarray, constrained_rows, r: int,
                    regression_rows=None):
    """Least-squares fit of degree ``r-1`` with exact means on ``constrained_rows``.

    Rows are reordered so the constrained ones come first; the regression
    term uses ``regression_rows`` (default: every row) with the factor 2
    kept on both G and c. Returns ``(coeffs, multipliers, kkt)``.
    """
    constrained_rows = np.asarray(constrained_rows, dtype=np.intp)
    rest = np.setdiff1d(np.arange(len(segs)), constrained_rows)
    order = np.concatenate([constrained_rows, rest])
    if regression_rows is None:
        reg = order
    else:
        reg = np.asarray(regression_rows, dtype=np.intp)
    N_all = mean_matrix(segs, r - 1)
    N = N_all[reg]
    b = values[reg]
    C = N_all[constrained_rows]
    d = values[constrained_rows]
    kkt = KKTSystem(2.0 * N.T @ N, C, 2.0 * N.T @ b, d)
    a, z = solve_kkt(kkt)
    return a, z, kkt


def method_constrained(n: int, data_eq: AveragesVector, m: int | None = None, *, reference=None,
                       grid_points: int = DEFAULT_GRID_POINTS, interval: str = "full",
                       with_lebesgue: bool = False) -> MethodReport:
    """Constrained mock-Chebyshev least squares on all ``n`` equispaced means.

    ``m`` defaults to ``floor(pi*sqrt(n/2))``; ``r = m + floor(pi*sqrt(n/12)) + 1``.
    """
    _check_chain(n, data_eq)
    if m is None:
        m = max_mock_degree(n)
    r = constrained_degree(n, m)
    if r > n:
        raise InvalidConfigurationError(f"degree count r={r} exceeds n={n}")
    qn = quasi_nodal_segments(n, m)
    rows = np.array([lo for lo, _ in qn.source_indices], dtype=np.intp)
    a, z, kkt = constrained_fit(data_eq.segset, data_eq.values, rows, r)
    M = kkt.matrix()
    sol = np.concatenate([a, z])
    res = relative_residual(M, sol, kkt.rhs())
    cres = float(np.max(np.abs(kkt.C @ a - kkt.rhs_d)))
    if cres > 1e-9 * (1.0 + np.max(np.abs(kkt.rhs_d))):
        raise MethodError(f"constraint residual {cres:.3e} too large; KKT solve broke down")
    rep = MethodReport(ChebPoly(a), Method.CONSTRAINED_MCF, condition_number_2(M), res,
                       data_eq.segset, n=n, m=m, r=r)
    rep.extra["constraint_residual"] = cres
    rep.extra["multipliers"] = z
    rep.extra["quasi_nodal"] = qn
    # no cardinal basis for a least-squares fit, so with_lebesgue is ignored
    return _finish(rep, reference, grid_points, interval, False)


def run_method(method: Method | str, data_eq: AveragesVector, m: int | None = None, **kw) -> MethodReport:
    """Dispatch by method; ``m`` defaults to ``floor(pi*sqrt(n/2))``."""
    method = Method(method)
    n = len(data_eq)
    if m is None:
        m = max_mock_degree(n)
    if method is Method.FULL_EQUISPACED:
        return method_full_equispaced(n, data_eq, **kw)
    if method is Method.CONCATENATED_MC:
        return method_concatenated(n, m, data_eq, **kw)
    if method is Method.QUASI_NODAL_MCF:
        return method_quasi_nodal(n, m, data_eq, **kw)
    return method_constrained(n, data_eq, m, **kw)
