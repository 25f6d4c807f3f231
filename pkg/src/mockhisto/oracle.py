"""Segment-mean data: built-in test functions, quadrature and CSV averages files."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DataGenerationError, InputError, ParseError
from .grid import SegmentKind, SegmentSet
from .histo import AveragesVector, Provenance

GL_NODES = 16
QUAD_RTOL = 1e-14
QUAD_MAX_PANELS = 64
CHAIN_TOL = 1e-12


class FunctionId(enum.Enum):
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"
    F4 = "f4"
    F5 = "f5"
    F6 = "f6"


@dataclass(frozen=True)
class TestFunction:
    """A test function on [-1, 1].

    ``antiderivative_diff(a, b)`` returns F(b) - F(a) for an exact
    antiderivative F, arranged to avoid cancellation on short segments.
    """

    __test__ = False  # not a pytest class

    id: FunctionId | None
    eval: Callable[[np.ndarray], np.ndarray]
    antiderivative: Callable[[np.ndarray], np.ndarray] | None = None
    antiderivative_diff: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    kink: float | None = None

    def __call__(self, x):
        return self.eval(x)


_S8 = 2.0 * math.sqrt(2.0)


def _f1(x):
    return 1.0 / (1.0 + 25.0 * x * x)


def _f2(x):
    return 1.0 / (1.0 + 8.0 * x * x)


def _f3(x):
    return np.exp(x * x + 1.0)


def _f4(x):
    return np.cos(5.0 * x)


def _f5(x):
    return 1.0 / (x - 1.5)


def _f6(x):
    return x * np.abs(x) ** 3


def _atan_diff(c: float):
    # arctan(u) - arctan(v) = arctan((u - v) / (1 + u v)) when u v > -1
    def diff(a, b):
        u, v = c * b, c * a
        out = np.arctan((u - v) / (1.0 + u * v))
        wrap = u * v <= -1.0
        if np.any(wrap):
            out = np.where(wrap, np.arctan(u) - np.arctan(v), out)
        return out / c

    return diff


def _sin5_diff(a, b):
    return 2.0 * np.cos(2.5 * (a + b)) * np.sin(2.5 * (b - a)) / 5.0


def _log_diff(a, b):
    # ln|b - 1.5| - ln|a - 1.5| with both arguments negative on [-1, 1]
    return np.log1p((b - a) / (a - 1.5))


def _pow5_diff(a, b):
    # |b|^5 - |a|^5 factored when a, b share a sign
    ab, aa = np.abs(b), np.abs(a)
    same = a * b >= 0
    h = np.where(same, ab - aa, 0.0)
    fact = h * (ab**4 + ab**3 * aa + ab**2 * aa**2 + ab * aa**3 + aa**4)
    return np.where(same, fact, ab**5 - aa**5) / 5.0


_BUILTINS = {
    FunctionId.F1: TestFunction(FunctionId.F1, _f1, lambda x: np.arctan(5.0 * x) / 5.0, _atan_diff(5.0)),
    FunctionId.F2: TestFunction(FunctionId.F2, _f2, lambda x: np.arctan(_S8 * x) / _S8, _atan_diff(_S8)),
    FunctionId.F3: TestFunction(FunctionId.F3, _f3),
    FunctionId.F4: TestFunction(FunctionId.F4, _f4, lambda x: np.sin(5.0 * x) / 5.0, _sin5_diff),
    FunctionId.F5: TestFunction(FunctionId.F5, _f5, lambda x: np.log(np.abs(x - 1.5)), _log_diff),
    FunctionId.F6: TestFunction(FunctionId.F6, _f6, lambda x: np.abs(x) ** 5 / 5.0, _pow5_diff, kink=0.0),
}


def builtin(id) -> TestFunction:
    """Test function ``f1``..``f6`` by enum member or name (case-insensitive)."""
    if isinstance(id, FunctionId):
        key = id
    else:
        try:
            key = FunctionId(str(id).lower())
        except ValueError:
            raise InputError(f"unknown test function {id!r}; expected f1..f6") from None
    return _BUILTINS[key]


def polynomial_function(coeffs) -> TestFunction:
    """Wrap a Chebyshev series as a test function with exact antiderivative."""
    from numpy.polynomial import chebyshev as C

    c = np.asarray(coeffs, dtype=np.float64)
    ci = C.chebint(c)
    return TestFunction(None, lambda x: C.chebval(x, c), lambda x: C.chebval(x, ci),
                        lambda a, b: C.chebval(b, ci) - C.chebval(a, ci))


_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(k: int):
    if k not in _gl_cache:
        _gl_cache[k] = np.polynomial.legendre.leggauss(k)
    return _gl_cache[k]


def composite_gauss_legendre(f: Callable, a: np.ndarray, b: np.ndarray, panels: int,
                             nodes: int = GL_NODES) -> np.ndarray:
    """Integrals of ``f`` over each [a_i, b_i] with ``panels`` equal panels each."""
    t, w = _gauss_legendre(nodes)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    edges = a[:, None] + (b - a)[:, None] * (np.arange(panels + 1) / panels)[None, :]
    lo, hi = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[..., None] + half[..., None] * t
    fx = f(x)
    if not np.all(np.isfinite(fx)):
        raise DataGenerationError("non-finite integrand value on a segment")
    return np.sum((fx @ w) * half, axis=1)


def _split_at(a, b, point):
    # pieces [a, min(b, p)] and [max(a, p), b] for segments straddling p
    straddle = (a < point) & (b > point)
    left_b = np.where(straddle, point, b)
    right_a = np.where(straddle, point, a)
    return straddle, left_b, right_a


def adaptive_integral(f: Callable, a, b, kink: float | None = None,
                      rtol: float = QUAD_RTOL, max_panels: int = QUAD_MAX_PANELS) -> np.ndarray:
    """Composite 16-point Gauss-Legendre integrals, panels doubled until converged.

    Each segment refines independently; a segment stops once two successive
    panel counts agree to ``rtol`` relative or ``max_panels`` is reached.
    Segments straddling ``kink`` are integrated as two pieces.
    """
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if kink is not None:
        straddle, left_b, right_a = _split_at(a, b, kink)
        if np.any(straddle):
            left = adaptive_integral(f, a, left_b, None, rtol, max_panels)
            right = np.zeros_like(a)
            right[straddle] = adaptive_integral(f, right_a[straddle], b[straddle], None, rtol,
                                                max_panels)
            return left + right
    out = composite_gauss_legendre(f, a, b, 1)
    todo = np.arange(a.size)
    panels = 1
    while todo.size and panels < max_panels:
        panels *= 2
        finer = composite_gauss_legendre(f, a[todo], b[todo], panels)
        scale = np.maximum(np.abs(finer), np.finfo(float).tiny)
        done = np.abs(finer - out[todo]) <= rtol * scale
        out[todo] = finer
        todo = todo[~done]
    return out


def segment_means(f: TestFunction, s: SegmentSet, use_antiderivative: bool = True) -> AveragesVector:
    """Mean of ``f`` over every segment of ``s``."""
    h = s.b - s.a
    if use_antiderivative and f.antiderivative_diff is not None:
        vals = f.antiderivative_diff(s.a, s.b) / h
        prov = Provenance.EXACT_ANTIDERIVATIVE
    else:
        vals = adaptive_integral(f.eval, s.a, s.b, f.kink) / h
        prov = Provenance.QUADRATURE
    if not np.all(np.isfinite(vals)):
        raise DataGenerationError("non-finite segment mean")
    return AveragesVector(vals, s, prov)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def export_averages(data: AveragesVector, path=None) -> str:
    """Write ``a,b,mean`` CSV (LF endings, 17 significant digits); returns the text."""
    buf = io.StringIO()
    buf.write("a,b,mean\n")
    for a, b, v in zip(data.segset.a, data.segset.b, data.values):
        buf.write(f"{_fmt(a)},{_fmt(b)},{_fmt(v)}\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def _detect_chain(a: np.ndarray, b: np.ndarray) -> bool:
    n = a.size
    if abs(a[0] + 1.0) > CHAIN_TOL or abs(b[-1] - 1.0) > CHAIN_TOL:
        return False
    if n > 1 and np.max(np.abs(b[:-1] - a[1:])) > CHAIN_TOL:
        return False
    return bool(np.max(np.abs((b - a) - 2.0 / n)) <= CHAIN_TOL)


def parse_averages(text: str) -> tuple[SegmentSet, AveragesVector]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file; expected header 'a,b,mean'", row=1) from None
    if [h.strip() for h in header] != ["a", "b", "mean"]:
        raise ParseError(f"bad header {header!r}; expected 'a,b,mean'", row=1)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", row=lineno)
        try:
            a, b, v = (float(c) for c in row)
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", row=lineno) from None
        if not all(math.isfinite(t) for t in (a, b, v)):
            raise ParseError("non-finite value", row=lineno)
        if not a < b:
            raise ParseError(f"segment [{a}, {b}] has no positive length", row=lineno)
        if a < -1.0 - CHAIN_TOL or b > 1.0 + CHAIN_TOL:
            raise ParseError(f"segment [{a}, {b}] leaves [-1, 1]", row=lineno)
        if rows:
            pa, pb, _, _ = rows[-1]
            if a < pa:
                raise ParseError("rows are not sorted by a", row=lineno)
            if a < pb:
                raise ParseError(f"segment overlaps previous segment ending at {pb!r}", row=lineno)
        rows.append((a, b, v, lineno))
    if not rows:
        raise ParseError("no data rows", row=2)
    a = np.array([r[0] for r in rows])
    b = np.array([r[1] for r in rows])
    v = np.array([r[2] for r in rows])
    if _detect_chain(a, b):
        n = a.size
        segs = SegmentSet(a, b, SegmentKind.EQUISPACED_CHAIN, tuple((i, i + 1) for i in range(n)), n)
    else:
        segs = SegmentSet(a, b, SegmentKind.ARBITRARY)
    return segs, AveragesVector(v, segs, Provenance.INGESTED)


def ingest_averages(path) -> tuple[SegmentSet, AveragesVector]:
    """Read an ``a,b,mean`` CSV file into a segment set and its averages."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_averages(text)
