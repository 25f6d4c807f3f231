"""Node families, mock-Chebyshev extraction and the segment sets built from them.

All node sets are stored in ascending order. The Chebyshev-Lobatto nodes
are ``-cos(pi*i/m)`` for ``i = 0..m`` and the first-kind roots are sorted
ascending, so index 0 is always the leftmost node.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSegmentError,
    DegreeTooLargeError,
    InvalidParameterError,
    NonDistinctSegmentsError,
    NonDistinctSelectionError,
)

# Equality tolerance when a Chebyshev point lands on a grid node.
NODE_TOL = 1e-14


class NodeKind(enum.Enum):
    EQUISPACED = "equispaced"
    CHEBYSHEV_LOBATTO = "chebyshev-lobatto"
    CHEBYSHEV_FIRST_KIND = "chebyshev-first-kind"
    MOCK_CHEBYSHEV = "mock-chebyshev"


class SegmentKind(enum.Enum):
    EQUISPACED_CHAIN = "equispaced-chain"
    CONCATENATED_MOCK = "concatenated-mock"
    QUASI_NODAL = "quasi-nodal"
    ARBITRARY = "arbitrary"


@dataclass(frozen=True, eq=False)
class NodeSet:
    values: np.ndarray
    kind: NodeKind
    # positions in the parent equispaced grid, set for mock-Chebyshev nodes
    grid_indices: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Segment:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DegenerateSegmentError(f"segment [{self.a}, {self.b}] has no positive length")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True, eq=False)
class SegmentSet:
    """Ordered collection of closed subintervals of [-1, 1].

    ``source_indices`` maps each segment to the half-open range
    ``(start, stop)`` of 0-based equispaced segments it is made of.
    """

    a: np.ndarray
    b: np.ndarray
    kind: SegmentKind = SegmentKind.ARBITRARY
    source_indices: tuple[tuple[int, int], ...] | None = None
    n_equispaced: int | None = field(default=None)

    def __post_init__(self):
        a = np.ascontiguousarray(self.a, dtype=np.float64)
        b = np.ascontiguousarray(self.b, dtype=np.float64)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.shape != b.shape or a.ndim != 1:
            raise InvalidParameterError("segment endpoint arrays must be 1-d and equally long")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidParameterError("segment endpoints must be finite")
        bad = np.flatnonzero(~(a < b))
        if bad.size:
            i = int(bad[0])
            raise DegenerateSegmentError(f"segment {i} [{a[i]!r}, {b[i]!r}] has no positive length")

    @classmethod
    def from_pairs(cls, pairs, kind: SegmentKind = SegmentKind.ARBITRARY) -> "SegmentSet":
        pairs = list(pairs)
        a = np.array([p[0] for p in pairs], dtype=np.float64)
        b = np.array([p[1] for p in pairs], dtype=np.float64)
        return cls(a, b, kind)

    def __len__(self) -> int:
        return len(self.a)

    def __iter__(self):
        return iter(self.segments)

    @property
    def segments(self) -> list[Segment]:
        return [Segment(float(a), float(b)) for a, b in zip(self.a, self.b)]

    @property
    def lengths(self) -> np.ndarray:
        return self.b - self.a

    def is_ordered_disjoint(self, tol: float = 0.0) -> bool:
        """True when segments run left to right and overlap at most in endpoints."""
        return bool(np.all(self.b[:-1] <= self.a[1:] + tol))

    def take(self, order) -> "SegmentSet":
        order = np.asarray(order, dtype=np.intp)
        src = None
        if self.source_indices is not None:
            src = tuple(self.source_indices[i] for i in order)
        return SegmentSet(self.a[order], self.b[order], SegmentKind.ARBITRARY, src, self.n_equispaced)


def _check_positive(name: str, value: int) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise InvalidParameterError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def equispaced_nodes(n: int) -> NodeSet:
    """Grid ``-1 + 2i/n`` for ``i = 0..n`` (``n`` segments, ``n+1`` nodes)."""
    n = _check_positive("n", n)
    vals = -1.0 + 2.0 * np.arange(n + 1) / n
    vals[-1] = 1.0
    return NodeSet(vals, NodeKind.EQUISPACED)


def chebyshev_lobatto_nodes(m: int) -> NodeSet:
    m = _check_positive("m", m)
    vals = -np.cos(np.pi * np.arange(m + 1) / m)
    vals[0], vals[-1] = -1.0, 1.0
    # cos(pi/2) is 6e-17, not 0
    if m % 2 == 0:
        vals[m // 2] = 0.0
    return NodeSet(vals, NodeKind.CHEBYSHEV_LOBATTO)


def chebyshev_first_kind_roots(m: int) -> NodeSet:
    m = _check_positive("m", m)
    i = np.arange(m, 0, -1)
    vals = np.cos((2 * i - 1) * np.pi / (2 * m))
    if m % 2 == 1:
        vals[m // 2] = 0.0
    return NodeSet(vals, NodeKind.CHEBYSHEV_FIRST_KIND)


def max_mock_degree(n: int) -> int:
    """Largest ``m`` for which ``m+1`` distinct mock-Chebyshev nodes exist."""
    n = _check_positive("n", n)
    return int(math.floor(math.pi * math.sqrt(n / 2.0)))


def constrained_degree(n: int, m: int | None = None) -> int:
    """Number of basis functions ``r = m + floor(pi*sqrt(n/12)) + 1``."""
    n = _check_positive("n", n)
    if m is None:
        m = max_mock_degree(n)
    return int(m) + int(math.floor(math.pi * math.sqrt(n / 12.0))) + 1


def _nearest_grid_index(n: int, grid: np.ndarray, t: float) -> int:
    # nearest node of the equispaced grid; exact midpoints go left
    k = int(math.floor((t + 1.0) * n / 2.0))
    k = min(max(k, 0), n)
    best = k
    for j in (k - 1, k + 1):
        if 0 <= j <= n:
            dj = abs(grid[j] - t)
            db = abs(grid[best] - t)
            if dj < db - NODE_TOL or (abs(dj - db) <= NODE_TOL and j < best):
                best = j
    return best


def extract_mock_chebyshev(equi: NodeSet, m: int) -> NodeSet:
    """Pick, for each Chebyshev-Lobatto node of degree ``m``, the nearest grid node."""
    if equi.kind is not NodeKind.EQUISPACED:
        raise InvalidParameterError("mock-Chebyshev extraction needs an equispaced grid")
    m = _check_positive("m", m)
    n = len(equi) - 1
    if m > max_mock_degree(n):
        raise DegreeTooLargeError(
            f"m={m} exceeds floor(pi*sqrt(n/2))={max_mock_degree(n)} for n={n}"
        )
    grid = equi.values
    targets = chebyshev_lobatto_nodes(m).values
    idx = np.array([_nearest_grid_index(n, grid, t) for t in targets], dtype=np.intp)
    if np.any(np.diff(idx) <= 0):
        raise NonDistinctSelectionError(f"mock-Chebyshev nodes for n={n}, m={m} are not distinct")
    return NodeSet(grid[idx].copy(), NodeKind.MOCK_CHEBYSHEV, idx)


def equispaced_segments(n: int) -> SegmentSet:
    x = equispaced_nodes(n).values
    src = tuple((i, i + 1) for i in range(n))
    return SegmentSet(x[:-1], x[1:], SegmentKind.EQUISPACED_CHAIN, src, n)


def chebyshev_lobatto_segments(m: int) -> SegmentSet:
    """The ``m`` segments between consecutive Chebyshev-Lobatto nodes."""
    x = chebyshev_lobatto_nodes(m).values
    return SegmentSet(x[:-1], x[1:], SegmentKind.ARBITRARY)


def concatenated_mock_segments(n: int, m: int) -> SegmentSet:
    """Partition of [-1, 1] with mock-Chebyshev nodes as endpoints."""
    mc = extract_mock_chebyshev(equispaced_nodes(n), m)
    idx = mc.grid_indices
    src = tuple((int(idx[j]), int(idx[j + 1])) for j in range(m))
    return SegmentSet(mc.values[:-1], mc.values[1:], SegmentKind.CONCATENATED_MOCK, src, n)


def quasi_nodal_segments(n: int, m: int) -> SegmentSet:
    """Equispaced segments that each contain one root of T_m.

    A root sitting on a grid node is assigned to the segment on its left.
    """
    n = _check_positive("n", n)
    m = _check_positive("m", m)
    grid = equispaced_nodes(n).values
    roots = chebyshev_first_kind_roots(m).values
    right = np.empty(m, dtype=np.intp)
    for i, r in enumerate(roots):
        t = (r + 1.0) * n / 2.0
        k = int(round(t))
        if abs(grid[k] - r) <= NODE_TOL:
            j = k
        else:
            j = int(math.ceil(t))
            # guard against t landing a hair off an integer
            if grid[j] < r:
                j += 1
            elif j >= 1 and grid[j - 1] >= r:
                j -= 1
        right[i] = max(j, 1)
    hits = np.flatnonzero(np.diff(right) == 0)
    if hits.size:
        i = int(hits[0])
        raise NonDistinctSegmentsError(
            f"roots {i} and {i + 1} (ascending) of T_{m} both fall in segment "
            f"[{grid[right[i] - 1]:.17g}, {grid[right[i]]:.17g}] for n={n}",
            roots=(i, i + 1),
        )
    src = tuple((int(j - 1), int(j)) for j in right)
    return SegmentSet(grid[right - 1].copy(), grid[right].copy(), SegmentKind.QUASI_NODAL, src, n)


def perturb_segments(s: SegmentSet, eps: float, rng_seed: int) -> SegmentSet:
    """Shift every endpoint by an independent uniform draw from [-eps, eps].

    Endpoints are clamped to [-1, 1]. Neighbouring perturbed segments may
    overlap slightly, so the result is always of kind ``ARBITRARY``.
    """
    if not eps >= 0:
        raise InvalidParameterError(f"eps must be nonnegative, got {eps!r}")
    rng = np.random.default_rng(rng_seed)
    shift = rng.uniform(-eps, eps, size=(2, len(s)))
    a = np.clip(s.a + shift[0], -1.0, 1.0)
    b = np.clip(s.b + shift[1], -1.0, 1.0)
    bad = np.flatnonzero(b - a <= 0)
    if bad.size:
        raise DegenerateSegmentError(f"perturbation collapsed segment {int(bad[0])}")
    return SegmentSet(a, b, SegmentKind.ARBITRARY)
