import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mockhisto import grid
from mockhisto.errors import (
    DegenerateSegmentError,
    DegreeTooLargeError,
    InvalidParameterError,
    NonDistinctSegmentsError,
    NonDistinctSelectionError,
)
from mockhisto.histo import build_gramian

# At the maximal degree a few grids round two Chebyshev-Lobatto nodes onto the
# same grid node (the endpoint node sits almost exactly halfway); these pairs
# are every such pair with n < 160 (found by exhaustive enumeration).
COLLIDING = {(1, 2), (2, 3), (10, 7), (13, 8), (52, 16), (137, 26), (159, 28)}


def test_equispaced_nodes_examples():
    assert grid.equispaced_nodes(4).values.tolist() == [-1, -0.5, 0, 0.5, 1]
    assert grid.equispaced_nodes(1).values.tolist() == [-1, 1]
    assert grid.equispaced_nodes(50).values[25] == 0.0


@pytest.mark.parametrize("fn", [grid.equispaced_nodes, grid.chebyshev_lobatto_nodes,
                                grid.chebyshev_first_kind_roots, grid.max_mock_degree])
def test_zero_parameter_rejected(fn):
    with pytest.raises(InvalidParameterError):
        fn(0)


def test_chebyshev_lobatto_examples():
    assert grid.chebyshev_lobatto_nodes(2).values.tolist() == [-1, 0, 1]
    assert grid.chebyshev_lobatto_nodes(1).values.tolist() == [-1, 1]
    h = math.sqrt(2) / 2
    np.testing.assert_allclose(grid.chebyshev_lobatto_nodes(4).values, [-1, -h, 0, h, 1], atol=1e-15)


def test_first_kind_roots_examples():
    assert grid.chebyshev_first_kind_roots(1).values.tolist() == [0.0]
    np.testing.assert_allclose(grid.chebyshev_first_kind_roots(2).values,
                               [-math.cos(math.pi / 4), math.cos(math.pi / 4)], atol=1e-15)
    assert grid.chebyshev_first_kind_roots(3).values[1] == 0.0


@pytest.mark.parametrize("kind", [grid.chebyshev_lobatto_nodes, grid.chebyshev_first_kind_roots])
@pytest.mark.parametrize("m", [1, 2, 7, 16, 70])
def test_node_sets_ascending_in_interval(kind, m):
    v = kind(m).values
    assert np.all(np.diff(v) > 0)
    assert v.min() >= -1 and v.max() <= 1


def test_max_mock_degree_examples():
    assert grid.max_mock_degree(50) == 15
    assert grid.max_mock_degree(2) == 3
    assert grid.max_mock_degree(1000) == 70


def test_extract_mock_chebyshev_n50():
    mc = grid.extract_mock_chebyshev(grid.equispaced_nodes(50), 15)
    assert len(mc) == 16
    assert mc.values[0] == -1 and mc.values[-1] == 1
    assert len(set(mc.values.tolist())) == 16


def test_extract_mock_chebyshev_exact_grid_hit():
    # CL nodes of degree 2 are -1, 0, 1, all on the n=4 grid
    mc = grid.extract_mock_chebyshev(grid.equispaced_nodes(4), 2)
    assert mc.values.tolist() == [-1, 0, 1]
    assert mc.grid_indices.tolist() == [0, 2, 4]


def test_extract_mock_chebyshev_distance_n200():
    mc = grid.extract_mock_chebyshev(grid.equispaced_nodes(200), 15)
    cl = grid.chebyshev_lobatto_nodes(15).values
    assert np.all(np.abs(mc.values - cl) <= 1 / 200)


@pytest.mark.parametrize("n,m", sorted(COLLIDING))
def test_colliding_selection_is_reported(n, m):
    with pytest.raises(NonDistinctSelectionError):
        grid.extract_mock_chebyshev(grid.equispaced_nodes(n), m)


def test_no_collision_below_max_degree():
    for n in range(1, 400):
        eq = grid.equispaced_nodes(n)
        for m in range(1, grid.max_mock_degree(n)):
            grid.extract_mock_chebyshev(eq, m)


def test_extract_mock_chebyshev_too_large():
    with pytest.raises(DegreeTooLargeError):
        grid.extract_mock_chebyshev(grid.equispaced_nodes(50), 16)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 2000), data=st.data())
def test_mock_nodes_subset_and_close(n, data):
    m = data.draw(st.integers(1, grid.max_mock_degree(n)))
    eq = grid.equispaced_nodes(n)
    try:
        mc = grid.extract_mock_chebyshev(eq, m)
    except NonDistinctSelectionError:
        assert m == grid.max_mock_degree(n)
        return
    # bit-exact subset of the grid
    assert np.array_equal(eq.values[mc.grid_indices], mc.values)
    cl = grid.chebyshev_lobatto_nodes(m).values
    assert np.all(np.abs(mc.values - cl) <= 1.0 / n + 1e-15)


def test_concatenated_segments_n50():
    s = grid.concatenated_mock_segments(50, 15)
    assert len(s) == 15
    assert s.a[0] == -1 and s.b[-1] == 1
    assert np.array_equal(s.b[:-1], s.a[1:])
    assert sum(hi - lo for lo, hi in s.source_indices) == 50
    assert all(hi - lo >= 1 for lo, hi in s.source_indices)


def test_concatenated_segments_degenerate_aliasing():
    s = grid.concatenated_mock_segments(1, 1)
    assert s.a.tolist() == [-1] and s.b.tolist() == [1]


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 1500), data=st.data())
def test_concatenated_tiles_interval(n, data):
    m = data.draw(st.integers(1, grid.max_mock_degree(n)))
    try:
        s = grid.concatenated_mock_segments(n, m)
    except NonDistinctSelectionError:
        assert m == grid.max_mock_degree(n)
        return
    assert np.array_equal(s.b[:-1], s.a[1:])
    assert abs(s.lengths.sum() - 2.0) <= 1e-13
    x = grid.equispaced_nodes(n).values
    for (lo, hi), a, b in zip(s.source_indices, s.a, s.b):
        assert x[lo] == a and x[hi] == b


def test_quasi_nodal_left_rule_n50_m15():
    s = grid.quasi_nodal_segments(50, 15)
    assert len(s) == 15
    mid = 7  # middle root is 0 for odd m
    assert s.a[mid] == pytest.approx(-0.04, abs=1e-15) and s.b[mid] == 0.0


@pytest.mark.parametrize("n", [2, 4, 10, 50, 1000])
def test_quasi_nodal_m1_even_n(n):
    s = grid.quasi_nodal_segments(n, 1)
    assert s.b[0] == 0.0


def test_quasi_nodal_n50_m16():
    s = grid.quasi_nodal_segments(50, 16)
    assert len(s) == 16
    # two largest roots (paper order i=1, 2), stored ascending at the end
    np.testing.assert_allclose([s.a[-1], s.b[-1]], [0.96, 1.0], atol=1e-15)
    np.testing.assert_allclose([s.a[-2], s.b[-2]], [0.92, 0.96], atol=1e-15)


def test_quasi_nodal_collision_reported():
    with pytest.raises(NonDistinctSegmentsError) as exc:
        grid.quasi_nodal_segments(50, 17)
    assert exc.value.roots is not None


@settings(max_examples=80, deadline=None)
@given(n=st.integers(1, 2000), m=st.integers(1, 80))
def test_quasi_nodal_properties(n, m):
    try:
        s = grid.quasi_nodal_segments(n, m)
    except NonDistinctSegmentsError:
        # Lemma-style sufficient bound must never be the failing case
        assert n < 8 * m * m / math.pi**2
        return
    roots = grid.chebyshev_first_kind_roots(m).values
    assert np.all(np.abs(s.lengths - 2.0 / n) <= 1e-14)
    assert np.all((s.a <= roots) & (roots <= s.b))
    assert np.all(np.diff(s.a) > 0)


def test_perturb_zero_eps_identity():
    s = grid.chebyshev_lobatto_segments(10)
    p = grid.perturb_segments(s, 0.0, 3)
    assert np.array_equal(p.a, s.a) and np.array_equal(p.b, s.b)


def test_perturb_bounded_displacement():
    s = grid.chebyshev_lobatto_segments(12)
    p = grid.perturb_segments(s, 1e-6, 42)
    assert np.max(np.abs(p.a - s.a)) <= 1e-6
    assert np.max(np.abs(p.b - s.b)) <= 1e-6
    q = grid.perturb_segments(s, 1e-6, 42)
    assert np.array_equal(p.a, q.a)


def test_perturb_collapse_raises():
    s = grid.equispaced_segments(1000)
    with pytest.raises(DegenerateSegmentError):
        grid.perturb_segments(s, 0.5, 0)


@pytest.mark.parametrize("seed", range(100))
def test_perturbed_lobatto_remains_unisolvent(seed):
    from mockhisto.histo import lebesgue_constant

    m = 3 + seed % 10
    s = grid.chebyshev_lobatto_segments(m)
    lam = lebesgue_constant(s, 2001)
    eps = 0.5 / (lam * (m - 1) ** 2)
    p = grid.perturb_segments(s, eps, seed)
    G = build_gramian(p, m - 1).matrix
    assert np.linalg.matrix_rank(G) == m


def test_segment_rejects_degenerate():
    with pytest.raises(DegenerateSegmentError):
        grid.Segment(0.5, 0.5)
    with pytest.raises(DegenerateSegmentError):
        grid.SegmentSet.from_pairs([(0.0, 0.5), (0.7, 0.6)])


def test_constrained_degree_n50():
    assert grid.constrained_degree(50) == 22
    assert grid.constrained_degree(50, 16) == 23
