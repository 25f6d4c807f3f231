import numpy as np
import pytest
from scipy.linalg import null_space
from scipy.stats import ortho_group

from mockhisto import grid
from mockhisto.errors import SingularKKTError, SingularMatrixError
from mockhisto.histo import build_gramian
from mockhisto.linalg import (
    KKTSystem,
    LUFactorization,
    condition_number_2,
    lu_solve,
    relative_residual,
    solve_kkt,
)


def test_lu_identity():
    b = np.array([3.0, -1.0, 2.5])
    assert np.array_equal(lu_solve(np.eye(3), b), b)


def test_lu_diagonal():
    np.testing.assert_allclose(lu_solve([[2, 0], [0, 4]], [2, 8]), [1, 2])


def test_lu_random_construct_then_solve():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(20, 20))
    x = rng.normal(size=20)
    got = lu_solve(A, A @ x)
    np.testing.assert_allclose(got, x, rtol=1e-9, atol=1e-9 * np.max(np.abs(x)))
    assert relative_residual(A, got, A @ x) <= 1e-10


def test_lu_needs_pivoting():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(lu_solve(A, [2.0, 3.0]), [3.0, 2.0])


def test_lu_singular():
    with pytest.raises(SingularMatrixError):
        lu_solve([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])


def test_lu_multiple_rhs():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(6, 6))
    X = LUFactorization(A).solve(np.eye(6))
    np.testing.assert_allclose(A @ X, np.eye(6), atol=1e-12)


def test_lu_hilbert_no_error():
    n = 14
    H = 1.0 / (np.arange(n)[:, None] + np.arange(n)[None, :] + 1.0)
    x = lu_solve(H, np.ones(n))
    assert np.all(np.isfinite(x))


def test_cond_examples():
    assert condition_number_2(np.eye(4)) == pytest.approx(1.0)
    assert condition_number_2(np.diag([10.0, 0.1])) == pytest.approx(100.0)


def test_cond_equispaced_gramian_n50():
    G = build_gramian(grid.equispaced_segments(50), 49).matrix
    assert condition_number_2(G) > 1e12


def test_cond_singular_is_inf():
    assert condition_number_2(np.array([[1.0, 0.0], [0.0, 0.0]])) == float("inf")


@pytest.mark.parametrize("seed", range(10))
def test_cond_orthogonal_is_one(seed):
    Q = ortho_group.rvs(8, random_state=seed)
    assert condition_number_2(3.7 * Q) == pytest.approx(1.0, rel=1e-6)
    rng = np.random.default_rng(seed)
    assert condition_number_2(rng.normal(size=(8, 8))) >= 1.0


def test_kkt_fully_constrained():
    rng = np.random.default_rng(2)
    B = rng.normal(size=(4, 4))
    G = B @ B.T + 4 * np.eye(4)
    C = rng.normal(size=(4, 4))
    d = rng.normal(size=4)
    a, z = solve_kkt(KKTSystem(G, C, rng.normal(size=4), d))
    np.testing.assert_allclose(a, np.linalg.solve(C, d), rtol=1e-10)


def test_kkt_unconstrained():
    rng = np.random.default_rng(3)
    B = rng.normal(size=(5, 5))
    G = B @ B.T + np.eye(5)
    c = rng.normal(size=5)
    a, z = solve_kkt(KKTSystem(G, np.zeros((0, 5)), c, np.zeros(0)))
    assert z.size == 0
    np.testing.assert_allclose(a, np.linalg.solve(G, c), rtol=1e-10)


def test_kkt_small_case_against_null_space_method():
    G = np.array([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]])
    C = np.array([[1.0, 2.0, -1.0]])
    c = np.array([1.0, -2.0, 0.5])
    d = np.array([0.7])
    a, z = solve_kkt(KKTSystem(G, C, c, d))
    # minimise 1/2 a^T G a - c^T a subject to C a = d via a = a0 + Z y
    a0 = np.linalg.lstsq(C, d, rcond=None)[0]
    Z = null_space(C)
    y = np.linalg.solve(Z.T @ G @ Z, Z.T @ (c - G @ a0))
    np.testing.assert_allclose(a, a0 + Z @ y, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(G @ a + C.T @ z, c, atol=1e-12)


def test_kkt_matrix_symmetric():
    rng = np.random.default_rng(4)
    B = rng.normal(size=(6, 6))
    k = KKTSystem(B @ B.T, rng.normal(size=(2, 6)), np.ones(6), np.ones(2))
    M = k.matrix()
    assert M.shape == (8, 8)
    np.testing.assert_allclose(M, M.T, rtol=1e-12)


def test_kkt_rank_deficient_constraints():
    G = np.eye(3)
    C = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0]])
    with pytest.raises(SingularKKTError):
        solve_kkt(KKTSystem(G, C, np.zeros(3), np.zeros(2)))


def test_kkt_random_instances_constraint_residual():
    rng = np.random.default_rng(5)
    for _ in range(100):
        r = int(rng.integers(1, 41))
        m = int(rng.integers(0, min(r, 20) + 1))
        N = rng.normal(size=(r + 5, r))
        C = rng.normal(size=(m, r))
        d = rng.normal(size=m)
        a, _ = solve_kkt(KKTSystem(2 * N.T @ N, C, 2 * N.T @ rng.normal(size=r + 5), d))
        if m:
            assert np.max(np.abs(C @ a - d)) <= 1e-9 * (1 + np.max(np.abs(d)))
