"""The compiled kernels and the numpy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as npcheb

from mockhisto import _core, _fallback

try:
    from mockhisto import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

BACKENDS = [pytest.param(_fallback, id="python")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="cython"))

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def test_backend_reported():
    assert _core.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", BACKENDS)
def test_chebval_against_numpy(impl):
    rng = np.random.default_rng(0)
    c = rng.normal(size=31)
    x = np.linspace(-1, 1, 513)
    np.testing.assert_allclose(impl.chebval(x, c), npcheb.chebval(x, c), atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_cheb_vander_against_numpy(impl):
    x = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(impl.cheb_vander(x, 12), npcheb.chebvander(x, 12), atol=1e-13)


@pytest.mark.parametrize("impl", BACKENDS)
def test_segment_means_against_numpy_integration(impl):
    a = np.array([-1.0, -0.3, 0.2])
    b = np.array([-0.3, 0.2, 1.0])
    M = impl.segment_means(a, b, 9)
    for k in range(10):
        c = np.zeros(k + 1)
        c[k] = 1
        I = npcheb.chebint(c)
        np.testing.assert_allclose(M[:, k], (npcheb.chebval(b, I) - npcheb.chebval(a, I)) / (b - a),
                                   atol=1e-14)


@pytest.mark.parametrize("impl", BACKENDS)
def test_lu_roundtrip(impl):
    rng = np.random.default_rng(1)
    A = rng.normal(size=(15, 15))
    lu, perm, bad = impl.lu_factor(A.copy(), 1e-300)
    assert bad == -1
    # kernels take one right-hand side at a time
    for j in range(15):
        e = np.zeros(15)
        e[j] = 1.0
        x = impl.lu_solve(lu, perm, e)
        np.testing.assert_allclose(A @ x, e, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_lu_reports_singular_column(impl):
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    _, _, bad = impl.lu_factor(A, 1e-300)
    assert bad == 1


@needs_ext
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), deg=st.integers(0, 60), npts=st.integers(1, 300))
def test_parity_random(seed, deg, npts):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=deg + 1)
    x = rng.uniform(-1, 1, npts)
    np.testing.assert_allclose(_kernels.chebval(x, c), _fallback.chebval(x, c), rtol=1e-12, atol=1e-12)
    a, b = np.sort(rng.uniform(-1, 1, (2, npts)), axis=0)
    b = np.maximum(b, a + 1e-3)
    np.testing.assert_allclose(_kernels.segment_means(a, b, deg), _fallback.segment_means(a, b, deg),
                               rtol=1e-12, atol=1e-12)
    C = rng.normal(size=(4, deg + 1))
    np.testing.assert_allclose(_kernels.abs_row_sums(x, C), _fallback.abs_row_sums(x, C), rtol=1e-12)


@needs_ext
def test_parity_lu_bitwise():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(30, 30))
    r = rng.normal(size=30)
    lu1, p1, _ = _kernels.lu_factor(A.copy(), 1e-300)
    lu2, p2, _ = _fallback.lu_factor(A.copy(), 1e-300)
    assert np.array_equal(np.asarray(p1), np.asarray(p2))
    np.testing.assert_allclose(_kernels.lu_solve(lu1, p1, r), _fallback.lu_solve(lu2, p2, r), rtol=1e-10)


def test_pure_mode_env():
    out = subprocess.run(
        [sys.executable, "-c", "import mockhisto._core as c; print(c.BACKEND)"],
        env={**os.environ, "MOCKHISTO_PURE": "1"},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
