"""Kernel dispatch: the Cython extension when importable, numpy otherwise.

Set ``MOCKHISTO_PURE=1`` in the environment to force the fallback.
"""

from __future__ import annotations

import os
import warnings

from . import _fallback

if os.environ.get("MOCKHISTO_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError as exc:  # pragma: no cover - depends on build
        warnings.warn(
            f"mockhisto: compiled kernels unavailable ({exc}); using numpy fallback",
            RuntimeWarning,
            stacklevel=2,
        )
        _impl = _fallback
        BACKEND = "python"

chebval = _impl.chebval
cheb_vander = _impl.cheb_vander
segment_means = _impl.segment_means
abs_row_sums = _impl.abs_row_sums
lu_factor = _impl.lu_factor
lu_solve = _impl.lu_solve

__all__ = [
    "BACKEND",
    "chebval",
    "cheb_vander",
    "segment_means",
    "abs_row_sums",
    "lu_factor",
    "lu_solve",
]
