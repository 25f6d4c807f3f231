"""Compare the compiled kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--format csv|json]

Each kernel is timed on problem sizes typical of the experiments (Table-1
and sweep sizes); the best of ``--repeat`` runs is reported along with the
maximum absolute difference between the two backends.
"""

from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from mockhisto import _fallback, grid
from mockhisto.basis import mean_matrix

try:
    from mockhisto import _kernels
except ImportError:
    _kernels = None


def _cases(rng):
    x = np.linspace(-1.0, 1.0, 10001)
    coeffs = rng.normal(size=70)
    basis = rng.normal(size=(70, 70))
    s = grid.equispaced_segments(1000)
    A = mean_matrix(grid.concatenated_mock_segments(1000, 70), 69)
    big = rng.normal(size=(300, 300))
    rhs = rng.normal(size=300)

    def lu(impl, M):
        lu_, perm, _ = impl.lu_factor(M.copy(), 1e-300)
        return impl.lu_solve(lu_, perm, rhs[: M.shape[0]])

    return {
        "chebval (deg 69, 10001 pts)": lambda impl: impl.chebval(x, coeffs),
        "segment_means (1000 segs, deg 69)": lambda impl: impl.segment_means(s.a, s.b, 69),
        "abs_row_sums (70 polys, 10001 pts)": lambda impl: impl.abs_row_sums(x, basis),
        "lu factor+solve (70x70 Gramian)": lambda impl: lu(impl, A),
        "lu factor+solve (300x300 random)": lambda impl: lu(impl, big),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    rows = []
    for name, fn in _cases(rng).items():
        t = {}
        for label, impl in (("cython", _kernels), ("python", _fallback)):
            number = 3
            t[label] = min(timeit.repeat(lambda: fn(impl), number=number, repeat=args.repeat)) / number
        diff = float(np.max(np.abs(np.asarray(fn(_kernels)) - np.asarray(fn(_fallback)))))
        rows.append({"kernel": name, "cython_s": t["cython"], "python_s": t["python"],
                     "speedup": t["python"] / t["cython"], "max_abs_diff": diff})
    if args.format == "json":
        print(json.dumps(rows, indent=1))
    else:
        print("kernel,cython_s,python_s,speedup,max_abs_diff")
        for r in rows:
            print(f"{r['kernel']},{r['cython_s']:.3e},{r['python_s']:.3e},{r['speedup']:.1f},"
                  f"{r['max_abs_diff']:.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
