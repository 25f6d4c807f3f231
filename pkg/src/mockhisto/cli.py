"""Command-line experiment harness.

Subcommands: table1, lebesgue-sweep, cond-sweep, error-sweep, fit, nodes,
means. Every command writes CSV (header row, LF endings, 17 significant
digits) or JSON to ``--out`` or stdout.

Exit codes: 0 success, 2 method-level failure in at least one row,
3 input error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import grid, histo, oracle
from .basis import mean_matrix
from .errors import HistoError, InputError, MethodError
from .histo import Method
from .linalg import condition_number_2

log = logging.getLogger("mockhisto")

EXIT_OK = 0
EXIT_METHOD = 2
EXIT_INPUT = 3

ALL_METHODS = [m.value for m in Method]
ALL_FUNCTIONS = [f.value for f in oracle.FunctionId]
TABLE_COLUMNS = {
    "full": "e_eq",
    "concatenated": "e_mc",
    "quasi-nodal": "e_mcf",
    "constrained": "e_mcf_hat",
}


@dataclass
class SweepConfig:
    n_values: list[int] = field(default_factory=lambda: list(range(50, 1001, 50)))
    methods: list[str] = field(default_factory=lambda: list(ALL_METHODS))
    functions: list[str] = field(default_factory=lambda: list(ALL_FUNCTIONS))
    fmt: str = "csv"
    grid_points: int = histo.DEFAULT_GRID_POINTS
    interval: str = "full"
    m: int | None = None
    m_quasi: int | None = None
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not self.n_values:
            raise InputError("n_values must be nonempty")
        if any(n < 1 for n in self.n_values):
            raise InputError("n values must be positive")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise InputError("n values must be strictly increasing")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise InputError(f"unknown method {m!r}")
        for f in self.functions:
            oracle.builtin(f)
        if self.fmt not in ("csv", "json"):
            raise InputError(f"unknown format {self.fmt!r}")
        if self.interval not in ("full", "right-half"):
            raise InputError(f"unknown interval {self.interval!r}")
        if self.grid_points < 1001:
            raise InputError("grid points must be at least 1001")

    def m_for(self, method: str, n: int) -> int:
        """Mock degree used by ``method`` at ``n`` (``--m-quasi`` covers quasi-nodal and constrained)."""
        base = self.m if self.m is not None else grid.max_mock_degree(n)
        if method in ("quasi-nodal", "constrained") and self.m_quasi is not None:
            return self.m_quasi
        return base


# --------------------------------------------------------------------------
# output


def fmt_num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        raise MethodError("NaN reached output")
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            raise MethodError("NaN reached output")
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_json_value(x) for x in v]
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([_json_value({c: r.get(c) for c in columns}) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt_num(r.get(c)) for c in columns) + "\n")
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _error_marker(exc: Exception) -> str:
    kind = getattr(exc, "kind", type(exc).__name__)
    return f"error:{kind}"


# --------------------------------------------------------------------------
# experiment kernels (module level so worker processes can pickle them)

_data_cache: dict[tuple[str, int], histo.AveragesVector] = {}


def equispaced_data(fid: str, n: int) -> histo.AveragesVector:
    key = (fid, n)
    if key not in _data_cache:
        _data_cache[key] = oracle.segment_means(oracle.builtin(fid), grid.equispaced_segments(n))
    return _data_cache[key]


def _run_cell(args) -> dict:
    fid, n, method, m, grid_points, interval = args
    row = {"function": fid, "n": n, "method": method}
    try:
        f = oracle.builtin(fid)
        rep = histo.run_method(method, equispaced_data(fid, n), m=m, reference=f,
                               grid_points=grid_points, interval=interval)
        row.update(max_error=rep.max_err, cond=rep.cond, residual=rep.residual,
                   m=rep.m, r=rep.r)
    except MethodError as exc:
        row["error"] = _error_marker(exc)
    return row


def _cond_cell(args) -> dict:
    n, method, m = args
    row = {"n": n, "method": method, "m": m}
    try:
        data = histo.AveragesVector(np.ones(n), grid.equispaced_segments(n))
        rep = histo.run_method(method, data, m=m)
        row["cond"] = rep.cond
    except MethodError as exc:
        row["error"] = _error_marker(exc)
    return row


def _map(fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def table1_rows(cfg: SweepConfig) -> list[dict]:
    n = cfg.n_values[0]
    tasks = [(fid, n, meth, cfg.m_for(meth, n), cfg.grid_points, cfg.interval)
             for fid in cfg.functions for meth in cfg.methods]
    return _map(_run_cell, tasks, cfg.jobs)


def error_sweep_rows(cfg: SweepConfig) -> list[dict]:
    tasks = [(fid, n, meth, cfg.m_for(meth, n), cfg.grid_points, cfg.interval)
             for fid in cfg.functions for n in cfg.n_values for meth in cfg.methods]
    rows = _map(_run_cell, tasks, cfg.jobs)
    order = {m: i for i, m in enumerate(ALL_METHODS)}
    return sorted(rows, key=lambda r: (r["function"], r["n"], order[r["method"]]))


def cond_sweep_rows(cfg: SweepConfig) -> list[dict]:
    tasks = [(n, meth, cfg.m_for(meth, n)) for n in cfg.n_values for meth in cfg.methods]
    rows = _map(_cond_cell, tasks, cfg.jobs)
    order = {m: i for i, m in enumerate(ALL_METHODS)}
    return sorted(rows, key=lambda r: (r["n"], order[r["method"]]))


LEBESGUE_METHODS = ("chebyshev-lobatto", "concatenated", "quasi-nodal")


def theorem_n(method: str, m: int, alpha: float = 0.5, c_cl: float = 2.0) -> int:
    """Smallest ``n`` meeting the logarithmic-growth hypotheses for ``method``."""
    if method == "concatenated":
        return max(1, math.ceil(c_cl / alpha * m * m * (math.log(m) + math.pi / 2)))
    if method == "quasi-nodal":
        return max(1, math.ceil(2.0 / alpha * m * m * (2.0 / math.pi * math.log(m) + 1.0)))
    raise InputError(f"no theorem bound for {method!r}")


def lebesgue_bound(method: str, m: int, alpha: float = 0.5, c_cl: float = 2.0) -> float:
    if method == "chebyshev-lobatto":
        return c_cl * (math.log(m) + math.pi / 2)
    if method == "concatenated":
        return c_cl / (1 - alpha) * (math.log(m) + math.pi / 2)
    return (2.0 / math.pi * math.log(m) + 1.0) / (1 - alpha)


def _lebesgue_cell(args) -> dict:
    m, n, method, grid_points, alpha = args
    row = {"m": m, "n": n, "method": method}
    try:
        if method == "chebyshev-lobatto":
            segs = grid.chebyshev_lobatto_segments(m)
        elif method == "concatenated":
            segs = grid.concatenated_mock_segments(n, m)
        else:
            segs = grid.quasi_nodal_segments(n, m)
        row["lebesgue"] = histo.lebesgue_constant(segs, grid_points)
        row["bound"] = lebesgue_bound(method, m, alpha)
    except HistoError as exc:
        row["error"] = _error_marker(exc)
    return row


def lebesgue_sweep_rows(m_values, methods, n_rule: str = "square", n_explicit=None,
                        alpha: float = 0.5, grid_points: int = histo.DEFAULT_GRID_POINTS,
                        jobs: int = 1) -> list[dict]:
    tasks = []
    for m in m_values:
        for meth in methods:
            if meth not in LEBESGUE_METHODS:
                raise InputError(f"unknown Lebesgue method {meth!r}")
            if meth == "chebyshev-lobatto":
                tasks.append((m, None, meth, grid_points, alpha))
                continue
            if n_rule == "square":
                ns = [m * m]
            elif n_rule == "theorem":
                ns = [theorem_n(meth, m, alpha)]
            elif n_rule == "explicit":
                if not n_explicit:
                    raise InputError("--n-rule explicit needs --n")
                ns = list(n_explicit)
            else:
                raise InputError(f"unknown n rule {n_rule!r}")
            tasks.extend((m, n, meth, grid_points, alpha) for n in ns)
    rows = _map(_lebesgue_cell, tasks, jobs)
    order = {m: i for i, m in enumerate(LEBESGUE_METHODS)}
    return sorted(rows, key=lambda r: (r["m"], order[r["method"]], r["n"] or 0))


def fit_report(path, method: str, m: int | None = None, grid_points: int = histo.DEFAULT_GRID_POINTS):
    segs, data = oracle.ingest_averages(path)
    if method not in ALL_METHODS:
        raise InputError(f"unknown method {method!r}")
    if method == "full" and segs.kind is not grid.SegmentKind.EQUISPACED_CHAIN:
        coeffs, res, G = histo._histopolate(segs, data.values)
        rep = histo.MethodReport(histo.ChebPoly(coeffs), Method.FULL_EQUISPACED,
                                 condition_number_2(G), res, segs, n=len(segs))
    else:
        if segs.kind is not grid.SegmentKind.EQUISPACED_CHAIN:
            raise InputError(f"method {method!r} needs an equispaced chain of segments")
        rep = histo.run_method(method, data, m=m)
    fitted = mean_matrix(segs, rep.poly.degree) @ rep.poly.coeffs
    out = {
        "method": rep.method.value,
        "degree": rep.poly.degree,
        "coeffs": rep.poly.coeffs,
        "cond": rep.cond,
        "residual": rep.residual,
        "data_misfit": float(np.max(np.abs(fitted - data.values))),
        "n_segments": len(segs),
        "segment_kind": segs.kind.value,
        "m": rep.m,
        "r": rep.r,
    }
    if "constraint_residual" in rep.extra:
        out["constraint_residual"] = rep.extra["constraint_residual"]
    return out


def node_rows(kind: str, n: int | None, m: int | None) -> list[dict]:
    def need(name, v):
        if v is None:
            raise InputError(f"--{name} is required for kind {kind!r}")
        return v

    if kind == "equispaced":
        vals = grid.equispaced_nodes(need("n", n)).values
    elif kind == "chebyshev-lobatto":
        vals = grid.chebyshev_lobatto_nodes(need("m", m)).values
    elif kind == "first-kind":
        vals = grid.chebyshev_first_kind_roots(need("m", m)).values
    elif kind == "mock-chebyshev":
        n = need("n", n)
        mc = grid.extract_mock_chebyshev(grid.equispaced_nodes(n), m or grid.max_mock_degree(n))
        return [{"index": int(i), "grid_index": int(g), "x": float(x)}
                for i, (g, x) in enumerate(zip(mc.grid_indices, mc.values))]
    elif kind in ("concatenated", "quasi-nodal"):
        n = need("n", n)
        m = m or grid.max_mock_degree(n)
        segs = (grid.concatenated_mock_segments(n, m) if kind == "concatenated"
                else grid.quasi_nodal_segments(n, m))
        return [{"index": i, "a": float(a), "b": float(b), "first": lo, "stop": hi}
                for i, (a, b, (lo, hi)) in enumerate(zip(segs.a, segs.b, segs.source_indices))]
    else:
        raise InputError(f"unknown node kind {kind!r}")
    return [{"index": i, "x": float(x)} for i, x in enumerate(vals)]


# --------------------------------------------------------------------------
# argument parsing


def parse_int_list(text: str) -> list[int]:
    """``"50"``, ``"50,100,150"`` or inclusive range ``"50:50:1000"``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) != 3 or parts[1] <= 0:
                raise ValueError
            start, step, stop = parts
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _csv_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common(p, n_default: str | None):
    p.add_argument("--n", type=parse_int_list, default=parse_int_list(n_default) if n_default else None,
                   help="segment counts: N, N1,N2,... or START:STEP:STOP")
    p.add_argument("--m", type=int, default=None, help="mock degree (default floor(pi*sqrt(n/2)))")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--grid-points", type=int, default=histo.DEFAULT_GRID_POINTS)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mockhisto", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table1", help="max errors of all methods for f1-f6 at one n")
    _common(p, "50")
    p.add_argument("--m-quasi", type=int, default=None,
                   help="mock degree for quasi-nodal and constrained columns (default: --m)")
    p.add_argument("--methods", type=_csv_list, default=list(ALL_METHODS))
    p.add_argument("--functions", type=_csv_list, default=list(ALL_FUNCTIONS))
    p.add_argument("--interval", choices=("full", "right-half"), default="full")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("error-sweep", help="max error versus n")
    _common(p, "50:50:1000")
    p.add_argument("--m-quasi", type=int, default=None)
    p.add_argument("--methods", type=_csv_list, default=["concatenated", "quasi-nodal", "constrained"])
    p.add_argument("--functions", type=_csv_list, default=list(ALL_FUNCTIONS))
    p.add_argument("--interval", choices=("full", "right-half"), default="full")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("cond-sweep", help="condition number versus n")
    _common(p, "50:50:1000")
    p.add_argument("--m-quasi", type=int, default=None)
    p.add_argument("--methods", type=_csv_list, default=list(ALL_METHODS))
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("lebesgue-sweep", help="segmental Lebesgue constants versus m")
    _common(p, None)
    p.set_defaults(m=None)
    p.add_argument("--m-values", type=parse_int_list, default=parse_int_list("1:1:30"))
    p.add_argument("--n-rule", choices=("square", "theorem", "explicit"), default="square")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--methods", type=_csv_list, default=list(LEBESGUE_METHODS))
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("fit", help="fit a polynomial to an a,b,mean CSV file")
    p.add_argument("path")
    p.add_argument("--method", choices=ALL_METHODS, default="quasi-nodal")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("nodes", help="dump node or segment sets")
    p.add_argument("--kind", default="mock-chebyshev",
                   choices=("equispaced", "chebyshev-lobatto", "first-kind", "mock-chebyshev",
                            "concatenated", "quasi-nodal"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("means", help="write equispaced segment means of a test function")
    p.add_argument("--function", default="f4")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--quadrature", action="store_true", help="ignore exact antiderivatives")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args) -> SweepConfig:
    return SweepConfig(
        n_values=args.n,
        methods=getattr(args, "methods", list(ALL_METHODS)),
        functions=getattr(args, "functions", list(ALL_FUNCTIONS)),
        fmt=args.format,
        grid_points=args.grid_points,
        interval=getattr(args, "interval", "full"),
        m=args.m,
        m_quasi=getattr(args, "m_quasi", None),
        seed=args.seed,
        jobs=getattr(args, "jobs", 1),
    )


def _status(rows) -> int:
    return EXIT_METHOD if any("error" in r for r in rows) else EXIT_OK


def cmd_table1(args) -> int:
    cfg = _config(args)
    if len(cfg.n_values) != 1:
        raise InputError("table1 takes a single --n")
    rows = table1_rows(cfg)
    if cfg.fmt == "json":
        emit(render(rows, ["function", "method", "max_error", "cond", "residual"], "json"), args.out)
    else:
        cols = [TABLE_COLUMNS[m] for m in cfg.methods]
        wide = []
        for fid in cfg.functions:
            line = {"function": fid}
            for r in rows:
                if r["function"] == fid:
                    line[TABLE_COLUMNS[r["method"]]] = r.get("error") or r["max_error"]
            wide.append(line)
        emit(render(wide, ["function"] + cols, "csv"), args.out)
    return _status(rows)


def cmd_error_sweep(args) -> int:
    cfg = _config(args)
    rows = error_sweep_rows(cfg)
    emit(render(rows, ["function", "n", "method", "max_error", "error"], cfg.fmt), args.out)
    return _status(rows)


def cmd_cond_sweep(args) -> int:
    cfg = _config(args)
    rows = cond_sweep_rows(cfg)
    emit(render(rows, ["n", "method", "cond", "error"], cfg.fmt), args.out)
    return _status(rows)


def cmd_lebesgue_sweep(args) -> int:
    m_values = [args.m] if args.m is not None else args.m_values
    rows = lebesgue_sweep_rows(m_values, args.methods, args.n_rule, args.n, args.alpha,
                               args.grid_points, args.jobs)
    emit(render(rows, ["m", "n", "method", "lebesgue", "bound", "error"], args.format), args.out)
    return _status(rows)


def cmd_fit(args) -> int:
    report = fit_report(args.path, args.method, args.m)
    emit(json.dumps(_json_value(report), indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_nodes(args) -> int:
    rows = node_rows(args.kind, args.n, args.m)
    emit(render(rows, list(rows[0].keys()), args.format), args.out)
    return EXIT_OK


def cmd_means(args) -> int:
    f = oracle.builtin(args.function)
    data = oracle.segment_means(f, grid.equispaced_segments(args.n), not args.quadrature)
    emit(oracle.export_averages(data), args.out)
    return EXIT_OK


COMMANDS = {
    "table1": cmd_table1,
    "error-sweep": cmd_error_sweep,
    "cond-sweep": cmd_cond_sweep,
    "lebesgue-sweep": cmd_lebesgue_sweep,
    "fit": cmd_fit,
    "nodes": cmd_nodes,
    "means": cmd_means,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.info("command=%s seed=%d", args.command, args.seed)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"mockhisto: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MethodError as exc:
        print(f"mockhisto: method failure ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_METHOD


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
