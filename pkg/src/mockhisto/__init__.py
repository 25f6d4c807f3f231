"""Mock-Chebyshev histopolation.

Reconstruct a polynomial from mean values of a function over equispaced
segments of [-1, 1], selecting or concatenating segments so that the
reconstruction stays well conditioned.
"""

from ._core import BACKEND
from .basis import ChebPoly, antiderivative_T, eval_poly, eval_T, mean_matrix, segment_average_T
from .errors import HistoError, InputError, MethodError
from .grid import (
    NodeSet,
    Segment,
    SegmentKind,
    SegmentSet,
    chebyshev_first_kind_roots,
    chebyshev_lobatto_nodes,
    chebyshev_lobatto_segments,
    concatenated_mock_segments,
    constrained_degree,
    equispaced_nodes,
    equispaced_segments,
    extract_mock_chebyshev,
    max_mock_degree,
    perturb_segments,
    quasi_nodal_segments,
)
from .histo import (
    AveragesVector,
    Method,
    MethodReport,
    build_gramian,
    histopolate,
    lagrange_basis,
    lebesgue_constant,
    max_error,
    method_concatenated,
    method_constrained,
    method_full_equispaced,
    method_quasi_nodal,
    run_method,
)
from .linalg import KKTSystem, condition_number_2, lu_solve, solve_kkt
from .oracle import builtin, export_averages, ingest_averages, segment_means

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
