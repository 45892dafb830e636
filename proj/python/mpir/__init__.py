# Copyright (c) 2026 mpir contributors
# SPDX-License-Identifier: Apache-2.0
"""Mixed precision iterative refinement.

Dense systems are factored in a low precision (single or half), then the
solution is refined back to full working precision accuracy, optionally with
Krylov-corrected steps when the factors alone are too weak.
"""

from ._core import (
    DimensionMismatch,
    Factorization,
    InvalidConfig,
    InvalidParameter,
    NonFiniteResult,
    NotConverged,
    OverflowDetected,
    SingularPivot,
    __version__,
    bench,
    bench_csv,
    build_operator,
    greens_matrix,
    greens_problem,
    machine_eps,
    solve,
    unit_roundoff,
)

__all__ = [
    "DimensionMismatch",
    "Factorization",
    "InvalidConfig",
    "InvalidParameter",
    "NonFiniteResult",
    "NotConverged",
    "OverflowDetected",
    "SingularPivot",
    "__version__",
    "bench",
    "bench_csv",
    "build_operator",
    "greens_matrix",
    "greens_problem",
    "machine_eps",
    "solve",
    "unit_roundoff",
]
