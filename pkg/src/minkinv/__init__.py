"""Generalized inverses, decompositions, and orders in Minkowski space.

The ambient metric is G = diag(1, -1, ..., -1) and the adjoint of a square
complex matrix is A~ = G A* G.  The library computes the Minkowski, group,
Drazin, core-EP, m-core, and metric core-EP inverses, the plain and
metric-adapted index/rank splittings, and the m-core / metric core-EP
orders, exposing the residual of every defining equation.
"""
from .decomp import (
    CoreEPDecomp,
    MCoreEPDecomp,
    MetricBlocks,
    core_ep_decompose,
    extract_parts,
    m_core_ep_decompose,
    m_core_ep_parts_via_projection,
    metric_blocks,
)
from .errors import (
    DiagnosticError,
    DimensionMismatchError,
    MinkinvError,
    NotCM,
    NotGroupInvertible,
    NotInvertibleError,
    NotMCoreEPInvertible,
    NotMCoreInvertible,
    NotMinkowskiInvertible,
)
from .ginv import (
    InverseKind,
    InverseReport,
    core_ep_inverse,
    drazin_inverse,
    group_inverse,
    m_core_ep_exists,
    m_core_ep_inverse,
    m_core_ep_via_drazin,
    m_core_ep_via_parts,
    m_core_inverse,
    minkowski_inverse,
)
from .numlin import (
    MinkowskiMetric,
    Tolerances,
    matrix_index,
    minkowski_adjoint,
    numerical_rank,
)
from .order import (
    OrderCanonicalSpec,
    OrderVerdict,
    m_core_ep_leq,
    m_core_leq,
    order_pair,
    random_order_spec,
)
from .verify import (
    CanonicalCaseSpec,
    check_axioms,
    generate_case,
    oracle_m_core_ep,
    oracle_minkowski,
)

__version__ = "0.1.0"

__all__ = [
    "CanonicalCaseSpec",
    "CoreEPDecomp",
    "DiagnosticError",
    "DimensionMismatchError",
    "InverseKind",
    "InverseReport",
    "MCoreEPDecomp",
    "MetricBlocks",
    "MinkinvError",
    "MinkowskiMetric",
    "NotCM",
    "NotGroupInvertible",
    "NotInvertibleError",
    "NotMCoreEPInvertible",
    "NotMCoreInvertible",
    "NotMinkowskiInvertible",
    "OrderCanonicalSpec",
    "OrderVerdict",
    "Tolerances",
    "check_axioms",
    "core_ep_decompose",
    "core_ep_inverse",
    "drazin_inverse",
    "extract_parts",
    "generate_case",
    "group_inverse",
    "m_core_ep_decompose",
    "m_core_ep_exists",
    "m_core_ep_inverse",
    "m_core_ep_leq",
    "m_core_ep_parts_via_projection",
    "m_core_ep_via_drazin",
    "m_core_ep_via_parts",
    "m_core_inverse",
    "m_core_leq",
    "matrix_index",
    "metric_blocks",
    "minkowski_adjoint",
    "minkowski_inverse",
    "numerical_rank",
    "oracle_m_core_ep",
    "oracle_minkowski",
    "order_pair",
    "random_order_spec",
]
