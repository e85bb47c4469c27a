"""Multicast rekeying hierarchies: exact evaluation, construction, benchmarks."""

from .errors import (
    BruteForceCapError,
    CostOverflowError,
    HierarchyError,
    InfeasibleError,
    KhierError,
    NetworkError,
    OracleUndefinedError,
    ParseError,
)
from .model import (
    CostBreakdown,
    Hierarchy,
    Instance,
    Violation,
    combine,
    eval_cost_member,
    eval_cost_total,
    graft,
    hierarchy_ok,
    hierarchy_weight,
    leaf,
    validate_hierarchy,
)
from .multicast import (
    GraphOracle,
    LastParams,
    Metric,
    RoutingNetwork,
    SpanningTree,
    TableOracle,
    TreeOracle,
    UniformOracle,
    build_last,
    graph_multicast_cost,
    metric_closure,
    mst_of_metric,
    table_multicast_cost,
    tree_multicast_cost,
)
from .exact import (
    BruteForceConfig,
    brute_force_opt,
    optimal_hierarchy,
    uniform_optimal_build,
    uniform_optimal_cost_f,
    weighted_lower_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")]
