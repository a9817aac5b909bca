"""Conditional ceteris-paribus preference networks.

Build a net over finite-domain variables, validate it, and answer dominance
queries by searching for flipping sequences; prune hopeless queries up front,
export queries as STRIPS planning problems, and rank product catalogs by
dominance.
"""

from .dsl import (
    CatalogRow,
    ParseResult,
    SourceDiagnostic,
    parse_catalog,
    parse_cpnet,
    parse_outcome,
    parse_query,
    serialize_catalog,
    serialize_cpnet,
)
from .model import (
    IMPROVING,
    WORSENING,
    CPNet,
    CPNetError,
    Flip,
    FlipSequence,
    Outcome,
    ValidationReport,
    Variable,
    apply_flip,
    best_outcome,
    legal_flips,
    topological_order,
    validate,
    worst_outcome,
)
from .pareto import ParetoReport, pareto_front, sort_catalog
from .planning import (
    PlanningProblem,
    PlanReplayError,
    StripsOperator,
    export_planning_problem,
    plan_to_flip_sequence,
    render_planning_problem,
    solve_planning_problem,
    to_strips,
)
from .pruning import PruneResult, ValueGraph, forward_prune, value_graph
from .search import (
    BIDIRECTIONAL,
    BUDGET_EXHAUSTED,
    DOMINATES,
    NOT_DOMINATED,
    SearchConfig,
    SearchStats,
    SuffixSet,
    Verdict,
    all_outcomes,
    dominates,
    extend_suffix,
    fixed_suffix,
    oracle_closure,
    oracle_dominates,
    order_flips,
    verify_witness,
)

__all__ = [
    "BIDIRECTIONAL",
    "BUDGET_EXHAUSTED",
    "CatalogRow",
    "CPNet",
    "CPNetError",
    "DOMINATES",
    "Flip",
    "FlipSequence",
    "IMPROVING",
    "NOT_DOMINATED",
    "Outcome",
    "ParetoReport",
    "ParseResult",
    "PlanningProblem",
    "PlanReplayError",
    "PruneResult",
    "SearchConfig",
    "SearchStats",
    "SourceDiagnostic",
    "StripsOperator",
    "SuffixSet",
    "ValidationReport",
    "ValueGraph",
    "Variable",
    "Verdict",
    "WORSENING",
    "all_outcomes",
    "apply_flip",
    "best_outcome",
    "dominates",
    "export_planning_problem",
    "extend_suffix",
    "fixed_suffix",
    "forward_prune",
    "legal_flips",
    "oracle_closure",
    "oracle_dominates",
    "order_flips",
    "pareto_front",
    "parse_catalog",
    "parse_cpnet",
    "parse_outcome",
    "parse_query",
    "plan_to_flip_sequence",
    "render_planning_problem",
    "serialize_catalog",
    "serialize_cpnet",
    "solve_planning_problem",
    "sort_catalog",
    "to_strips",
    "topological_order",
    "validate",
    "value_graph",
    "verify_witness",
    "worst_outcome",
]
