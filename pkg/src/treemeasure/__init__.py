"""Exact uniform measures of tree languages, with a Monte-Carlo cross-check."""

from .trees import (
    Alphabet,
    CompleteTree,
    FiniteTree,
    basic_set_measure,
    enumerate_complete_trees,
    prefix_of_height,
    sample_complete_tree,
    tree_distance,
)
from .patterns import (
    FirmDecomposition,
    HomWitness,
    Pattern,
    check_hom,
    firm_decomposition,
    is_satisfiable_pattern,
    parse_pattern,
    verify_hom,
)
from .logic import (
    BasicLocalSentence,
    LocalFormula,
    RootCheck,
    eval_fo,
    eval_reduced,
    is_root_formula,
    is_satisfiable_local,
    parse_formula,
    reduce_basic_local,
)
from .measure import (
    MeasureResult,
    bccq_measure,
    bccq_positive,
    bccq_reduce,
    count_models,
    fo_local_measure,
    pattern_measure,
    pattern_positive,
)
from .analytic import (
    IntPolynomial,
    PathLangSpec,
    iterate_recurrence,
    path_language_measure,
    rational_root_check,
    solve_fixed_point,
)
from .estimator import (
    Estimate,
    estimate_event,
    estimate_path_truncation,
    estimate_subtree_occurrence,
)

__all__ = [name for name in dir() if not name.startswith("_")]
