"""Exact-measure pipelines: patterns, Boolean combinations, local sentences.

Measures are fractions of complete trees at a determining depth D: once a
reduced rooted object is fixed, its truth on an infinite tree depends only
on the prefix of height D, so the measure is satisfying_count(D) divided by
|alphabet| ** (2**(D+1) - 1).

Counting walks the heap-ordered label array depth-first and asks predicates
for a three-valued verdict on the partial labelling; a True/False answer at
a prefix settles every completion at once, which keeps conservative depths
(where the full enumeration would be astronomically large) tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import combo
from .errors import (
    DEFAULT_MAX_SEARCH_NODES,
    DEFAULT_MAX_TREES,
    BudgetExceededError,
    PreconditionError,
)
from .logic import BasicLocalSentence, eval_reduced, eval_reduced3, reduce_basic_local
from .patterns import Pattern, check_hom, hom_partial, root_component_pattern, is_satisfiable_pattern
from .trees import Alphabet, CompleteTree, enumerate_complete_trees, node_count


@dataclass(frozen=True)
class MeasureResult:
    value: Fraction
    pipeline: str
    determining_depth: int
    satisfying_count: Optional[int] = None
    total_count: Optional[int] = None
    notes: str = ""


# Counting.


class PatternPredicate:
    """Tree predicate: does the pattern map homomorphically into the tree?"""

    def __init__(self, pattern: Pattern):
        self.pattern = pattern

    def __call__(self, t: CompleteTree) -> bool:
        return check_hom(self.pattern, t) is not None

    def partial_eval(self, height: int, labels: list) -> Optional[bool]:
        return hom_partial(self.pattern, height, labels)


class ReducedPredicate:
    """Tree predicate for a reduced sentence (Top, Bottom, or root check)."""

    def __init__(self, sentence):
        self.sentence = sentence

    def __call__(self, t: CompleteTree) -> bool:
        return eval_reduced(t, self.sentence)

    def partial_eval(self, height: int, labels: list) -> Optional[bool]:
        return eval_reduced3(height, labels, self.sentence)


class ComboPredicate:
    """Boolean combination whose leaves are predicates with partial support."""

    def __init__(self, tree: combo.Combo, leaf_predicate):
        self.tree = combo.map_leaves(tree, lambda v: combo.Leaf(leaf_predicate(v)))

    def __call__(self, t: CompleteTree) -> bool:
        return combo.eval_combo(self.tree, lambda pred: pred(t))

    def partial_eval(self, height: int, labels: list) -> Optional[bool]:
        return combo.eval_combo3(self.tree, lambda pred: pred.partial_eval(height, labels))


def count_models(
    predicate,
    height: int,
    alphabet: Alphabet,
    max_evals: int = DEFAULT_MAX_TREES,
) -> int:
    """Exact number of height-`height` complete trees satisfying the predicate.

    Accepts either a plain callable on complete trees (checked by full
    enumeration) or an object that also offers partial_eval(height, labels)
    returning True/False/None on partially labelled trees, in which case
    undetermined prefixes are the only ones expanded.  The budget counts
    predicate evaluations either way.
    """
    if hasattr(predicate, "partial_eval"):
        count, _ = _count_partial(predicate, height, alphabet, max_evals, stop_early=False)
        return count
    count = 0
    for t in enumerate_complete_trees(height, alphabet, max_trees=max_evals):
        if predicate(t):
            count += 1
    return count


def find_model(
    predicate,
    height: int,
    alphabet: Alphabet,
    max_evals: int = DEFAULT_MAX_TREES,
) -> Optional[CompleteTree]:
    """First height-`height` tree satisfying the predicate, in canonical order."""
    if hasattr(predicate, "partial_eval"):
        _, model = _count_partial(predicate, height, alphabet, max_evals, stop_early=True)
        return model
    for t in enumerate_complete_trees(height, alphabet, max_trees=max_evals):
        if predicate(t):
            return t
    return None


def _count_partial(predicate, height, alphabet, max_evals, stop_early):
    n = node_count(height)
    k = len(alphabet)
    syms = alphabet.symbols
    labels: list = [None] * n
    evals = 0
    model: list[Optional[CompleteTree]] = [None]

    def rec(i):
        nonlocal evals
        evals += 1
        if evals > max_evals:
            raise BudgetExceededError(
                f"model counting at height {height}", required=evals, budget=max_evals
            )
        verdict = predicate.partial_eval(height, labels)
        if verdict is True:
            if model[0] is None:
                filler = syms[0]
                full = tuple(x if x is not None else filler for x in labels)
                model[0] = CompleteTree(height, full, alphabet)
            return k ** (n - i)
        if verdict is False:
            return 0
        if i == n:
            raise AssertionError("predicate undecided on a fully labelled tree")
        total = 0
        for sym in syms:
            labels[i] = sym
            total += rec(i + 1)
            if stop_early and model[0] is not None:
                break
        labels[i] = None
        return total

    count = rec(0)
    return count, model[0]


# Conjunctive-query measure (root-component reduction).


def pattern_measure(
    p: Pattern,
    depth: Optional[int] = None,
    max_evals: int = DEFAULT_MAX_TREES,
    max_nodes: int = DEFAULT_MAX_SEARCH_NODES,
) -> MeasureResult:
    """Exact measure of the set of full trees satisfying a pattern.

    Unsatisfiable patterns have measure 0; satisfiable patterns without a
    root component have measure 1; otherwise the measure is the satisfying
    fraction of the root component at its determining depth, which is one
    less than the component's size.
    """
    if is_satisfiable_pattern(p, max_nodes=max_nodes) is None:
        return MeasureResult(Fraction(0), "cq", 0, notes="unsatisfiable")
    root = root_component_pattern(p)
    if root is None:
        return MeasureResult(Fraction(1), "cq", 0, notes="satisfiable, no root component")
    d = root.size() - 1
    if depth is not None:
        if depth < d:
            raise PreconditionError(f"depth override {depth} below determining depth {d}")
        d = depth
    count = count_models(PatternPredicate(root), d, p.alphabet, max_evals=max_evals)
    total = len(p.alphabet) ** node_count(d)
    return MeasureResult(
        Fraction(count, total),
        "cq",
        d,
        satisfying_count=count,
        total_count=total,
        notes=f"root component on vertices {', '.join(root.vertices)}",
    )


def pattern_positive(p: Pattern, max_nodes: int = DEFAULT_MAX_SEARCH_NODES) -> bool:
    """The measure of a pattern is positive exactly when it is satisfiable."""
    return is_satisfiable_pattern(p, max_nodes=max_nodes) is not None


# Boolean combinations of patterns.


def bccq_reduce(
    c: combo.Combo, max_nodes: int = DEFAULT_MAX_SEARCH_NODES
) -> combo.Combo:
    """Replace each pattern leaf by Bottom, Top, or its root component."""

    def reduce_leaf(p: Pattern):
        if is_satisfiable_pattern(p, max_nodes=max_nodes) is None:
            return combo.BOTTOM
        root = root_component_pattern(p)
        if root is None:
            return combo.TOP
        return combo.Leaf(root)

    return combo.map_leaves(c, reduce_leaf)


def _combo_alphabet(c: combo.Combo) -> Alphabet:
    alphabets = {leaf.alphabet for leaf in combo.leaves(c) if isinstance(leaf, Pattern)}
    if not alphabets:
        raise PreconditionError("combination contains no pattern leaves")
    if len(alphabets) > 1:
        raise PreconditionError("pattern leaves use different alphabets")
    return next(iter(alphabets))


def bccq_measure(
    c: combo.Combo,
    depth: Optional[int] = None,
    max_evals: int = DEFAULT_MAX_TREES,
    max_nodes: int = DEFAULT_MAX_SEARCH_NODES,
) -> MeasureResult:
    """Exact measure of a Boolean combination of patterns."""
    alphabet = _combo_alphabet(c)
    reduced = combo.fold_constants(bccq_reduce(c, max_nodes=max_nodes))
    pattern_leaves = [leaf for leaf in combo.leaves(reduced)]
    d_min = max((leaf.size() - 1 for leaf in pattern_leaves), default=0)
    d = d_min
    if depth is not None:
        if depth < d_min:
            raise PreconditionError(f"depth override {depth} below determining depth {d_min}")
        d = depth
    total = len(alphabet) ** node_count(d)
    if isinstance(reduced, combo.Top):
        count = total
    elif isinstance(reduced, combo.Bottom):
        count = 0
    else:
        count = count_models(
            ComboPredicate(reduced, PatternPredicate), d, alphabet, max_evals=max_evals
        )
    return MeasureResult(
        Fraction(count, total),
        "bccq",
        d,
        satisfying_count=count,
        total_count=total,
        notes=f"{len(pattern_leaves)} rooted firm leaves after reduction",
    )


def bccq_witness(
    c: combo.Combo,
    max_evals: int = DEFAULT_MAX_TREES,
    max_nodes: int = DEFAULT_MAX_SEARCH_NODES,
) -> Optional[CompleteTree]:
    """A determining-depth tree satisfying the reduced combination, if any."""
    alphabet = _combo_alphabet(c)
    reduced = combo.fold_constants(bccq_reduce(c, max_nodes=max_nodes))
    d = max((leaf.size() - 1 for leaf in combo.leaves(reduced)), default=0)
    if isinstance(reduced, combo.Bottom):
        return None
    if isinstance(reduced, combo.Top):
        filler = alphabet.symbols[0]
        return CompleteTree(d, (filler,) * node_count(d), alphabet)
    return find_model(
        ComboPredicate(reduced, PatternPredicate), d, alphabet, max_evals=max_evals
    )


def bccq_positive(
    c: combo.Combo,
    max_evals: int = DEFAULT_MAX_TREES,
    max_nodes: int = DEFAULT_MAX_SEARCH_NODES,
) -> bool:
    return bccq_witness(c, max_evals=max_evals, max_nodes=max_nodes) is not None


# Boolean combinations of basic local sentences.


def fo_local_measure(
    c: combo.Combo,
    mode: str = "minimal",
    depth: Optional[int] = None,
    max_evals: int = DEFAULT_MAX_TREES,
    max_labellings: int = DEFAULT_MAX_TREES,
) -> MeasureResult:
    """Exact measure of a Boolean combination of basic local sentences.

    mode selects the counting depth: "paper" uses 2r+1, "minimal" uses
    2r-1 (0 when r = 0), which already covers every ball a root check can
    inspect.  Both modes yield the same rational.
    """
    if mode not in ("paper", "minimal"):
        raise PreconditionError(f"unknown mode {mode!r}")
    sentences = list(combo.leaves(c))
    if not sentences:
        raise PreconditionError("combination contains no basic local sentences")
    radii = {s.radius for s in sentences}
    if len(radii) > 1:
        raise PreconditionError(f"mixed radii {sorted(radii)}; a single radius is required")
    alphabets = {lf.alphabet for s in sentences for lf in s.locals}
    if len(alphabets) > 1:
        raise PreconditionError("local formulas use different alphabets")
    alphabet = next(iter(alphabets))
    r = next(iter(radii))
    d_min = max(0, 2 * r - 1)
    d = 2 * r + 1 if mode == "paper" else d_min
    if depth is not None:
        if depth < d_min:
            raise PreconditionError(f"depth override {depth} below determining depth {d_min}")
        d = depth
    reduced = combo.fold_constants(
        combo.map_leaves(c, lambda s: _reduced_to_combo(s, max_labellings))
    )
    total = len(alphabet) ** node_count(d)
    if isinstance(reduced, combo.Top):
        count = total
    elif isinstance(reduced, combo.Bottom):
        count = 0
    else:
        count = count_models(
            ComboPredicate(reduced, ReducedPredicate), d, alphabet, max_evals=max_evals
        )
    return MeasureResult(
        Fraction(count, total),
        "fo-local",
        d,
        satisfying_count=count,
        total_count=total,
        notes=f"radius {r}, mode {mode}",
    )


def _reduced_to_combo(s: BasicLocalSentence, max_labellings: int) -> combo.Combo:
    reduced = reduce_basic_local(s, max_labellings=max_labellings)
    if isinstance(reduced, (combo.Top, combo.Bottom)):
        return reduced
    return combo.Leaf(reduced)


def fo_local_witness(
    c: combo.Combo,
    mode: str = "minimal",
    max_evals: int = DEFAULT_MAX_TREES,
    max_labellings: int = DEFAULT_MAX_TREES,
) -> Optional[CompleteTree]:
    """A determining-depth tree satisfying the reduced combination, if any."""
    sentences = list(combo.leaves(c))
    if not sentences:
        raise PreconditionError("combination contains no basic local sentences")
    alphabet = next(iter({lf.alphabet for s in sentences for lf in s.locals}))
    r = sentences[0].radius
    d = 2 * r + 1 if mode == "paper" else max(0, 2 * r - 1)
    reduced = combo.fold_constants(
        combo.map_leaves(c, lambda s: _reduced_to_combo(s, max_labellings))
    )
    if isinstance(reduced, combo.Bottom):
        return None
    if isinstance(reduced, combo.Top):
        filler = alphabet.symbols[0]
        return CompleteTree(d, (filler,) * node_count(d), alphabet)
    return find_model(
        ComboPredicate(reduced, ReducedPredicate), d, alphabet, max_evals=max_evals
    )
