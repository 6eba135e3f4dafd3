"""Shared fixtures: curated input suites and independent oracles.

The oracles here deliberately avoid the package's search and counting
machinery: homomorphisms are checked by enumerating every vertex-to-position
assignment, and formulas by a naive evaluator that desugars bounded
quantifiers into explicit distance tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import pytest

from treemeasure import logic
from treemeasure.logic import parse_gnf_file
from treemeasure.patterns import Pattern, parse_pattern
from treemeasure.trees import (
    CompleteTree,
    enumerate_complete_trees,
    positions_up_to,
    tree_distance,
)


# Independent homomorphism oracle: try every assignment.


def oracle_hom_exists(p: Pattern, t: CompleteTree) -> bool:
    positions = positions_up_to(t.height)
    for combo in itertools.product(positions, repeat=len(p.vertices)):
        assign = dict(zip(p.vertices, combo))
        if oracle_check_assignment(p, t, assign):
            return True
    return False


def oracle_check_assignment(p: Pattern, t: CompleteTree, assign) -> bool:
    for v in p.root_flag:
        if assign[v] != "":
            return False
    for v, sym in p.labels.items():
        if t.label_at(assign[v]) != sym:
            return False
    for x, y in p.edges_L:
        if assign[y] != assign[x] + "L":
            return False
    for x, y in p.edges_R:
        if assign[y] != assign[x] + "R":
            return False
    for x, y in p.edges_S:
        if assign[y] not in (assign[x] + "L", assign[x] + "R"):
            return False
    for x, y in p.edges_A:
        a, b = assign[x], assign[y]
        if a == b or not b.startswith(a):
            return False
    return True


def oracle_hom_fraction(p: Pattern, height: int) -> Fraction:
    """Fraction of complete trees admitting a homomorphism, by enumeration."""
    hits = 0
    total = 0
    for t in enumerate_complete_trees(height, p.alphabet):
        total += 1
        if oracle_hom_exists(p, t):
            hits += 1
    return Fraction(hits, total)


# Naive reference evaluator: no balls, no short-circuits beyond Python's own;
# bounded quantifiers become plain quantifiers guarded by a distance test.


def oracle_eval_fo(t: CompleteTree, f, val: dict) -> bool:
    if isinstance(f, logic.LabelAtom):
        return t.label_at(val[f.var]) == f.symbol
    if isinstance(f, logic.RootAtom):
        return val[f.var] == ""
    if isinstance(f, logic.EdgeAtom):
        a, b = val[f.x], val[f.y]
        if f.kind == "L":
            return b == a + "L"
        if f.kind == "R":
            return b == a + "R"
        if f.kind == "S":
            return b[:-1] == a and len(b) == len(a) + 1
        return a != b and b.startswith(a)
    if isinstance(f, logic.EqAtom):
        return val[f.x] == val[f.y]
    if isinstance(f, logic.NotF):
        return not oracle_eval_fo(t, f.body, val)
    if isinstance(f, logic.AndF):
        return oracle_eval_fo(t, f.left, val) and oracle_eval_fo(t, f.right, val)
    if isinstance(f, logic.OrF):
        return oracle_eval_fo(t, f.left, val) or oracle_eval_fo(t, f.right, val)
    if isinstance(f, logic.ImpliesF):
        return (not oracle_eval_fo(t, f.left, val)) or oracle_eval_fo(t, f.right, val)
    if isinstance(f, logic.QuantF):
        results = []
        for pos in positions_up_to(t.height):
            if f.bound is not None:
                b, anchor = f.bound
                if tree_distance(val[anchor], pos) > b:
                    continue
            results.append(oracle_eval_fo(t, f.body, {**val, f.var: pos}))
        return any(results) if f.kind == "E" else all(results)
    raise TypeError(f"unexpected node {f!r}")


# Curated conjunctive-query suite.  `oracle_height` is a height at which the
# truth of the pattern is already decided by the prefix, small enough for
# the assignment-enumeration oracle.


@dataclass(frozen=True)
class CqCase:
    name: str
    text: str
    branch: str  # "unsat" | "no-root" | "root"
    expected: Fraction
    oracle_height: Optional[int] = None


CQ_SUITE = (
    CqCase(
        "unsat_root_conflict",
        "alphabet a b\nvertex x label=a root\nvertex y label=b root\n",
        "unsat",
        Fraction(0),
    ),
    CqCase(
        "unsat_forced_children",
        "alphabet a b\nvertex x\nvertex y label=a\nvertex z label=b\n"
        "edge L x y\nedge L x z\n",
        "unsat",
        Fraction(0),
    ),
    CqCase(
        "unsat_anc_of_root",
        "alphabet a b\nvertex x root\nvertex y\nedge A y x\n",
        "unsat",
        Fraction(0),
    ),
    CqCase(
        "free_vertex_a",
        "alphabet a b\nvertex x label=a\n",
        "no-root",
        Fraction(1),
    ),
    CqCase(
        "anc_pair_ab",
        "alphabet a b\nvertex x label=a\nvertex y label=b\nedge A x y\n",
        "no-root",
        Fraction(1),
    ),
    CqCase(
        "left_edge_pair",
        "alphabet a b\nvertex x label=a\nvertex y label=b\nedge L x y\n",
        "no-root",
        Fraction(1),
    ),
    CqCase(
        "root_a",
        "alphabet a b\nvertex x label=a root\n",
        "root",
        Fraction(1, 2),
        oracle_height=0,
    ),
    CqCase(
        "root_children_aab",
        "alphabet a b\nvertex x label=a root\nvertex y label=a\nvertex z label=b\n"
        "edge L x y\nedge R x z\n",
        "root",
        Fraction(1, 8),
        oracle_height=1,
    ),
    CqCase(
        "root_some_child_a",
        "alphabet a b\nvertex x root\nvertex y label=a\nedge S x y\n",
        "root",
        Fraction(3, 4),
        oracle_height=1,
    ),
    CqCase(
        "root_a_with_far_b",
        "alphabet a b\nvertex x label=a root\nvertex y label=b\nedge A x y\n",
        "root",
        Fraction(1, 2),
        oracle_height=0,
    ),
    CqCase(
        "two_roots_same_label",
        "alphabet a b\nvertex x label=a root\nvertex y label=a root\n",
        "root",
        Fraction(1, 2),
        oracle_height=1,
    ),
    CqCase(
        "root_right_b",
        "alphabet a b\nvertex x label=a root\nvertex y label=b\nedge R x y\n",
        "root",
        Fraction(1, 4),
        oracle_height=1,
    ),
    CqCase(
        "single_symbol_root",
        "alphabet a\nvertex x label=a root\n",
        "root",
        Fraction(1),
        oracle_height=0,
    ),
    CqCase(
        "three_symbol_root_a",
        "alphabet a b c\nvertex x label=a root\n",
        "root",
        Fraction(1, 3),
        oracle_height=0,
    ),
)


@dataclass(frozen=True)
class FoCase:
    name: str
    text: str
    expected: Fraction


FO_SUITE = (
    FoCase(
        "fo_root_a",
        "alphabet a b\nradius 1\nbasic B\nlocal x: root(x) & a(x)\nend\n",
        Fraction(1, 2),
    ),
    FoCase(
        "fo_plain_a",
        "alphabet a b\nradius 1\nbasic B\nlocal x: a(x)\nend\n",
        Fraction(1),
    ),
    FoCase(
        "fo_unsat_local",
        "alphabet a b\nradius 1\nbasic B\nlocal x: a(x) & b(x)\nend\n",
        Fraction(0),
    ),
    FoCase(
        "fo_two_root_locals",
        "alphabet a b\nradius 1\nbasic B\n"
        "local x: root(x) & a(x)\nlocal y: root(y) & b(y)\nend\n",
        Fraction(0),
    ),
    FoCase(
        "fo_root_a_or_b",
        "alphabet a b\nradius 1\n"
        "basic B1\nlocal x: root(x) & a(x)\nend\n"
        "basic B2\nlocal x: root(x) & b(x)\nend\n"
        "expr B1 | B2\n",
        Fraction(1),
    ),
    FoCase(
        "fo_root_a_plus_far_b",
        "alphabet a b\nradius 1\nbasic B\n"
        "local x: root(x) & a(x)\nlocal y: b(y)\nend\n",
        Fraction(1, 2),
    ),
    FoCase(
        "fo_implication_top",
        "alphabet a b\nradius 1\nbasic B\nlocal x: root(x) -> a(x)\nend\n",
        Fraction(1),
    ),
    FoCase(
        "fo_not_root_a",
        "alphabet a b\nradius 1\nbasic B\nlocal x: root(x) & a(x)\nend\nexpr !B\n",
        Fraction(1, 2),
    ),
    FoCase(
        "fo_single_symbol",
        "alphabet a\nradius 1\nbasic B\nlocal x: root(x) & a(x)\nend\n",
        Fraction(1),
    ),
)


@pytest.fixture(scope="session")
def cq_suite():
    return [(case, parse_pattern(case.text)) for case in CQ_SUITE]


@pytest.fixture(scope="session")
def fo_suite():
    return [(case, parse_gnf_file(case.text)) for case in FO_SUITE]


# Hypothesis strategies shared across test modules.

from hypothesis import strategies as st

from treemeasure.trees import Alphabet, node_count

AB = Alphabet.of("a", "b")


@st.composite
def random_patterns(draw, max_vertices=4, max_edges=4):
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    names = tuple(f"v{i}" for i in range(n))
    labels = {}
    roots = set()
    for v in names:
        if draw(st.booleans()):
            labels[v] = draw(st.sampled_from(AB.symbols))
        if draw(st.integers(0, 3)) == 0:
            roots.add(v)
    edges = {"L": [], "R": [], "S": [], "A": []}
    for _ in range(draw(st.integers(0, max_edges))):
        kind = draw(st.sampled_from("LRSA"))
        x = draw(st.sampled_from(names))
        y = draw(st.sampled_from(names))
        if (x, y) not in edges[kind]:
            edges[kind].append((x, y))
    return Pattern(
        vertices=names,
        labels=labels,
        root_flag=frozenset(roots),
        edges_L=tuple(edges["L"]),
        edges_R=tuple(edges["R"]),
        edges_S=tuple(edges["S"]),
        edges_A=tuple(edges["A"]),
        alphabet=AB,
    )


@st.composite
def random_trees(draw, max_height=3):
    height = draw(st.integers(0, max_height))
    labels = draw(
        st.tuples(*(st.sampled_from(AB.symbols) for _ in range(node_count(height))))
    )
    return CompleteTree(height, labels, AB)


# Seeded random Boolean combinations of small patterns (stdlib RNG so the
# acceptance runs are reproducible independently of hypothesis).

from random import Random

from treemeasure import combo


def random_small_pattern(rng: Random, max_vertices: int = 4) -> Pattern:
    n = rng.randint(1, max_vertices)
    names = tuple(f"v{i}" for i in range(n))
    labels = {}
    roots = set()
    for v in names:
        if rng.random() < 0.5:
            labels[v] = rng.choice(AB.symbols)
        if rng.random() < 0.3:
            roots.add(v)
    edges = {"L": [], "R": [], "S": [], "A": []}
    for _ in range(rng.randint(0, 3)):
        kind = rng.choice("LRSA")
        x, y = rng.choice(names), rng.choice(names)
        if (x, y) not in edges[kind]:
            edges[kind].append((x, y))
    return Pattern(
        vertices=names,
        labels=labels,
        root_flag=frozenset(roots),
        edges_L=tuple(edges["L"]),
        edges_R=tuple(edges["R"]),
        edges_S=tuple(edges["S"]),
        edges_A=tuple(edges["A"]),
        alphabet=AB,
    )


def random_bccq_combo(rng: Random, max_leaves: int = 3):
    leaf_patterns = [random_small_pattern(rng) for _ in range(rng.randint(1, max_leaves))]

    def build(depth):
        roll = rng.random()
        if depth == 0 or roll < 0.4:
            return combo.Leaf(rng.choice(leaf_patterns))
        if roll < 0.6:
            return combo.Not(build(depth - 1))
        if roll < 0.8:
            return combo.And(build(depth - 1), build(depth - 1))
        return combo.Or(build(depth - 1), build(depth - 1))

    return build(2)
