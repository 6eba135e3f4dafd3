from collections import Counter, deque
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treemeasure.errors import BudgetExceededError, ParseError, PreconditionError
from treemeasure.trees import (
    Alphabet,
    CompleteTree,
    FiniteTree,
    basic_set_measure,
    enumerate_complete_trees,
    exact_decimal,
    heap_index,
    node_count,
    parse_complete_tree,
    parse_finite_tree,
    position_of_index,
    positions_up_to,
    prefix_of_height,
    render_complete_tree,
    render_finite_tree,
    sample_complete_tree,
    tree_distance,
)

AB = Alphabet.of("a", "b")
ABC = Alphabet.of("a", "b", "c")

positions = st.text(alphabet="LR", max_size=10)


def bfs_distance(u, v, depth):
    """Independent oracle: breadth-first search on the child graph."""
    if u == v:
        return 0
    seen = {u}
    frontier = deque([(u, 0)])
    while frontier:
        pos, d = frontier.popleft()
        neighbours = [pos[:-1]] if pos else []
        if len(pos) < depth:
            neighbours += [pos + "L", pos + "R"]
        for nxt in neighbours:
            if nxt == v:
                return d + 1
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, d + 1))
    raise AssertionError("positions not connected")


class TestTreeDistance:
    def test_identical_positions(self):
        assert tree_distance("", "") == 0

    def test_siblings(self):
        assert tree_distance("L", "R") == 2

    def test_deep_pair_matches_bfs(self):
        assert tree_distance("LLR", "LRL") == 4
        assert tree_distance("LLR", "LRL") == bfs_distance("LLR", "LRL", depth=3)

    @given(positions, positions)
    def test_symmetry(self, u, v):
        assert tree_distance(u, v) == tree_distance(v, u)

    @given(positions, positions)
    def test_identity_of_indiscernibles(self, u, v):
        assert (tree_distance(u, v) == 0) == (u == v)

    @given(positions, positions, positions)
    def test_triangle_inequality(self, u, v, w):
        assert tree_distance(u, w) <= tree_distance(u, v) + tree_distance(v, w)

    @given(positions, positions)
    @settings(max_examples=50)
    def test_matches_bfs_oracle(self, u, v):
        depth = max(len(u), len(v))
        assert tree_distance(u, v) == bfs_distance(u, v, depth)


class TestBasicSetMeasure:
    def test_single_node_binary(self):
        t = FiniteTree({"": "a"}, AB)
        assert basic_set_measure(t) == Fraction(1, 2)

    def test_empty_domain(self):
        assert basic_set_measure(FiniteTree({}, AB)) == 1

    def test_three_nodes_ternary(self):
        t = FiniteTree({"": "a", "L": "b", "R": "c"}, ABC)
        assert basic_set_measure(t) == Fraction(1, 27)

    def test_three_nodes_against_enumeration(self):
        # Fraction of height-1 labellings extending the finite tree.
        t = FiniteTree({"": "a", "L": "b", "R": "c"}, ABC)
        hits = sum(
            1
            for full in enumerate_complete_trees(1, ABC)
            if all(full.label_at(pos) == sym for pos, sym in t.labels.items())
        )
        assert Fraction(hits, 27) == basic_set_measure(t)

    @given(st.integers(0, 2), st.sampled_from([AB, ABC]))
    def test_formula_for_complete_prefixes(self, height, alphabet):
        labels = {pos: alphabet.symbols[0] for pos in positions_up_to(height)}
        t = FiniteTree(labels, alphabet)
        assert basic_set_measure(t) == Fraction(1, len(alphabet) ** node_count(height))


class TestEnumeration:
    @pytest.mark.parametrize(
        "height,alphabet,expected",
        [(0, AB, 2), (1, AB, 8), (1, ABC, 27), (2, AB, 128), (2, ABC, 2187)],
    )
    def test_counts(self, height, alphabet, expected):
        trees = list(enumerate_complete_trees(height, alphabet))
        assert len(trees) == expected
        assert len({t.labels for t in trees}) == expected

    def test_counter_order(self):
        trees = list(enumerate_complete_trees(1, AB))
        assert trees[0].labels == ("a", "a", "a")
        assert trees[1].labels == ("a", "a", "b")
        assert trees[-1].labels == ("b", "b", "b")

    def test_budget_error_is_upfront(self):
        with pytest.raises(BudgetExceededError):
            next(enumerate_complete_trees(10, AB, max_trees=1 << 20))

    def test_single_symbol(self):
        assert len(list(enumerate_complete_trees(2, Alphabet.of("a")))) == 1


class TestSampling:
    def test_unique_tree_single_symbol(self):
        t = sample_complete_tree(0, Alphabet.of("a"), seed=123)
        assert t.labels == ("a",)

    def test_determinism(self):
        a = sample_complete_tree(2, AB, seed=99)
        b = sample_complete_tree(2, AB, seed=99)
        assert a == b

    def test_root_label_frequency(self):
        n = 100_000
        hits = sum(1 for i in range(n) if sample_complete_tree(0, AB, seed=i).label_at("") == "a")
        assert abs(hits / n - 0.5) < 0.01

    def test_per_node_uniformity_within_4_sigma(self):
        n = 100_000
        counts = [Counter() for _ in range(node_count(2))]
        for i in range(n):
            t = sample_complete_tree(2, AB, seed=i)
            for idx, sym in enumerate(t.labels):
                counts[idx][sym] += 1
        sigma = (n * 0.5 * 0.5) ** 0.5
        for idx in range(node_count(2)):
            for sym in AB:
                assert abs(counts[idx][sym] - n / 2) < 4 * sigma


class TestPrefix:
    def test_full_height_is_identity(self):
        t = sample_complete_tree(2, AB, seed=5)
        assert prefix_of_height(t, 2) == t

    def test_zero_keeps_root_label(self):
        t = sample_complete_tree(2, AB, seed=6)
        assert prefix_of_height(t, 0).labels == (t.label_at(""),)

    def test_height_three_to_one_heap_indices(self):
        t = sample_complete_tree(3, AB, seed=7)
        p = prefix_of_height(t, 1)
        assert p.labels == t.labels[:3]
        assert p.labels == (t.labels[0], t.labels[1], t.labels[2])

    def test_too_deep_is_precondition_error(self):
        t = sample_complete_tree(1, AB, seed=8)
        with pytest.raises(PreconditionError):
            prefix_of_height(t, 2)


class TestHeapLayout:
    @given(positions)
    def test_index_roundtrip(self, pos):
        assert position_of_index(heap_index(pos)) == pos

    def test_positions_up_to_is_heap_order(self):
        ps = positions_up_to(2)
        assert ps == ["", "L", "R", "LL", "LR", "RL", "RR"]
        assert [heap_index(p) for p in ps] == list(range(7))


class TestSerialisation:
    def test_complete_tree_roundtrip(self):
        t = sample_complete_tree(2, ABC, seed=11)
        assert parse_complete_tree(render_complete_tree(t), ABC) == t

    def test_complete_tree_format(self):
        t = CompleteTree(1, ("a", "b", "a"), AB)
        assert render_complete_tree(t) == "height 1\na b a\n"

    def test_finite_tree_roundtrip(self):
        t = FiniteTree({"": "a", "L": "b", "LL": "a"}, AB)
        assert parse_finite_tree(render_finite_tree(t)) == t

    def test_finite_tree_rejects_gap(self):
        with pytest.raises(ParseError):
            parse_finite_tree("alphabet a b\nnode LL a\n")

    def test_complete_tree_rejects_bad_length(self):
        with pytest.raises(ParseError):
            parse_complete_tree("height 1\na b\n", AB)


class TestExactDecimal:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (Fraction(1, 2), "0.500000000000"),
            (Fraction(1), "1.000000000000"),
            (Fraction(1, 3), "0.333333333333"),
            (Fraction(2, 3), "0.666666666667"),
            (Fraction(0), "0.000000000000"),
        ],
    )
    def test_rendering(self, value, expected):
        assert exact_decimal(value) == expected
