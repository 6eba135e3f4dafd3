from fractions import Fraction

import pytest

from treemeasure.analytic import PathLangSpec, iterate_recurrence
from treemeasure.errors import PreconditionError
from treemeasure.estimator import (
    estimate_event,
    estimate_path_truncation,
    estimate_subtree_occurrence,
    hoeffding_halfwidth,
)
from treemeasure.measure import count_models
from treemeasure.patterns import check_hom, parse_pattern
from treemeasure.trees import Alphabet, FiniteTree, node_count

AB = Alphabet.of("a", "b")
ABC = Alphabet.of("a", "b", "c")

THREE_NODE = FiniteTree({"": "a", "L": "a", "R": "b"}, AB)


def spearman(points):
    ranks = {v: r for r, v in enumerate(sorted(set(points)))}
    xs = list(range(len(points)))
    ys = [ranks[v] for v in points]

    def centred(vals):
        m = sum(vals) / len(vals)
        return [v - m for v in vals]

    cx, cy = centred(xs), centred(ys)
    num = sum(a * b for a, b in zip(cx, cy))
    den = (sum(a * a for a in cx) * sum(b * b for b in cy)) ** 0.5
    return num / den if den else 0.0


class TestEstimateEvent:
    def test_deterministic_per_seed(self):
        pred = lambda t: t.label_at("") == "a"
        a = estimate_event(pred, AB, 2, 5000, seed=7)
        b = estimate_event(pred, AB, 2, 5000, seed=7)
        assert a == b
        c = estimate_event(pred, AB, 2, 5000, seed=8)
        assert c != a

    def test_always_true_clips_to_one(self):
        est = estimate_event(lambda t: True, AB, 1, 1000, seed=1)
        assert est.point == 1.0
        assert est.ci_high == 1.0
        assert est.ci_low == pytest.approx(1.0 - hoeffding_halfwidth(1000))

    def test_root_label_frequency(self):
        est = estimate_event(lambda t: t.label_at("") == "a", AB, 3, 100_000, seed=11)
        assert abs(est.point - 0.5) < 0.01
        assert est.contains(Fraction(1, 2))

    def test_hom_event_tracks_exact_measure(self):
        p = parse_pattern("alphabet a b\nvertex x label=a root\n")
        est = estimate_event(lambda t: check_hom(p, t) is not None, AB, 3, 20_000, seed=5)
        assert est.contains(Fraction(1, 2))

    def test_sample_floor(self):
        with pytest.raises(PreconditionError):
            estimate_event(lambda t: True, AB, 1, 99, seed=0)


class TestSubtreeOccurrence:
    def test_single_node_nearly_certain_at_depth_six(self):
        t = FiniteTree({"": "a"}, AB)
        est = estimate_subtree_occurrence(t, 6, 2000, seed=3)
        assert est.point >= 0.99

    def test_exact_fraction_at_matching_depth(self):
        # With depth equal to the tree height the only anchor is the root,
        # so the exact probability is 1/8; the estimate's CI must cover it.
        est = estimate_subtree_occurrence(THREE_NODE, 1, 20_000, seed=9)
        exact = count_models(
            lambda t: all(t.label_at(pos) == sym for pos, sym in THREE_NODE.labels.items()),
            1,
            AB,
        )
        assert Fraction(exact, len(AB) ** node_count(1)) == Fraction(1, 8)
        assert est.contains(Fraction(1, 8))

    def test_trend_is_nondecreasing_up_to_noise(self):
        points = [
            estimate_subtree_occurrence(THREE_NODE, d, 3000, seed=40 + d).point
            for d in range(3, 9)
        ]
        halves = hoeffding_halfwidth(3000)
        for earlier, later in zip(points, points[1:]):
            assert later >= earlier - 2 * halves
        assert spearman(points) > 0.7

    def test_depth_below_height_rejected(self):
        with pytest.raises(PreconditionError):
            estimate_subtree_occurrence(THREE_NODE, 0, 1000, seed=0)


class TestPathTruncation:
    def test_zero_steps_is_certain(self):
        spec = PathLangSpec(("a", "b"), ABC)
        est = estimate_path_truncation(spec, 0, 1000, seed=0)
        assert est.point == 1.0 and est.ci_high == 1.0

    def test_one_step_matches_ratio(self):
        spec = PathLangSpec(("a", "b"), ABC)
        est = estimate_path_truncation(spec, 1, 50_000, seed=2)
        assert est.contains(Fraction(2, 3))

    @pytest.mark.parametrize(
        "allowed,alphabet",
        [(("a",), ABC), (("a",), AB), (("a", "b"), ABC)],
    )
    def test_matches_exact_iterates(self, allowed, alphabet):
        spec = PathLangSpec(allowed, alphabet)
        iterates = iterate_recurrence(spec.ratio(), 10)
        for i in (1, 2, 5, 10):
            est = estimate_path_truncation(spec, i, 20_000, seed=100 + i)
            assert est.contains(iterates[i]), (allowed, alphabet, i)

    def test_deterministic(self):
        spec = PathLangSpec(("a",), AB)
        assert estimate_path_truncation(spec, 4, 5000, seed=6) == estimate_path_truncation(
            spec, 4, 5000, seed=6
        )
