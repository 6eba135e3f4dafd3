"""Command-line front end.

Commands: measure, positive, decompose, count, estimate, solve.  All numeric
output leads with the exact rational; decimals are derived.  Exit codes:
0 success, 2 parse error, 3 budget exceeded, 4 precondition violation.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import combo
from .analytic import (
    IntPolynomial,
    PathLangSpec,
    path_language_measure,
    rational_root_check,
    solve_fixed_point,
)
from .errors import (
    DEFAULT_MAX_SEARCH_NODES,
    DEFAULT_MAX_TREES,
    BudgetExceededError,
    ParseError,
    PreconditionError,
)
from .estimator import estimate_event, estimate_path_truncation, estimate_subtree_occurrence
from .logic import eval_basic_local, eval_reduced, parse_gnf_file, reduce_basic_local
from .measure import (
    ComboPredicate,
    MeasureResult,
    PatternPredicate,
    bccq_measure,
    bccq_witness,
    count_models,
    fo_local_measure,
    pattern_measure,
)
from .patterns import (
    check_hom,
    is_satisfiable_pattern,
    firm_decomposition,
    parse_bccq_file,
    parse_pattern,
)
from .trees import (
    Alphabet,
    exact_decimal,
    node_count,
    parse_finite_tree,
    prefix_of_height,
    render_position,
)


def _rat(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _emit(pairs, fmt: str):
    sep = " = " if fmt == "text" else "="
    for key, value in pairs:
        print(f"{key}{sep}{value}")


def _emit_measure(result: MeasureResult, fmt: str):
    pairs = [
        ("measure", _rat(result.value)),
        ("decimal", exact_decimal(result.value)),
        ("pipeline", result.pipeline),
        ("determining_depth", result.determining_depth),
    ]
    if result.satisfying_count is not None:
        pairs.append(("satisfying_count", result.satisfying_count))
        pairs.append(("total_count", result.total_count))
    if result.notes:
        pairs.append(("notes", result.notes))
    _emit(pairs, fmt)


def _path_spec(args) -> PathLangSpec:
    def split(text):
        parts = text.split(",") if "," in text else list(text)
        return tuple(p for p in parts if p)

    try:
        alphabet = Alphabet(split(args.alphabet))
        return PathLangSpec(allowed=split(args.subset), alphabet=alphabet)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _cmd_measure(args) -> int:
    if args.kind == "path":
        value = path_language_measure(_path_spec(args))
        result = MeasureResult(value, "path", 0, notes="closed-form recurrence limit")
    elif args.kind == "cq":
        pattern = parse_pattern(_read(args.input))
        result = pattern_measure(
            pattern, depth=args.depth, max_evals=args.max_trees, max_nodes=args.max_positions
        )
    elif args.kind == "bccq":
        tree, _ = parse_bccq_file(_read(args.input))
        result = bccq_measure(
            tree, depth=args.depth, max_evals=args.max_trees, max_nodes=args.max_positions
        )
    else:
        tree, _, _ = parse_gnf_file(_read(args.input))
        result = fo_local_measure(
            tree, mode=args.mode, depth=args.depth, max_evals=args.max_trees
        )
    _emit_measure(result, args.format)
    return 0


def _cmd_positive(args) -> int:
    if args.kind == "cq":
        pattern = parse_pattern(_read(args.input))
        found = is_satisfiable_pattern(pattern, max_nodes=args.max_positions)
        if found is None:
            print("zero")
            return 0
        model, witness = found
        # Trim the model to the deepest assigned position; the witness still
        # verifies on the prefix.
        used = max((len(pos) for pos in witness.assignment.values()), default=0)
        model = prefix_of_height(model, used)
        print("positive")
        print(f"height {model.height}")
        print(" ".join(model.labels))
        hom = ",".join(
            f"{v}:{render_position(pos)}" for v, pos in sorted(witness.assignment.items())
        )
        print(f"hom {hom}")
        return 0
    tree, _ = parse_bccq_file(_read(args.input))
    model = bccq_witness(tree, max_evals=args.max_trees, max_nodes=args.max_positions)
    if model is None:
        print("zero")
        return 0
    print("positive")
    print(f"height {model.height}")
    print(" ".join(model.labels))
    return 0


def _cmd_decompose(args) -> int:
    pattern = parse_pattern(_read(args.input))
    dec = firm_decomposition(pattern)
    pairs = [("components", len(dec.components))]
    for i, comp in enumerate(dec.components):
        pairs.append((f"component_{i}", " ".join(comp)))
    pairs.append(
        ("dag_edges", ",".join(f"{a}->{b}" for a, b in dec.dag_edges) or "none")
    )
    pairs.append(
        ("root_component", dec.root_component if dec.root_component is not None else "none")
    )
    _emit(pairs, args.format)
    return 0


def _cmd_count(args) -> int:
    text = _read(args.input)
    if args.kind == "cq":
        pattern = parse_pattern(text)
        alphabet = pattern.alphabet
        count = count_models(
            PatternPredicate(pattern), args.height, alphabet, max_evals=args.max_trees
        )
    elif args.kind == "bccq":
        tree, alphabet = parse_bccq_file(text)
        count = count_models(
            ComboPredicate(tree, PatternPredicate), args.height, alphabet,
            max_evals=args.max_trees,
        )
    else:
        tree, alphabet, _ = parse_gnf_file(text)

        def direct(t):
            return combo.eval_combo(tree, lambda s: eval_basic_local(t, s))

        count = count_models(direct, args.height, alphabet, max_evals=args.max_trees)
    total = len(alphabet) ** node_count(args.height)
    if args.format == "record":
        _emit([("count", count), ("total", total)], args.format)
    else:
        print(f"{count} / {total}")
    return 0


def _emit_estimate(est, fmt: str):
    _emit(
        [
            ("estimate", f"{est.point:.9f}"),
            ("ci_low", f"{est.ci_low:.9f}"),
            ("ci_high", f"{est.ci_high:.9f}"),
            ("samples", est.samples),
            ("seed", est.seed),
            ("depth", est.depth),
        ],
        fmt,
    )


def _cmd_estimate(args) -> int:
    if args.kind == "path":
        est = estimate_path_truncation(_path_spec(args), args.steps, args.samples, args.seed)
    elif args.kind == "cq":
        pattern = parse_pattern(_read(args.input))
        est = estimate_event(
            lambda t: check_hom(pattern, t) is not None,
            pattern.alphabet,
            args.depth,
            args.samples,
            args.seed,
        )
    elif args.kind == "fo":
        tree, alphabet, _ = parse_gnf_file(_read(args.input))
        reduced = combo.map_leaves(tree, _reduced_leaf)
        est = estimate_event(
            lambda t: combo.eval_combo(reduced, lambda rs: eval_reduced(t, rs)),
            alphabet,
            args.depth,
            args.samples,
            args.seed,
        )
    else:
        finite = parse_finite_tree(_read(args.input))
        est = estimate_subtree_occurrence(finite, args.depth, args.samples, args.seed)
    _emit_estimate(est, args.format)
    return 0


def _reduced_leaf(sentence):
    reduced = reduce_basic_local(sentence)
    if isinstance(reduced, (combo.Top, combo.Bottom)):
        return reduced
    return combo.Leaf(reduced)


def _cmd_solve(args) -> int:
    poly = IntPolynomial.parse(args.poly)
    lo = _parse_fraction(args.lo)
    hi = _parse_fraction(args.hi)
    tol = _parse_fraction(args.tol)
    enclosure = solve_fixed_point(poly, lo, hi, tol)
    roots = rational_root_check(poly)
    mid = (enclosure[0] + enclosure[1]) / 2
    if args.format == "record":
        _emit(
            [
                ("enclosure_low", _rat(enclosure[0])),
                ("enclosure_high", _rat(enclosure[1])),
                ("midpoint", _rat(mid)),
                ("midpoint_decimal", exact_decimal(mid)),
                ("rational_roots", ",".join(_rat(r) for r in roots) or "none"),
            ],
            args.format,
        )
    else:
        print(f"enclosure_low = {_rat(enclosure[0])}")
        print(f"enclosure_high = {_rat(enclosure[1])}")
        print(f"midpoint_decimal = {exact_decimal(mid)}")
        print(f"rational roots: {', '.join(_rat(r) for r in roots) or 'none'}")
    return 0


def _add_common(parser, budget=True):
    parser.add_argument("--format", choices=("text", "record"), default="text")
    if budget:
        parser.add_argument("--max-trees", type=int, default=DEFAULT_MAX_TREES)
        parser.add_argument("--max-positions", type=int, default=DEFAULT_MAX_SEARCH_NODES)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treemeasure",
        description="Exact uniform measures of tree languages, with a Monte-Carlo cross-check.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="exact measure of a pattern, combination, or sentence")
    p.add_argument("kind", choices=("cq", "bccq", "fo", "path"))
    p.add_argument("input", nargs="?", help="input file (omit for kind=path)")
    p.add_argument("--mode", choices=("paper", "minimal"), default="minimal")
    p.add_argument("--depth", type=int, default=None, help="counting depth override")
    p.add_argument("--alphabet", help="path alphabet, e.g. abc or a,b,c")
    p.add_argument("--subset", help="allowed path labels, e.g. ab")
    _add_common(p)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("positive", help="decide whether the measure is positive")
    p.add_argument("kind", choices=("cq", "bccq"))
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(func=_cmd_positive)

    p = sub.add_parser("decompose", help="firm components of a pattern")
    p.add_argument("input")
    _add_common(p, budget=False)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("count", help="count satisfying complete trees at a height")
    p.add_argument("kind", choices=("cq", "bccq", "fo"))
    p.add_argument("input")
    p.add_argument("--height", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("estimate", help="seeded Monte-Carlo estimate")
    p.add_argument("kind", choices=("cq", "fo", "subtree", "path"))
    p.add_argument("input", nargs="?", help="input file (omit for kind=path)")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=1, help="path truncation length")
    p.add_argument("--alphabet")
    p.add_argument("--subset")
    _add_common(p, budget=False)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("solve", help="bisection enclosure plus rational-root check")
    p.add_argument("poly", help="integer coefficients, highest degree first, e.g. 1,0,0,-8,4")
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")
    p.add_argument("--tol", default="1/1000000000")
    _add_common(p, budget=False)
    p.set_defaults(func=_cmd_solve)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kind", None) == "path":
        if not (args.alphabet and args.subset):
            parser.error("kind=path requires --alphabet and --subset")
    elif hasattr(args, "input") and args.input is None:
        parser.error("an input file is required")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
