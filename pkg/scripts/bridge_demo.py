"""Compare exact measures with seeded Monte-Carlo estimates side by side."""

from treemeasure.estimator import estimate_event
from treemeasure.measure import pattern_measure
from treemeasure.patterns import check_hom, parse_pattern, root_component_pattern
from treemeasure.trees import exact_decimal

PATTERNS = {
    "root labelled a": "alphabet a b\nvertex x label=a root\n",
    "root with children a,b": (
        "alphabet a b\nvertex x label=a root\nvertex y label=a\nvertex z label=b\n"
        "edge L x y\nedge R x z\n"
    ),
    "some child of the root is a": (
        "alphabet a b\nvertex x root\nvertex y label=a\nedge S x y\n"
    ),
}


def main(samples=100_000, seed=42):
    print(f"{samples} samples per estimate, seed {seed}\n")
    for name, text in PATTERNS.items():
        p = parse_pattern(text)
        result = pattern_measure(p)
        root = root_component_pattern(p)
        est = estimate_event(
            lambda t: check_hom(root, t) is not None,
            p.alphabet,
            result.determining_depth,
            samples,
            seed,
        )
        flag = "ok" if est.contains(result.value) else "OUTSIDE CI"
        print(f"{name}:")
        print(f"  exact    {result.value} = {exact_decimal(result.value)}")
        print(f"  estimate {est.point:.6f}  ci [{est.ci_low:.6f}, {est.ci_high:.6f}]  {flag}")
        print()


if __name__ == "__main__":
    main()
