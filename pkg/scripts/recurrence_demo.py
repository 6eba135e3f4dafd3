"""Tabulate the path-language recurrence against its closed form, then
certify the quartic fixed point x = 1/2 + x^4/8 as irrational."""

from fractions import Fraction

from treemeasure.analytic import (
    IntPolynomial,
    PathLangSpec,
    iterate_recurrence,
    path_language_measure,
    rational_root_check,
    solve_fixed_point,
)
from treemeasure.trees import Alphabet, exact_decimal


def main():
    specs = [
        PathLangSpec(("a",), Alphabet.of("a", "b", "c")),
        PathLangSpec(("a",), Alphabet.of("a", "b")),
        PathLangSpec(("a", "b"), Alphabet.of("a", "b", "c")),
    ]
    for spec in specs:
        limit = path_language_measure(spec)
        xs = iterate_recurrence(spec.ratio(), 20)
        print(f"allowed {spec.allowed} of {spec.alphabet.symbols}: ratio {spec.ratio()}")
        print(f"  limit {limit} = {exact_decimal(limit)}")
        for i in (0, 1, 2, 5, 10, 20):
            print(f"  x_{i:<2} = {exact_decimal(xs[i])}")
        print()

    poly = IntPolynomial((1, 0, 0, -8, 4))
    lo, hi = solve_fixed_point(poly, Fraction(0), Fraction(1), Fraction(1, 10**12))
    mid = (lo + hi) / 2
    print("fixed point of x = 1/2 + x^4/8:")
    print(f"  enclosure width {exact_decimal(hi - lo, 14)}")
    print(f"  midpoint {exact_decimal(mid, 14)}")
    roots = rational_root_check(poly)
    print(f"  rational roots of x^4 - 8x + 4: {roots or 'none'} (so the value is irrational)")


if __name__ == "__main__":
    main()
