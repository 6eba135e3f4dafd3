"""Closed-form and certified-numeric solutions for recurrence-defined measures.

The probability that a full tree carries an infinite path labelled inside a
subset A of the alphabet is the limit from 1 of x -> c*(2x - x*x) with
c = |A|/|alphabet|; the limit is max(0, 2 - 1/c) exactly.  Bisection with
exact rational endpoints certifies roots of integer polynomials, and the
rational root theorem certifies when no rational root exists at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from .errors import ParseError, PreconditionError
from .trees import Alphabet


@dataclass(frozen=True)
class PathLangSpec:
    """An alphabet and the nonempty subset of labels a path may use."""

    allowed: tuple[str, ...]
    alphabet: Alphabet

    def __post_init__(self):
        if not self.allowed:
            raise ValueError("the allowed subset must be nonempty")
        if len(set(self.allowed)) != len(self.allowed):
            raise ValueError("duplicate symbols in the allowed subset")
        for sym in self.allowed:
            if sym not in self.alphabet:
                raise ValueError(f"allowed symbol {sym!r} not in the alphabet")

    def ratio(self) -> Fraction:
        return Fraction(len(self.allowed), len(self.alphabet))


def path_language_measure(spec: PathLangSpec) -> Fraction:
    """Probability of an infinite path whose labels all lie in the subset.

    This is the limit of the truncation probabilities, i.e. the fixed point
    max(0, 2 - 1/c) selected by iterating from 1.
    """
    c = spec.ratio()
    return max(Fraction(0), 2 - 1 / c)


def iterate_recurrence(c: Fraction, steps: int) -> list[Fraction]:
    """Exact iterates x0=1, x_{i+1} = c*(2*x_i - x_i^2), length steps+1.

    The sequence is nonincreasing and bounded below by the closed-form
    limit.  Denominator bit sizes double each step, so keep `steps` modest
    (around 25 is still cheap, beyond 30 leaves desk scale).
    """
    c = Fraction(c)
    if not 0 < c <= 1:
        raise PreconditionError(f"ratio {c} outside (0, 1]")
    p, q = c.numerator, c.denominator
    # Iterate on raw integers: with x_i = n/d in lowest terms, the update is
    # n' = p*n*(2d - n), d' = q*d*d.  Every factor of n' is coprime to q
    # (p by assumption, n inductively, and 2d - n = -n modulo any prime of
    # q), and d' is a power of q times d_0 = 1, so the pair stays coprime;
    # skipping Fraction's gcd saves minutes at the bit sizes reached here.
    xs = [Fraction(1)]
    n, d = 1, 1
    for _ in range(steps):
        n, d = p * n * (2 * d - n), q * d * d
        xs.append(_coprime_fraction(n, d))
    return xs


def _coprime_fraction(n: int, d: int) -> Fraction:
    f = Fraction.__new__(Fraction)
    f._numerator = n
    f._denominator = d
    return f


@dataclass(frozen=True)
class IntPolynomial:
    """Integer coefficients, highest degree first, degree >= 1."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise ValueError("polynomial degree must be at least 1")
        if self.coefficients[0] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @staticmethod
    def parse(text: str) -> "IntPolynomial":
        try:
            coeffs = tuple(int(part.strip()) for part in text.split(","))
        except ValueError:
            raise ParseError(f"bad coefficient list {text!r}") from None
        try:
            return IntPolynomial(coeffs)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    def degree(self) -> int:
        return len(self.coefficients) - 1

    def eval(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for coef in self.coefficients:
            acc = acc * x + coef
        return acc


def solve_fixed_point(
    p: IntPolynomial,
    lo: Fraction,
    hi: Fraction,
    tol: Fraction,
) -> tuple[Fraction, Fraction]:
    """Bisection enclosure of a root, with exact rational endpoints.

    Requires a sign change across [lo, hi]; shrinks until the width is at
    most tol.  An endpoint that is exactly a root yields a degenerate
    enclosure.
    """
    lo, hi, tol = Fraction(lo), Fraction(hi), Fraction(tol)
    if not lo < hi:
        raise PreconditionError(f"empty interval [{lo}, {hi}]")
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    flo = p.eval(lo)
    fhi = p.eval(hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        raise PreconditionError(f"no sign change of the polynomial across [{lo}, {hi}]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fmid = p.eval(mid)
        if fmid == 0:
            return mid, mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return lo, hi


def rational_root_check(p: IntPolynomial) -> list[Fraction]:
    """All rational roots, by exact evaluation of the rational-root candidates.

    Candidates are +-(divisor of the trailing coefficient)/(divisor of the
    leading coefficient), applied after factoring out powers of x; zero is a
    root exactly when the constant term vanishes.
    """
    coeffs = list(p.coefficients)
    roots: list[Fraction] = []
    # Strip trailing zero coefficients: each is one factor of x.
    had_zero_root = False
    while coeffs[-1] == 0:
        had_zero_root = True
        coeffs.pop()
        if len(coeffs) == 1:
            break
    if had_zero_root:
        roots.append(Fraction(0))
    if len(coeffs) >= 2:
        lead, const = abs(coeffs[0]), abs(coeffs[-1])
        seen = set(roots)
        trimmed = IntPolynomial(tuple(coeffs))
        for num in _divisors(const):
            for den in _divisors(lead):
                for cand in (Fraction(num, den), Fraction(-num, den)):
                    if cand in seen:
                        continue
                    seen.add(cand)
                    if trimmed.eval(cand) == 0:
                        roots.append(cand)
    return roots


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]
