"""Alphabets, positions, finite and complete labelled binary trees.

Positions are words over {L, R} stored as plain strings ("" is the root).
A complete tree of height k carries labels for every position of depth <= k
in a flat heap-ordered array: index("") = 0, index(u + "L") = 2*i + 1,
index(u + "R") = 2*i + 2.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional

from .errors import DEFAULT_MAX_TREES, BudgetExceededError, ParseError, PreconditionError

Position = str


@dataclass(frozen=True)
class Alphabet:
    """An ordered, duplicate-free tuple of symbol names (size >= 1).

    The order is fixed at construction and drives enumeration order and
    serialization everywhere else in the package.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"alphabet symbols must be distinct: {self.symbols}")

    @staticmethod
    def of(*symbols: str) -> "Alphabet":
        return Alphabet(tuple(symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self.symbols

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)


def is_position(word: str) -> bool:
    return all(c in "LR" for c in word)


def parse_position(text: str) -> Position:
    """Parse a position word; "e" denotes the root."""
    if text == "e":
        return ""
    if not text or not is_position(text):
        raise ParseError(f"not a position word: {text!r}")
    return text


def render_position(pos: Position) -> str:
    return pos if pos else "e"


def tree_distance(u: Position, v: Position) -> int:
    """Distance between two positions in the child graph: |u| + |v| - 2*|lca|."""
    k = 0
    for a, b in zip(u, v):
        if a != b:
            break
        k += 1
    return len(u) + len(v) - 2 * k


def node_count(height: int) -> int:
    """Number of positions of depth <= height."""
    return (1 << (height + 1)) - 1


def heap_index(pos: Position) -> int:
    i = 0
    for c in pos:
        i = 2 * i + 1 + (c == "R")
    return i


def position_of_index(i: int) -> Position:
    out = []
    while i > 0:
        out.append("R" if i % 2 == 0 else "L")
        i = (i - 1) // 2
    return "".join(reversed(out))


def positions_up_to(height: int) -> list[Position]:
    """All positions of depth <= height, in heap (level, then lexicographic) order."""
    out = [""]
    level = [""]
    for _ in range(height):
        level = [p + c for p in level for c in "LR"]
        out.extend(level)
    return out


@dataclass(frozen=True)
class FiniteTree:
    """A finite labelled tree: a prefix-closed map of positions to symbols."""

    labels: Mapping[Position, str]
    alphabet: Alphabet

    def __post_init__(self):
        for pos, sym in self.labels.items():
            if not is_position(pos):
                raise ValueError(f"not a position: {pos!r}")
            if pos and pos[:-1] not in self.labels:
                raise ValueError(f"domain not prefix-closed at {render_position(pos)}")
            if sym not in self.alphabet:
                raise ValueError(f"label {sym!r} not in alphabet")

    def domain_size(self) -> int:
        return len(self.labels)

    def height(self) -> int:
        return max((len(p) for p in self.labels), default=-1)


@dataclass(frozen=True)
class CompleteTree:
    """A fully labelled binary tree of domain {L,R}^(<= height), heap order."""

    height: int
    labels: tuple[str, ...]
    alphabet: Alphabet

    def __post_init__(self):
        if self.height < 0:
            raise ValueError("height must be a natural number")
        if len(self.labels) != node_count(self.height):
            raise ValueError(
                f"height {self.height} needs {node_count(self.height)} labels, "
                f"got {len(self.labels)}"
            )

    def label_at(self, pos: Position) -> str:
        return self.labels[heap_index(pos)]

    def __contains__(self, pos: Position) -> bool:
        return len(pos) <= self.height

    def positions(self) -> list[Position]:
        return positions_up_to(self.height)


def basic_set_measure(t: FiniteTree) -> Fraction:
    """Exact probability that a uniform random full tree extends t at a fixed anchor.

    Equals 1 / |alphabet| ** |domain|, independently of where t is anchored.
    """
    return Fraction(1, len(t.alphabet) ** t.domain_size())


def enumerate_complete_trees(
    height: int,
    alphabet: Alphabet,
    max_trees: int = DEFAULT_MAX_TREES,
) -> Iterator[CompleteTree]:
    """Yield every complete tree of the given height exactly once.

    Order: the heap-ordered label array runs through all base-|alphabet|
    words, first array slot most significant.  Raises BudgetExceededError
    up front when the total count exceeds `max_trees`.
    """
    n = node_count(height)
    total = len(alphabet) ** n
    if total > max_trees:
        raise BudgetExceededError(
            f"enumeration of height-{height} trees over {len(alphabet)} symbols",
            required=total,
            budget=max_trees,
        )
    for labels in itertools.product(alphabet.symbols, repeat=n):
        yield CompleteTree(height, labels, alphabet)


def sample_complete_tree(height: int, alphabet: Alphabet, seed: int) -> CompleteTree:
    """Draw each node label independently and uniformly; deterministic per seed."""
    rng = random.Random(seed)
    n = node_count(height)
    k = len(alphabet)
    syms = alphabet.symbols
    labels = tuple(syms[rng.randrange(k)] for _ in range(n))
    return CompleteTree(height, labels, alphabet)


def prefix_of_height(t: CompleteTree, d: int) -> CompleteTree:
    """Restrict a complete tree to positions of depth <= d."""
    if d < 0 or d > t.height:
        raise PreconditionError(f"prefix height {d} outside [0, {t.height}]")
    return CompleteTree(d, t.labels[: node_count(d)], t.alphabet)


# Canonical text serialization.

def render_complete_tree(t: CompleteTree) -> str:
    return f"height {t.height}\n{' '.join(t.labels)}\n"


def parse_complete_tree(text: str, alphabet: Optional[Alphabet] = None) -> CompleteTree:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("height "):
        raise ParseError("expected 'height <k>' line followed by one label line")
    try:
        height = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ParseError(f"bad height line: {lines[0]!r}") from None
    labels = tuple(lines[1].split())
    if alphabet is None:
        seen = []
        for s in labels:
            if s not in seen:
                seen.append(s)
        alphabet = Alphabet(tuple(seen))
    for s in labels:
        if s not in alphabet:
            raise ParseError(f"unknown symbol {s!r}")
    try:
        return CompleteTree(height, labels, alphabet)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def render_finite_tree(t: FiniteTree) -> str:
    lines = [f"alphabet {' '.join(t.alphabet.symbols)}"]
    for pos in sorted(t.labels, key=lambda p: (len(p), p)):
        lines.append(f"node {render_position(pos)} {t.labels[pos]}")
    return "\n".join(lines) + "\n"


def parse_finite_tree(text: str) -> FiniteTree:
    """Parse `alphabet ...` plus `node <position|e> <symbol>` lines."""
    alphabet = None
    labels: dict[Position, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate alphabet line", line=lineno)
            try:
                alphabet = Alphabet(tuple(parts[1:]))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
        elif parts[0] == "node":
            if len(parts) != 3:
                raise ParseError(f"expected 'node <position> <symbol>': {line!r}", line=lineno)
            pos = parse_position(parts[1])
            if pos in labels:
                raise ParseError(f"duplicate node {parts[1]}", line=lineno)
            labels[pos] = parts[2]
        else:
            raise ParseError(f"unknown declaration {parts[0]!r}", line=lineno)
    if alphabet is None:
        raise ParseError("missing alphabet line")
    try:
        return FiniteTree(labels, alphabet)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def exact_decimal(value: Fraction, digits: int = 12) -> str:
    """Decimal expansion of an exact rational, rounded half away from zero."""
    sign = "-" if value < 0 else ""
    scaled = abs(value) * 10**digits
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r >= scaled.denominator:
        q += 1
    whole, frac = divmod(q, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
