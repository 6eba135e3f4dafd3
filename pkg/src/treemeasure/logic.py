"""First-order formulas on labelled binary trees, local sentences, reduction.

The formula language has label atoms `a(x)`, the root predicate `root(x)`,
child atoms `sL(x,y)`, `sR(x,y)`, `s(x,y)`, the strict-ancestor atom
`anc(x,y)`, equality, the usual connectives, and quantifiers that may be
distance-bounded: `E y<=b@x. ...` ranges over positions within tree distance
b of x's value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from . import combo
from .errors import (
    DEFAULT_MAX_TREES,
    BudgetExceededError,
    ParseError,
    PreconditionError,
)
from .trees import Alphabet, CompleteTree, Position, heap_index, node_count, positions_up_to, tree_distance

RESERVED_PREDICATES = ("root", "sL", "sR", "s", "anc")


@dataclass(frozen=True)
class LabelAtom:
    symbol: str
    var: str


@dataclass(frozen=True)
class RootAtom:
    var: str


@dataclass(frozen=True)
class EdgeAtom:
    kind: str  # "L", "R", "S", "A"
    x: str
    y: str


@dataclass(frozen=True)
class EqAtom:
    x: str
    y: str


@dataclass(frozen=True)
class NotF:
    body: "Formula"


@dataclass(frozen=True)
class AndF:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class OrF:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ImpliesF:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class QuantF:
    kind: str  # "E" or "A"
    var: str
    bound: Optional[tuple[int, str]]  # (distance bound, anchor variable)
    body: "Formula"


Formula = Union[LabelAtom, RootAtom, EdgeAtom, EqAtom, NotF, AndF, OrF, ImpliesF, QuantF]


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, LabelAtom):
        return frozenset((f.var,))
    if isinstance(f, RootAtom):
        return frozenset((f.var,))
    if isinstance(f, EdgeAtom):
        return frozenset((f.x, f.y))
    if isinstance(f, EqAtom):
        return frozenset((f.x, f.y))
    if isinstance(f, NotF):
        return free_vars(f.body)
    if isinstance(f, (AndF, OrF, ImpliesF)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QuantF):
        inner = free_vars(f.body) - {f.var}
        if f.bound is not None:
            inner |= {f.bound[1]}
        return inner
    raise TypeError(f"not a formula node: {f!r}")


# Parser.

_PUNCT = ("->", "<=", "(", ")", ",", ".", "&", "|", "!", "=", "@")


def _tokenize_formula(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        two = text[i : i + 2]
        if two in ("->", "<="):
            tokens.append(two)
            i += 2
        elif c in "(),.&|!=@":
            tokens.append(c)
            i += 1
        elif c.isalnum() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError(f"bad character {c!r} in formula {text!r}")
    return tokens


def parse_formula(text: str, alphabet: Alphabet) -> Formula:
    """Parse a formula; unknown predicate names and symbols are rejected.

    Any variable not captured by a quantifier is left free; callers that
    need sentences check free_vars() themselves.
    """
    for sym in alphabet:
        if sym in RESERVED_PREDICATES or sym in ("E", "A"):
            raise ParseError(f"alphabet symbol {sym!r} collides with a reserved name")
    tokens = _tokenize_formula(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError(f"unexpected end of formula: {text!r}")
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r} in {text!r}")
        pos += 1
        return tok

    def ident():
        tok = take()
        if not tok or not (tok[0].isalpha() or tok[0] == "_") or tok in _PUNCT:
            raise ParseError(f"expected a name, found {tok!r} in {text!r}")
        return tok

    def parse_implies():
        left = parse_or()
        if peek() == "->":
            take()
            return ImpliesF(left, parse_implies())
        return left

    def parse_or():
        node = parse_and()
        while peek() == "|":
            take()
            node = OrF(node, parse_and())
        return node

    def parse_and():
        node = parse_unary()
        while peek() == "&":
            take()
            node = AndF(node, parse_unary())
        return node

    def parse_unary():
        tok = peek()
        if tok == "!":
            take()
            return NotF(parse_unary())
        if tok in ("E", "A"):
            take()
            var = ident()
            bound = None
            if peek() == "<=":
                take()
                num = take()
                if not num.isdigit():
                    raise ParseError(f"expected a distance bound, found {num!r}")
                take("@")
                anchor = ident()
                bound = (int(num), anchor)
            take(".")
            return QuantF(tok, var, bound, parse_implies())
        if tok == "(":
            take()
            node = parse_implies()
            take(")")
            return node
        return parse_atom()

    def parse_atom():
        name = ident()
        if peek() == "=":
            take()
            return EqAtom(name, ident())
        take("(")
        first = ident()
        if name == "root":
            take(")")
            return RootAtom(first)
        if name in ("sL", "sR", "s", "anc"):
            take(",")
            second = ident()
            take(")")
            kind = {"sL": "L", "sR": "R", "s": "S", "anc": "A"}[name]
            return EdgeAtom(kind, first, second)
        if name in alphabet:
            take(")")
            return LabelAtom(name, first)
        raise ParseError(f"unknown predicate or symbol {name!r}")

    node = parse_implies()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens {tokens[pos:]} in formula {text!r}")
    return node


# Evaluation.


def _ball_positions(center: Position, radius: int) -> list[Position]:
    """Positions of the infinite tree within the given tree distance, heap order."""
    out = set()
    for k in range(min(radius, len(center)) + 1):
        anc = center[: len(center) - k] if k else center
        for tail in positions_up_to(radius - k):
            out.add(anc + tail)
    return sorted(out, key=lambda w: (len(w), w))


def eval_fo(t: CompleteTree, f: Formula, valuation: Mapping[str, Position]) -> bool:
    """Tarskian evaluation with quantifiers over the tree's domain."""
    missing = free_vars(f) - set(valuation)
    if missing:
        raise PreconditionError(f"valuation misses free variables {sorted(missing)}")
    for var, pos in valuation.items():
        if pos not in t:
            raise PreconditionError(f"valuation of {var!r} outside the tree domain")
    return _eval(t, f, dict(valuation))


def _eval_struct_atom(f, val):
    if isinstance(f, RootAtom):
        return val[f.var] == ""
    if isinstance(f, EqAtom):
        return val[f.x] == val[f.y]
    a, b = val[f.x], val[f.y]
    if f.kind == "L":
        return b == a + "L"
    if f.kind == "R":
        return b == a + "R"
    if f.kind == "S":
        return len(b) == len(a) + 1 and b[:-1] == a
    return a != b and b.startswith(a)


def _eval(t, f, val):
    if isinstance(f, LabelAtom):
        return t.label_at(val[f.var]) == f.symbol
    if isinstance(f, (RootAtom, EdgeAtom, EqAtom)):
        return _eval_struct_atom(f, val)
    if isinstance(f, NotF):
        return not _eval(t, f.body, val)
    if isinstance(f, AndF):
        return _eval(t, f.left, val) and _eval(t, f.right, val)
    if isinstance(f, OrF):
        return _eval(t, f.left, val) or _eval(t, f.right, val)
    if isinstance(f, ImpliesF):
        return (not _eval(t, f.left, val)) or _eval(t, f.right, val)
    if isinstance(f, QuantF):
        candidates = _quant_range(t.height, f, val)
        shadowed = val.get(f.var, _UNBOUND)
        try:
            if f.kind == "E":
                for pos in candidates:
                    val[f.var] = pos
                    if _eval(t, f.body, val):
                        return True
                return False
            for pos in candidates:
                val[f.var] = pos
                if not _eval(t, f.body, val):
                    return False
            return True
        finally:
            if shadowed is _UNBOUND:
                val.pop(f.var, None)
            else:
                val[f.var] = shadowed
    raise TypeError(f"not a formula node: {f!r}")


_UNBOUND = object()


def _quant_range(height, f, val):
    if f.bound is None:
        return positions_up_to(height)
    b, anchor = f.bound
    centre = val[anchor]
    return [p for p in _ball_positions(centre, b) if len(p) <= height]


def eval_fo3(
    height: int, labels: list, f: Formula, val: dict[str, Position]
) -> Optional[bool]:
    """Three-valued evaluation over a partially labelled complete tree.

    `labels` is heap-ordered with None for unassigned nodes.  Connectives and
    quantifiers follow Kleene logic, so True/False answers hold for every
    completion of the labelling.
    """
    if isinstance(f, LabelAtom):
        have = labels[heap_index(val[f.var])]
        return None if have is None else have == f.symbol
    if isinstance(f, (RootAtom, EdgeAtom, EqAtom)):
        return _eval_struct_atom(f, val)
    if isinstance(f, NotF):
        v = eval_fo3(height, labels, f.body, val)
        return None if v is None else not v
    if isinstance(f, AndF):
        left = eval_fo3(height, labels, f.left, val)
        if left is False:
            return False
        right = eval_fo3(height, labels, f.right, val)
        if right is False:
            return False
        return None if (left is None or right is None) else True
    if isinstance(f, OrF):
        left = eval_fo3(height, labels, f.left, val)
        if left is True:
            return True
        right = eval_fo3(height, labels, f.right, val)
        if right is True:
            return True
        return None if (left is None or right is None) else False
    if isinstance(f, ImpliesF):
        left = eval_fo3(height, labels, f.left, val)
        if left is False:
            return True
        right = eval_fo3(height, labels, f.right, val)
        if right is True:
            return True
        return None if (left is None or right is None) else False
    if isinstance(f, QuantF):
        candidates = _quant_range(height, f, val)
        shadowed = val.get(f.var, _UNBOUND)
        saw_none = False
        try:
            if f.kind == "E":
                for pos in candidates:
                    val[f.var] = pos
                    v = eval_fo3(height, labels, f.body, val)
                    if v is True:
                        return True
                    if v is None:
                        saw_none = True
                return None if saw_none else False
            for pos in candidates:
                val[f.var] = pos
                v = eval_fo3(height, labels, f.body, val)
                if v is False:
                    return False
                if v is None:
                    saw_none = True
            return None if saw_none else True
        finally:
            if shadowed is _UNBOUND:
                val.pop(f.var, None)
            else:
                val[f.var] = shadowed
    raise TypeError(f"not a formula node: {f!r}")


# Local formulas and basic local sentences.


@dataclass(frozen=True)
class LocalFormula:
    """A formula around a centre variable whose quantifiers stay within `radius`.

    Every quantifier must carry a distance bound and be anchored, directly or
    through other bounded variables, to the centre; the accumulated reach
    (anchor reach plus bound) may not exceed the radius.  That syntactic
    discipline guarantees the formula only ever inspects the radius ball
    around the centre's value.  The alphabet is part of the formula because
    satisfiability depends on it.
    """

    center: str
    radius: int
    body: Formula
    alphabet: Alphabet

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be a natural number")
        stray = free_vars(self.body) - {self.center}
        if stray:
            raise ValueError(f"unbound variables {sorted(stray)} in local formula")
        _check_reach(self.body, {self.center: 0}, self.radius)


def _check_reach(f: Formula, reach: dict[str, int], radius: int):
    if isinstance(f, (LabelAtom, RootAtom, EdgeAtom, EqAtom)):
        return
    if isinstance(f, NotF):
        _check_reach(f.body, reach, radius)
    elif isinstance(f, (AndF, OrF, ImpliesF)):
        _check_reach(f.left, reach, radius)
        _check_reach(f.right, reach, radius)
    elif isinstance(f, QuantF):
        if f.bound is None:
            raise ValueError(f"unbounded quantifier on {f.var!r} in a local formula")
        b, anchor = f.bound
        if anchor not in reach:
            raise ValueError(f"quantifier anchor {anchor!r} is not in scope")
        if f.var in reach:
            raise ValueError(f"variable {f.var!r} shadows an enclosing variable")
        total = reach[anchor] + b
        if total > radius:
            raise ValueError(
                f"quantifier on {f.var!r} reaches distance {total} > radius {radius}"
            )
        _check_reach(f.body, {**reach, f.var: total}, radius)
    else:
        raise TypeError(f"not a formula node: {f!r}")


@dataclass(frozen=True)
class BasicLocalSentence:
    """Existence of one witness per local formula, pairwise further than 2*radius."""

    radius: int
    locals: tuple[LocalFormula, ...]

    def __post_init__(self):
        if not self.locals:
            raise ValueError("a basic local sentence needs at least one local formula")
        for lf in self.locals:
            if lf.radius != self.radius:
                raise ValueError("all local formulas must share the sentence radius")


@dataclass(frozen=True)
class RootCheck:
    """Holds on a tree iff some position of depth < radius satisfies the local."""

    local: LocalFormula
    radius: int


ReducedSentence = Union[combo.Top, combo.Bottom, RootCheck]


def eval_local(t: CompleteTree, lf: LocalFormula, pos: Position) -> bool:
    # The centre is the body's only free variable, so skip eval_fo's
    # per-call valuation validation.
    if len(pos) > t.height:
        raise PreconditionError(f"centre {pos!r} outside the tree domain")
    return _eval(t, lf.body, {lf.center: pos})


def eval_basic_local(t: CompleteTree, s: BasicLocalSentence) -> bool:
    """Direct semantics on a finite tree: disjoint-enough witnesses for each local."""
    positions = t.positions()
    candidate_sets = []
    for lf in s.locals:
        cands = [p for p in positions if _eval(t, lf.body, {lf.center: p})]
        if not cands:
            return False
        candidate_sets.append(cands)
    gap = 2 * s.radius
    chosen: list[Position] = []

    def place(i):
        if i == len(candidate_sets):
            return True
        for pos in candidate_sets[i]:
            if all(tree_distance(pos, q) > gap for q in chosen):
                chosen.append(pos)
                if place(i + 1):
                    return True
                chosen.pop()
        return False

    return place(0)


# Satisfiability and root-formula detection.
#
# A local formula only reads the radius ball around its centre, so its truth
# at a position depends only on that ball as a structure: the descent word
# from the ball's top node to the centre, whether the root is inside the
# ball (it is exactly when the centre's depth is <= radius), and the labels.
# Enumerating one representative centre per ball class, with labels only on
# ball positions, therefore decides satisfiability over all infinite trees.


def _class_representatives(radius: int, min_depth: int) -> list[Position]:
    reps = [w for w in positions_up_to(radius) if len(w) >= min_depth]
    deep = ["L" + "".join(s) for s in itertools.product("LR", repeat=radius)]
    reps.extend(w for w in deep if len(w) >= min_depth)
    return reps


def _satisfiable_at_class(
    lf: LocalFormula, center: Position, max_labellings: int
) -> bool:
    host_height = len(center) + lf.radius
    ball = [p for p in _ball_positions(center, lf.radius) if len(p) <= host_height]
    alphabet = lf.alphabet
    total = len(alphabet) ** len(ball)
    if total > max_labellings:
        raise BudgetExceededError(
            f"ball labelling enumeration at radius {lf.radius}",
            required=total,
            budget=max_labellings,
        )
    filler = alphabet.symbols[0]
    base = [filler] * node_count(host_height)
    indices = [heap_index(p) for p in ball]
    for labelling in itertools.product(alphabet.symbols, repeat=len(ball)):
        labels = list(base)
        for i, sym in zip(indices, labelling):
            labels[i] = sym
        host = CompleteTree(host_height, tuple(labels), alphabet)
        if eval_local(host, lf, center):
            return True
    return False


def is_satisfiable_local(lf: LocalFormula, max_labellings: int = DEFAULT_MAX_TREES) -> bool:
    """True iff some tree and position satisfy the local formula."""
    return any(
        _satisfiable_at_class(lf, rep, max_labellings)
        for rep in _class_representatives(lf.radius, min_depth=0)
    )


def is_root_formula(lf: LocalFormula, max_labellings: int = DEFAULT_MAX_TREES) -> bool:
    """True iff the formula is unsatisfiable at every position of depth >= radius."""
    return not any(
        _satisfiable_at_class(lf, rep, max_labellings)
        for rep in _class_representatives(lf.radius, min_depth=lf.radius)
    )


def _satisfiable_beyond_radius(lf: LocalFormula, max_labellings: int) -> bool:
    """Satisfiable at some position of depth strictly greater than the radius."""
    return any(
        _satisfiable_at_class(lf, rep, max_labellings)
        for rep in _class_representatives(lf.radius, min_depth=lf.radius + 1)
    )


def reduce_basic_local(
    s: BasicLocalSentence, max_labellings: int = DEFAULT_MAX_TREES
) -> ReducedSentence:
    """Collapse a basic local sentence to Bottom, Top, or its root check.

    Bottom when some local is unsatisfiable, or when two locals are root
    formulas (two witnesses within depth < r cannot be further apart than
    2r).  Top when satisfiable without a root formula.  Otherwise the unique
    root formula survives as a check on the root's neighbourhood.

    Rejects boundary formulas: a local that is satisfiable but only at depth
    exactly the radius (it sees the root at the edge of its ball) is neither
    a root formula nor plantable far from the root, so neither the Top nor
    the RootCheck branch computes its measure; answering would be wrong.
    """
    for lf in s.locals:
        if not is_satisfiable_local(lf, max_labellings):
            return combo.BOTTOM
    root_flags = [is_root_formula(lf, max_labellings) for lf in s.locals]
    if sum(root_flags) >= 2:
        return combo.BOTTOM
    for lf, is_root in zip(s.locals, root_flags):
        if not is_root and not _satisfiable_beyond_radius(lf, max_labellings):
            raise PreconditionError(
                "local formula is satisfiable only at depth exactly "
                f"{lf.radius}; the root-neighbourhood reduction does not "
                "cover such boundary formulas"
            )
    if not any(root_flags):
        return combo.TOP
    return RootCheck(s.locals[root_flags.index(True)], s.radius)


def eval_reduced(t: CompleteTree, rs: ReducedSentence) -> bool:
    if isinstance(rs, combo.Top):
        return True
    if isinstance(rs, combo.Bottom):
        return False
    if t.height < 2 * rs.radius - 1:
        raise PreconditionError(
            f"tree of height {t.height} too shallow for a radius-{rs.radius} root check"
        )
    centers = [p for p in positions_up_to(max(rs.radius - 1, 0)) if len(p) < rs.radius]
    body, var = rs.local.body, rs.local.center
    return any(_eval(t, body, {var: c}) for c in centers)


def eval_reduced3(height: int, labels: list, rs: ReducedSentence) -> Optional[bool]:
    if isinstance(rs, combo.Top):
        return True
    if isinstance(rs, combo.Bottom):
        return False
    centers = [p for p in positions_up_to(max(rs.radius - 1, 0)) if len(p) < rs.radius]
    saw_none = False
    for c in centers:
        v = eval_fo3(height, labels, rs.local.body, {rs.local.center: c})
        if v is True:
            return True
        if v is None:
            saw_none = True
    return None if saw_none else False


# GNF file format: alphabet, radius, named basic blocks, and an expression.


def parse_gnf_file(text: str):
    """Parse a file of basic local sentences combined by a Boolean expression.

    Returns (combo over BasicLocalSentence, alphabet, radius).
    """
    alphabet: Optional[Alphabet] = None
    radius: Optional[int] = None
    blocks: dict[str, BasicLocalSentence] = {}
    order: list[str] = []
    expr_line: Optional[str] = None
    current: Optional[tuple[str, list[LocalFormula]]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if current is not None:
            if parts[0] == "end":
                name, locals_ = current
                if not locals_:
                    raise ParseError(f"basic block {name!r} has no local formulas", line=lineno)
                blocks[name] = BasicLocalSentence(radius, tuple(locals_))
                current = None
            elif parts[0] == "local":
                rest = line[len("local"):].strip()
                if ":" not in rest:
                    raise ParseError("expected 'local <var>: <formula>'", line=lineno)
                var, body_text = rest.split(":", 1)
                var = var.strip()
                if not var.isidentifier():
                    raise ParseError(f"bad centre variable {var!r}", line=lineno)
                try:
                    body = parse_formula(body_text.strip(), alphabet)
                    lf = LocalFormula(center=var, radius=radius, body=body, alphabet=alphabet)
                except (ParseError, ValueError) as exc:
                    raise ParseError(str(exc), line=lineno) from None
                current[1].append(lf)
            else:
                raise ParseError(f"unexpected {parts[0]!r} inside a basic block", line=lineno)
            continue
        if parts[0] == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate alphabet line", line=lineno)
            try:
                alphabet = Alphabet(tuple(parts[1:]))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
        elif parts[0] == "radius":
            if radius is not None:
                raise ParseError("duplicate radius line", line=lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("expected 'radius <natural>'", line=lineno)
            radius = int(parts[1])
        elif parts[0] == "basic":
            if alphabet is None or radius is None:
                raise ParseError("alphabet and radius must precede basic blocks", line=lineno)
            if len(parts) != 2:
                raise ParseError("expected 'basic <name>'", line=lineno)
            if parts[1] in blocks:
                raise ParseError(f"duplicate basic block {parts[1]!r}", line=lineno)
            current = (parts[1], [])
            order.append(parts[1])
        elif parts[0] == "expr":
            if expr_line is not None:
                raise ParseError("duplicate expr line", line=lineno)
            expr_line = line[len("expr"):].strip()
        else:
            raise ParseError(f"unknown declaration {parts[0]!r}", line=lineno)
    if current is not None:
        raise ParseError(f"basic block {current[0]!r} not closed with 'end'")
    if alphabet is None:
        raise ParseError("missing alphabet line")
    if radius is None:
        raise ParseError("missing radius line")
    if not blocks:
        raise ParseError("no basic blocks declared")
    if expr_line is None:
        if len(blocks) != 1:
            raise ParseError("multiple basic blocks need an expr line")
        return combo.Leaf(blocks[order[0]]), alphabet, radius
    return combo.parse_combo_expr(expr_line, blocks), alphabet, radius
