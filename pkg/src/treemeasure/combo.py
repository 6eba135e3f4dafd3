"""Boolean combinations over arbitrary leaf objects.

Used with pattern leaves (BCCQ), basic local sentences, and their reduced
forms.  Three-valued evaluation (True/False/None for undetermined) lets the
counting engine resolve combinations on partially labelled trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional

from .errors import ParseError


@dataclass(frozen=True)
class Top:
    def __repr__(self):
        return "Top"


@dataclass(frozen=True)
class Bottom:
    def __repr__(self):
        return "Bottom"


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True)
class Leaf:
    value: Any


@dataclass(frozen=True)
class Not:
    child: Any


@dataclass(frozen=True)
class And:
    left: Any
    right: Any


@dataclass(frozen=True)
class Or:
    left: Any
    right: Any


Combo = Any  # Leaf | Not | And | Or | Top | Bottom


def leaves(combo: Combo) -> Iterator[Any]:
    if isinstance(combo, Leaf):
        yield combo.value
    elif isinstance(combo, Not):
        yield from leaves(combo.child)
    elif isinstance(combo, (And, Or)):
        yield from leaves(combo.left)
        yield from leaves(combo.right)


def map_leaves(combo: Combo, f: Callable[[Any], Combo]) -> Combo:
    """Replace every leaf by f(leaf value); f may return combo nodes."""
    if isinstance(combo, Leaf):
        return f(combo.value)
    if isinstance(combo, Not):
        return Not(map_leaves(combo.child, f))
    if isinstance(combo, And):
        return And(map_leaves(combo.left, f), map_leaves(combo.right, f))
    if isinstance(combo, Or):
        return Or(map_leaves(combo.left, f), map_leaves(combo.right, f))
    return combo


def fold_constants(combo: Combo) -> Combo:
    """Constant-fold Top/Bottom nodes; leaves are untouched."""
    if isinstance(combo, Not):
        child = fold_constants(combo.child)
        if isinstance(child, Top):
            return BOTTOM
        if isinstance(child, Bottom):
            return TOP
        return Not(child)
    if isinstance(combo, And):
        left = fold_constants(combo.left)
        right = fold_constants(combo.right)
        if isinstance(left, Bottom) or isinstance(right, Bottom):
            return BOTTOM
        if isinstance(left, Top):
            return right
        if isinstance(right, Top):
            return left
        return And(left, right)
    if isinstance(combo, Or):
        left = fold_constants(combo.left)
        right = fold_constants(combo.right)
        if isinstance(left, Top) or isinstance(right, Top):
            return TOP
        if isinstance(left, Bottom):
            return right
        if isinstance(right, Bottom):
            return left
        return Or(left, right)
    return combo


def eval_combo(combo: Combo, leaf_truth: Callable[[Any], bool]) -> bool:
    if isinstance(combo, Top):
        return True
    if isinstance(combo, Bottom):
        return False
    if isinstance(combo, Leaf):
        return leaf_truth(combo.value)
    if isinstance(combo, Not):
        return not eval_combo(combo.child, leaf_truth)
    if isinstance(combo, And):
        return eval_combo(combo.left, leaf_truth) and eval_combo(combo.right, leaf_truth)
    if isinstance(combo, Or):
        return eval_combo(combo.left, leaf_truth) or eval_combo(combo.right, leaf_truth)
    raise TypeError(f"not a combo node: {combo!r}")


def eval_combo3(combo: Combo, leaf_truth3: Callable[[Any], Optional[bool]]) -> Optional[bool]:
    """Kleene three-valued evaluation; None propagates as undetermined."""
    if isinstance(combo, Top):
        return True
    if isinstance(combo, Bottom):
        return False
    if isinstance(combo, Leaf):
        return leaf_truth3(combo.value)
    if isinstance(combo, Not):
        v = eval_combo3(combo.child, leaf_truth3)
        return None if v is None else not v
    if isinstance(combo, And):
        left = eval_combo3(combo.left, leaf_truth3)
        if left is False:
            return False
        right = eval_combo3(combo.right, leaf_truth3)
        if right is False:
            return False
        if left is None or right is None:
            return None
        return True
    if isinstance(combo, Or):
        left = eval_combo3(combo.left, leaf_truth3)
        if left is True:
            return True
        right = eval_combo3(combo.right, leaf_truth3)
        if right is True:
            return True
        if left is None or right is None:
            return None
        return False
    raise TypeError(f"not a combo node: {combo!r}")


def parse_combo_expr(text: str, named_leaves: dict[str, Any]) -> Combo:
    """Parse `!`, `&`, `|`, parentheses over leaf names (! binds tightest)."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None:
            raise ParseError(f"unexpected end of expression: {text!r}")
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r} in {text!r}")
        pos += 1
        return tok

    def parse_or():
        node = parse_and()
        while peek() == "|":
            take()
            node = Or(node, parse_and())
        return node

    def parse_and():
        node = parse_unary()
        while peek() == "&":
            take()
            node = And(node, parse_unary())
        return node

    def parse_unary():
        tok = peek()
        if tok == "!":
            take()
            return Not(parse_unary())
        if tok == "(":
            take()
            node = parse_or()
            take(")")
            return node
        if tok is None or tok in "&|)!":
            raise ParseError(f"expected a name, found {tok!r} in {text!r}")
        take()
        if tok not in named_leaves:
            raise ParseError(f"unknown name {tok!r} in expression")
        return Leaf(named_leaves[tok])

    node = parse_or()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens after expression: {tokens[pos:]}")
    return node


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "&|!()":
            tokens.append(c)
            i += 1
        elif c.isalnum() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError(f"bad character {c!r} in expression {text!r}")
    return tokens
