"""Tree patterns (conjunctive queries) and their structural analysis.

A pattern is a labelled graph over four edge kinds: left child (L), right
child (R), some child (S), and strict ancestor (A), plus root-flagged and
optionally labelled vertices.  A complete tree satisfies a pattern iff a
homomorphism maps vertices to positions respecting all of that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from . import combo
from .errors import (
    DEFAULT_MAX_SEARCH_NODES,
    BudgetExceededError,
    ParseError,
    PreconditionError,
)
from .trees import Alphabet, CompleteTree, Position, node_count, positions_up_to

EDGE_KINDS = ("L", "R", "S", "A")


@dataclass(frozen=True)
class Pattern:
    vertices: tuple[str, ...]
    labels: Mapping[str, str]
    root_flag: frozenset[str]
    edges_L: tuple[tuple[str, str], ...]
    edges_R: tuple[tuple[str, str], ...]
    edges_S: tuple[tuple[str, str], ...]
    edges_A: tuple[tuple[str, str], ...]
    alphabet: Alphabet

    def __post_init__(self):
        declared = set(self.vertices)
        if len(declared) != len(self.vertices):
            raise ValueError("duplicate vertex declaration")
        for v in self.root_flag:
            if v not in declared:
                raise ValueError(f"root flag on undeclared vertex {v!r}")
        for v, sym in self.labels.items():
            if v not in declared:
                raise ValueError(f"label on undeclared vertex {v!r}")
            if sym not in self.alphabet:
                raise ValueError(f"label {sym!r} not in alphabet")
        for kind in EDGE_KINDS:
            for x, y in self.edges(kind):
                if x not in declared or y not in declared:
                    raise ValueError(f"edge {kind} {x} {y} uses an undeclared vertex")

    def edges(self, kind: str) -> tuple[tuple[str, str], ...]:
        return getattr(self, f"edges_{kind}")

    def all_edges(self):
        for kind in EDGE_KINDS:
            for pair in self.edges(kind):
                yield kind, pair

    def size(self) -> int:
        """N(pattern) = vertex count plus total edge count."""
        return len(self.vertices) + sum(len(self.edges(k)) for k in EDGE_KINDS)


@dataclass(frozen=True)
class HomWitness:
    assignment: Mapping[str, Position]


@dataclass(frozen=True)
class FirmDecomposition:
    components: tuple[tuple[str, ...], ...]
    dag_edges: tuple[tuple[int, int], ...]
    root_component: Optional[int]


def parse_pattern(text: str) -> Pattern:
    """Parse the pattern file grammar (alphabet / vertex / edge lines)."""
    alphabet = None
    vertices: list[str] = []
    labels: dict[str, str] = {}
    roots: set[str] = set()
    edges: dict[str, list[tuple[str, str]]] = {k: [] for k in EDGE_KINDS}
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
        elif parts[0] == "vertex":
            if alphabet is None:
                raise ParseError("alphabet line must precede vertex declarations", line=lineno)
            if len(parts) < 2:
                raise ParseError("vertex declaration needs a name", line=lineno)
            name = parts[1]
            if name in vertices:
                raise ParseError(f"duplicate vertex {name!r}", line=lineno)
            vertices.append(name)
            for opt in parts[2:]:
                if opt == "root":
                    roots.add(name)
                elif opt.startswith("label="):
                    sym = opt[len("label="):]
                    if sym not in alphabet:
                        raise ParseError(f"unknown symbol {sym!r}", line=lineno)
                    labels[name] = sym
                else:
                    raise ParseError(f"unknown vertex option {opt!r}", line=lineno)
        elif parts[0] == "edge":
            if len(parts) != 4:
                raise ParseError("expected 'edge <kind> <from> <to>'", line=lineno)
            kind, x, y = parts[1], parts[2], parts[3]
            if kind not in EDGE_KINDS:
                raise ParseError(f"unknown edge kind {kind!r}", line=lineno)
            for v in (x, y):
                if v not in vertices:
                    raise ParseError(f"undeclared vertex {v!r} in edge", line=lineno)
            if (x, y) not in edges[kind]:
                edges[kind].append((x, y))
        else:
            raise ParseError(f"unknown declaration {parts[0]!r}", line=lineno)
    if alphabet is None:
        raise ParseError("missing alphabet line")
    return Pattern(
        vertices=tuple(vertices),
        labels=labels,
        root_flag=frozenset(roots),
        edges_L=tuple(edges["L"]),
        edges_R=tuple(edges["R"]),
        edges_S=tuple(edges["S"]),
        edges_A=tuple(edges["A"]),
        alphabet=alphabet,
    )


def render_pattern(p: Pattern) -> str:
    lines = [f"alphabet {' '.join(p.alphabet.symbols)}"]
    for v in p.vertices:
        opts = []
        if v in p.labels:
            opts.append(f"label={p.labels[v]}")
        if v in p.root_flag:
            opts.append("root")
        lines.append(" ".join(["vertex", v] + opts))
    for kind, (x, y) in p.all_edges():
        lines.append(f"edge {kind} {x} {y}")
    return "\n".join(lines) + "\n"


# Homomorphism checking.
#
# Pinned vertices (root flags, and anything reachable from them through the
# functional L/R edges) are resolved by unit propagation; the rest is
# backtracking in a fixed order, so returned witnesses are deterministic.


def _propagate_pins(p: Pattern, max_depth: int) -> Optional[dict[str, Position]]:
    """Pin root-flagged vertices and close under L/R edges; None on conflict."""
    assign: dict[str, Position] = {}

    def put(v, pos):
        if len(pos) > max_depth:
            return False
        old = assign.get(v)
        if old is None:
            assign[v] = pos
            queue.append(v)
            return True
        return old == pos

    queue: list[str] = []
    for v in p.root_flag:
        if not put(v, ""):
            return None
    while queue:
        v = queue.pop()
        pos = assign[v]
        for x, y in p.edges_L:
            if x == v and not put(y, pos + "L"):
                return None
            if y == v:
                if not pos.endswith("L") or not put(x, pos[:-1]):
                    return None
        for x, y in p.edges_R:
            if x == v and not put(y, pos + "R"):
                return None
            if y == v:
                if not pos.endswith("R") or not put(x, pos[:-1]):
                    return None
    return assign


def _neighbour_order(p: Pattern, assigned: set[str]) -> list[str]:
    """Remaining vertices, most-constrained tiers first, connected walk within ties."""
    remaining = [v for v in p.vertices if v not in assigned]
    if not remaining:
        return []
    adjacency: dict[str, list[str]] = {v: [] for v in p.vertices}
    for _, (x, y) in p.all_edges():
        adjacency[x].append(y)
        adjacency[y].append(x)

    def tier(v):
        kinds = {k for k in EDGE_KINDS for (x, y) in p.edges(k) if v in (x, y)}
        if "L" in kinds or "R" in kinds:
            t = 0
        elif "S" in kinds:
            t = 1
        elif "A" in kinds:
            t = 2
        else:
            t = 3
        return (t, 0 if v in p.labels else 1, p.vertices.index(v))

    order: list[str] = []
    placed = set(assigned)
    candidates = sorted(remaining, key=tier)
    for seed in candidates:
        if seed in placed:
            continue
        # BFS from the seed so later vertices touch an already-ordered one.
        frontier = [seed]
        placed.add(seed)
        order.append(seed)
        while frontier:
            v = frontier.pop(0)
            for w in sorted(set(adjacency[v]), key=p.vertices.index):
                if w not in placed:
                    placed.add(w)
                    order.append(w)
                    frontier.append(w)
    return order


def _candidate_positions(p, v, assign, height, label_filter):
    """Positions v may take given already-assigned neighbours; heap order."""
    cands: Optional[set[Position]] = None

    def narrow(options):
        nonlocal cands
        cands = set(options) if cands is None else cands & set(options)

    for x, y in p.edges_L:
        if x == v and y in assign:
            pos = assign[y]
            narrow([pos[:-1]] if pos.endswith("L") else [])
        if y == v and x in assign:
            child = assign[x] + "L"
            narrow([child] if len(child) <= height else [])
    for x, y in p.edges_R:
        if x == v and y in assign:
            pos = assign[y]
            narrow([pos[:-1]] if pos.endswith("R") else [])
        if y == v and x in assign:
            child = assign[x] + "R"
            narrow([child] if len(child) <= height else [])
    for x, y in p.edges_S:
        if x == v and y in assign:
            pos = assign[y]
            narrow([pos[:-1]] if pos else [])
        if y == v and x in assign:
            base = assign[x]
            narrow([base + c for c in "LR" if len(base) + 1 <= height])
    for x, y in p.edges_A:
        if x == v and y in assign:
            pos = assign[y]
            narrow([pos[:k] for k in range(len(pos))])
        if y == v and x in assign:
            base = assign[x]
            narrow(
                base + tail
                for tail in positions_up_to(height - len(base))
                if tail
            )
    if cands is None:
        cands = set(positions_up_to(height))
    if label_filter is not None:
        cands = {pos for pos in cands if label_filter(v, pos)}
    return sorted(cands, key=lambda w: (len(w), w))


def _edges_consistent(p, v, pos, assign) -> bool:
    """Check every edge touching v whose endpoints are all resolved by pos/assign."""

    def at(w):
        return pos if w == v else assign.get(w)

    for x, y in p.edges_L:
        if v in (x, y):
            a, b = at(x), at(y)
            if a is not None and b is not None and b != a + "L":
                return False
    for x, y in p.edges_R:
        if v in (x, y):
            a, b = at(x), at(y)
            if a is not None and b is not None and b != a + "R":
                return False
    for x, y in p.edges_S:
        if v in (x, y):
            a, b = at(x), at(y)
            if a is not None and b is not None and not (len(b) == len(a) + 1 and b[:-1] == a):
                return False
    for x, y in p.edges_A:
        if v in (x, y):
            a, b = at(x), at(y)
            if a is not None and b is not None and not (a != b and b.startswith(a)):
                return False
    return True


def _search_hom(p, height, label_filter, max_nodes=DEFAULT_MAX_SEARCH_NODES):
    """Backtracking homomorphism search into the complete domain of `height`."""
    assign = _propagate_pins(p, height)
    if assign is None:
        return None
    if label_filter is not None:
        for v, pos in assign.items():
            if not label_filter(v, pos):
                return None
    for v, pos in assign.items():
        if not _edges_consistent(p, v, pos, assign):
            return None
    order = _neighbour_order(p, set(assign))
    nodes = 0

    def extend(i):
        nonlocal nodes
        if i == len(order):
            return dict(assign)
        v = order[i]
        for pos in _candidate_positions(p, v, assign, height, label_filter):
            nodes += 1
            if nodes > max_nodes:
                raise BudgetExceededError(
                    "homomorphism search", required=nodes, budget=max_nodes
                )
            if not _edges_consistent(p, v, pos, assign):
                continue
            assign[v] = pos
            found = extend(i + 1)
            if found is not None:
                return found
            del assign[v]
        return None

    return extend(0)


def check_hom(p: Pattern, t: CompleteTree) -> Optional[HomWitness]:
    """Find a homomorphism from the pattern into the tree, or None.

    Deterministic: vertices are resolved most-constrained-first and positions
    tried in level-then-lexicographic order, so the same witness is returned
    on every call.
    """
    if p.alphabet != t.alphabet:
        raise PreconditionError("pattern and tree alphabets differ")
    labels = p.labels

    def label_ok(v, pos):
        want = labels.get(v)
        return want is None or t.label_at(pos) == want

    found = _search_hom(p, t.height, label_ok)
    return None if found is None else HomWitness(found)


def verify_hom(p: Pattern, t: CompleteTree, w: HomWitness) -> bool:
    """Independent witness checker; positions outside the tree make it False."""
    assign = w.assignment
    for v in p.vertices:
        if v not in assign:
            raise PreconditionError(f"witness missing vertex {v!r}")
    for v in p.vertices:
        if assign[v] not in t:
            return False
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


def hom_partial(p: Pattern, height: int, labels: list) -> Optional[bool]:
    """Three-valued homomorphism test against a partially labelled tree.

    `labels` is a heap-ordered list where None marks an unassigned node.
    True: a homomorphism exists whatever the missing labels become.
    False: no homomorphism exists under any completion.  None: undecided.
    """
    from .trees import heap_index

    def optimistic(v, pos):
        want = p.labels.get(v)
        if want is None:
            return True
        have = labels[heap_index(pos)]
        return have is None or have == want

    def strict(v, pos):
        want = p.labels.get(v)
        if want is None:
            return True
        return labels[heap_index(pos)] == want

    found = _search_hom(p, height, optimistic)
    if found is None:
        return False
    if all(strict(v, pos) for v, pos in found.items()):
        return True
    if _search_hom(p, height, strict) is not None:
        return True
    return None


# Firm decomposition (strongly connected components of the auxiliary graph).


def _auxiliary_graph(p: Pattern) -> dict[str, list[str]]:
    """Child edges both ways, ancestor edges one way, root vertices to all."""
    adj: dict[str, list[str]] = {v: [] for v in p.vertices}
    for kind in ("L", "R", "S"):
        for x, y in p.edges(kind):
            adj[x].append(y)
            adj[y].append(x)
    for x, y in p.edges_A:
        adj[x].append(y)
    for v in p.root_flag:
        for w in p.vertices:
            if w != v:
                adj[v].append(w)
    return adj


def _tarjan_sccs(vertices, adj):
    """Iterative Tarjan; returns SCCs as sets."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[set[str]] = []
    counter = 0

    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                scc = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.add(w)
                    if w == v:
                        break
                sccs.append(scc)
    return sccs


def firm_decomposition(p: Pattern) -> FirmDecomposition:
    """Split the pattern into firm sub-patterns and the DAG between them."""
    adj = _auxiliary_graph(p)
    sccs = _tarjan_sccs(p.vertices, adj)
    order = {v: i for i, v in enumerate(p.vertices)}
    comps = tuple(
        tuple(sorted(scc, key=order.get))
        for scc in sorted(sccs, key=lambda s: min(order[v] for v in s))
    )
    comp_of = {v: i for i, comp in enumerate(comps) for v in comp}
    dag = []
    for x, y in p.edges_A:
        e = (comp_of[x], comp_of[y])
        if e[0] != e[1] and e not in dag:
            dag.append(e)
    root_comp = None
    for v in p.root_flag:
        root_comp = comp_of[v]
        break
    return FirmDecomposition(components=comps, dag_edges=tuple(sorted(dag)), root_component=root_comp)


def induced_subpattern(p: Pattern, keep: tuple[str, ...]) -> Pattern:
    """Sub-pattern on `keep` with every edge whose endpoints both survive."""
    kept = set(keep)

    def filter_edges(pairs):
        return tuple((x, y) for x, y in pairs if x in kept and y in kept)

    return Pattern(
        vertices=tuple(v for v in p.vertices if v in kept),
        labels={v: s for v, s in p.labels.items() if v in kept},
        root_flag=frozenset(v for v in p.root_flag if v in kept),
        edges_L=filter_edges(p.edges_L),
        edges_R=filter_edges(p.edges_R),
        edges_S=filter_edges(p.edges_S),
        edges_A=filter_edges(p.edges_A),
        alphabet=p.alphabet,
    )


def root_component_pattern(p: Pattern) -> Optional[Pattern]:
    dec = firm_decomposition(p)
    if dec.root_component is None:
        return None
    return induced_subpattern(p, dec.components[dec.root_component])


# Satisfiability.


def _has_descent_cycle(p: Pattern) -> bool:
    """Every edge kind forces its target strictly below its source, so a
    directed cycle over the union certifies unsatisfiability."""
    below: dict[str, set[str]] = {v: set() for v in p.vertices}
    for _, (x, y) in p.all_edges():
        below[x].add(y)
    state: dict[str, int] = {}

    def walk(v):
        state[v] = 1
        for w in below[v]:
            mark = state.get(w)
            if mark == 1:
                return True
            if mark is None and walk(w):
                return True
        state[v] = 2
        return False

    return any(state.get(v) is None and walk(v) for v in p.vertices)


def is_satisfiable_pattern(
    p: Pattern,
    max_nodes: int = DEFAULT_MAX_SEARCH_NODES,
    depth_bound: Optional[int] = None,
) -> Optional[tuple[CompleteTree, HomWitness]]:
    """Search for a model: assign vertices to positions of depth <= size(p).

    Firm components span less than their size and only ancestor edges cross
    components, so stacked components fit within depth size(p).  Returns a
    height-size(p) model with demanded labels set and everything else filled
    with the first alphabet symbol, or None when unsatisfiable.
    """
    if _has_descent_cycle(p):
        return None
    bound = p.size() if depth_bound is None else depth_bound
    demands: dict[Position, str] = {}

    def label_ok(v, pos):
        want = p.labels.get(v)
        if want is None:
            return True
        have = demands.get(pos)
        return have is None or have == want

    assign = _propagate_pins(p, bound)
    if assign is None:
        return None
    for v, pos in assign.items():
        if not _edges_consistent(p, v, pos, assign):
            return None
        want = p.labels.get(v)
        if want is not None:
            if demands.get(pos, want) != want:
                return None
            demands[pos] = want
    order = _neighbour_order(p, set(assign))
    nodes = 0

    def extend(i):
        nonlocal nodes
        if i == len(order):
            return True
        v = order[i]
        want = p.labels.get(v)
        for pos in _candidate_positions(p, v, assign, bound, label_ok):
            nodes += 1
            if nodes > max_nodes:
                raise BudgetExceededError(
                    "satisfiability search", required=nodes, budget=max_nodes
                )
            if not _edges_consistent(p, v, pos, assign):
                continue
            assign[v] = pos
            had = demands.get(pos)
            if want is not None:
                demands[pos] = want
            if extend(i + 1):
                return True
            del assign[v]
            if want is not None:
                if had is None:
                    del demands[pos]
                else:
                    demands[pos] = had
        return False

    if not extend(0):
        return None
    fill = p.alphabet.symbols[0]
    labels = [fill] * node_count(bound)
    from .trees import heap_index

    for pos, sym in demands.items():
        labels[heap_index(pos)] = sym
    model = CompleteTree(bound, tuple(labels), p.alphabet)
    return model, HomWitness(dict(assign))


# Boolean-combination files over named pattern blocks.


def parse_bccq_file(text: str) -> tuple[combo.Combo, Alphabet]:
    """Parse `alphabet`, named `pattern <name> ... end` blocks, and `expr`."""
    alphabet_line = None
    blocks: dict[str, Pattern] = {}
    expr_line = None
    current: Optional[tuple[str, list[str]]] = None
    order: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if current is not None:
            if parts[0] == "end":
                name, body = current
                blocks[name] = parse_pattern("\n".join([alphabet_line] + body))
                current = None
            else:
                current[1].append(line)
            continue
        if parts[0] == "alphabet":
            if alphabet_line is not None:
                raise ParseError("duplicate alphabet line", line=lineno)
            alphabet_line = line
        elif parts[0] == "pattern":
            if alphabet_line is None:
                raise ParseError("alphabet line must precede pattern blocks", line=lineno)
            if len(parts) != 2:
                raise ParseError("expected 'pattern <name>'", line=lineno)
            if parts[1] in blocks:
                raise ParseError(f"duplicate pattern name {parts[1]!r}", line=lineno)
            current = (parts[1], [])
            order.append(parts[1])
        elif parts[0] == "expr":
            if expr_line is not None:
                raise ParseError("duplicate expr line", line=lineno)
            expr_line = line[len("expr"):].strip()
        else:
            raise ParseError(f"unknown declaration {parts[0]!r}", line=lineno)
    if current is not None:
        raise ParseError(f"pattern block {current[0]!r} not closed with 'end'")
    if alphabet_line is None:
        raise ParseError("missing alphabet line")
    if not blocks:
        raise ParseError("no pattern blocks declared")
    alphabet = next(iter(blocks.values())).alphabet
    if expr_line is None:
        if len(blocks) != 1:
            raise ParseError("multiple pattern blocks need an expr line")
        return combo.Leaf(blocks[order[0]]), alphabet
    return combo.parse_combo_expr(expr_line, blocks), alphabet
