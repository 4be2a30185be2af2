"""Anchored DAG data model for UCCA-style semantic graphs with implicit units.

A graph is anchored in a token sequence. Terminal nodes correspond 1:1 to
tokens and occupy ids 0..n-1 in surface order; the root and all created
nodes (nonterminals and implicit units) use subsequent ids, so every node
has a total creation index (the transition systems' Swap precondition
compares these indices).

Edges carry a foundational category, an optional refinement, and one of
three attributes:

  primary   backbone edges; every non-root node has exactly one primary
            or implicit parent, and these edges form a tree
  remote    reentrancies sharing a unit across parents
  implicit  the edge from a parent to an unanchored implicit unit

Refinements are only meaningful on implicit edges; the validator rejects
them elsewhere.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator


class Category(str, enum.Enum):
    """Foundational edge categories; the single-letter codes are the wire form."""

    A = "A"  # Participant
    C = "C"  # Center
    D = "D"  # Adverbial
    E = "E"  # Elaborator
    F = "F"  # Function
    G = "G"  # Ground
    H = "H"  # Parallel Scene
    L = "L"  # Linker
    N = "N"  # Connector
    P = "P"  # Process
    Q = "Q"  # Quantifier
    R = "R"  # Relator
    S = "S"  # State
    T = "T"  # Time
    U = "U"  # Punctuation


class Refinement(str, enum.Enum):
    """Fine-grained types of implicit units; values are the wire strings."""

    DEICTIC = "deictic"
    GENERIC = "generic"
    GENRE_BASED = "genre-based"
    TYPE_IDENTIFIABLE = "type-identifiable"
    NON_SPECIFIC = "non-specific"
    ITERATED_SET = "iterated-set"

    @property
    def display(self) -> str:
        """Capitalized form used in composite label strings ("Genre-based")."""
        return self.value[0].upper() + self.value[1:]


class NodeKind(str, enum.Enum):
    ROOT = "root"
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"
    IMPLICIT = "implicit"


class EdgeAttr(str, enum.Enum):
    PRIMARY = "primary"
    REMOTE = "remote"
    IMPLICIT = "implicit"


@dataclass(frozen=True)
class EdgeLabel:
    """A category with an optional refinement.

    Two text forms exist: the display form "A+Genre-based" (str()) and the
    lowercase trace form "A+genre-based" (trace_form). parse() accepts both,
    matching the refinement case-insensitively.
    """

    category: Category
    refinement: Refinement | None = None

    def __str__(self) -> str:
        if self.refinement is None:
            return self.category.value
        return f"{self.category.value}+{self.refinement.display}"

    @property
    def trace_form(self) -> str:
        if self.refinement is None:
            return self.category.value
        return f"{self.category.value}+{self.refinement.value}"

    @classmethod
    def parse(cls, text: str) -> "EdgeLabel":
        cat_text, plus, ref_text = text.partition("+")
        try:
            category = Category(cat_text.upper())
        except ValueError:
            raise ValueError(f"unknown category code {cat_text!r}") from None
        if not plus:
            return cls(category)
        try:
            refinement = Refinement(ref_text.lower())
        except ValueError:
            raise ValueError(f"unknown refinement {ref_text!r}") from None
        return cls(category, refinement)


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind


@dataclass(frozen=True)
class Edge:
    src: int
    tgt: int
    label: EdgeLabel
    attr: EdgeAttr = EdgeAttr.PRIMARY

    def sort_key(self) -> tuple:
        return (self.src, self.tgt, str(self.label), self.attr.value)


@dataclass(frozen=True)
class Violation:
    """A broken well-formedness rule, naming the offending node or edge."""

    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} ({self.subject}): {self.message}"


class InvalidGraphError(ValueError):
    """Raised by operations whose preconditions require a valid graph."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


class Graph:
    """An anchored DAG over a token sequence.

    Immutable after construction. Node and edge order is normalized (nodes
    by id, edges by (src, tgt, label, attr)), so structural equality is
    order-insensitive.
    """

    __slots__ = ("tokens", "nodes", "edges", "root", "_by_id", "_out", "_in",
                 "_yields", "_violations")

    def __init__(self, tokens: Iterable[str], nodes: Iterable[Node],
                 edges: Iterable[Edge], root: int):
        self.tokens: tuple[str, ...] = tuple(tokens)
        self.nodes: tuple[Node, ...] = tuple(sorted(nodes, key=lambda v: v.id))
        self.edges: tuple[Edge, ...] = tuple(sorted(edges, key=Edge.sort_key))
        self.root = root
        self._by_id: dict[int, Node] = {}
        for v in self.nodes:
            # duplicates are reported by validate(); keep the first
            self._by_id.setdefault(v.id, v)
        self._out: dict[int, list[Edge]] = {v.id: [] for v in self.nodes}
        self._in: dict[int, list[Edge]] = {v.id: [] for v in self.nodes}
        for e in self.edges:
            if e.src in self._out:
                self._out[e.src].append(e)
            if e.tgt in self._in:
                self._in[e.tgt].append(e)
        self._yields: dict[int, tuple[int, ...]] = {}
        self._violations: list[Violation] | None = None

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Graph)
                and self.tokens == other.tokens
                and self.nodes == other.nodes
                and self.edges == other.edges
                and self.root == other.root)

    def __hash__(self) -> int:
        return hash((self.tokens, self.nodes, self.edges, self.root))

    def __repr__(self) -> str:
        return (f"Graph(tokens={len(self.tokens)}, nodes={len(self.nodes)}, "
                f"edges={len(self.edges)}, root={self.root})")

    def has_node(self, nid: int) -> bool:
        return nid in self._by_id

    def node(self, nid: int) -> Node:
        return self._by_id[nid]

    def kind(self, nid: int) -> NodeKind:
        return self._by_id[nid].kind

    def outgoing(self, nid: int) -> list[Edge]:
        return self._out.get(nid, [])

    def incoming(self, nid: int) -> list[Edge]:
        return self._in.get(nid, [])

    def primary_parent_edge(self, nid: int) -> Edge | None:
        for e in self.incoming(nid):
            if e.attr is not EdgeAttr.REMOTE:
                return e
        return None

    @property
    def terminal_ids(self) -> list[int]:
        return [v.id for v in self.nodes if v.kind is NodeKind.TERMINAL]

    @property
    def implicit_ids(self) -> list[int]:
        return [v.id for v in self.nodes if v.kind is NodeKind.IMPLICIT]


def validate(g: Graph) -> list[Violation]:
    """Check every well-formedness rule; an empty list means the graph is valid.

    The result is cached on the graph (graphs are immutable).
    """
    if g._violations is not None:
        return list(g._violations)

    out: list[Violation] = []

    seen: set[int] = set()
    for v in g.nodes:
        if v.id in seen:
            out.append(Violation("DuplicateNodeId", f"node {v.id}",
                                 f"node id {v.id} occurs more than once"))
        seen.add(v.id)

    if g.root not in seen:
        out.append(Violation("BadRoot", f"node {g.root}",
                             "root id does not name a node"))
    elif g.node(g.root).kind is not NodeKind.ROOT:
        out.append(Violation("BadRoot", f"node {g.root}",
                             "designated root is not of kind root"))
    for v in g.nodes:
        if v.kind is NodeKind.ROOT and v.id != g.root:
            out.append(Violation("BadRoot", f"node {v.id}",
                                 "non-root node has kind root"))

    n = len(g.tokens)
    term_ids = sorted(v.id for v in g.nodes if v.kind is NodeKind.TERMINAL)
    if term_ids != list(range(n)):
        out.append(Violation(
            "TerminalIndex", "graph",
            f"terminal ids {term_ids} do not cover token positions 0..{n - 1}"))
    for v in g.nodes:
        if v.kind is not NodeKind.TERMINAL and v.id < n:
            out.append(Violation("TerminalIndex", f"node {v.id}",
                                 "non-terminal node uses a token-position id"))

    known_edges: list[Edge] = []
    for e in g.edges:
        if e.src not in seen or e.tgt not in seen:
            out.append(Violation("UnknownEndpoint", f"edge {e.src}->{e.tgt}",
                                 "edge endpoint is not a node of the graph"))
        else:
            known_edges.append(e)

    pair_counts: dict[tuple[int, int], int] = {}
    for e in known_edges:
        pair_counts[(e.src, e.tgt)] = pair_counts.get((e.src, e.tgt), 0) + 1
    for (src, tgt), cnt in sorted(pair_counts.items()):
        if cnt > 1:
            out.append(Violation("ParallelEdges", f"edge {src}->{tgt}",
                                 f"{cnt} edges connect the same node pair"))

    cyclic = _cycle_nodes(g, known_edges)
    if cyclic:
        ids = ",".join(str(i) for i in sorted(cyclic))
        out.append(Violation("Cycle", f"nodes {ids}",
                             "edges form a cycle through these nodes"))

    if g.root in seen and g.incoming(g.root):
        out.append(Violation("RootHasParent", f"node {g.root}",
                             "root must not have incoming edges"))

    for v in g.nodes:
        if v.id == g.root:
            continue
        parents = [e for e in g.incoming(v.id) if e.attr is not EdgeAttr.REMOTE]
        if not parents:
            out.append(Violation("MissingPrimaryParent", f"node {v.id}",
                                 "non-root node has no primary or implicit parent"))
        elif len(parents) > 1:
            out.append(Violation("MultiplePrimaryParents", f"node {v.id}",
                                 f"node has {len(parents)} primary/implicit parents"))

    for v in g.nodes:
        if v.kind is NodeKind.TERMINAL and g.outgoing(v.id):
            out.append(Violation("TerminalNotLeaf", f"node {v.id}",
                                 "terminal node has outgoing edges"))
        if v.kind is NodeKind.IMPLICIT and g.outgoing(v.id):
            out.append(Violation("ImplicitNotLeaf", f"node {v.id}",
                                 "implicit node has outgoing edges"))

    for e in known_edges:
        tgt_kind = g.kind(e.tgt)
        if e.attr is EdgeAttr.IMPLICIT and tgt_kind is not NodeKind.IMPLICIT:
            out.append(Violation("ImplicitEdgeMismatch", f"edge {e.src}->{e.tgt}",
                                 "implicit-attr edge targets a non-implicit node"))
        if tgt_kind is NodeKind.IMPLICIT and e.attr is EdgeAttr.PRIMARY:
            out.append(Violation("ImplicitEdgeMismatch", f"edge {e.src}->{e.tgt}",
                                 "implicit node attached through a primary edge"))
        if tgt_kind is NodeKind.IMPLICIT and e.attr is EdgeAttr.REMOTE:
            out.append(Violation("RemoteToImplicit", f"edge {e.src}->{e.tgt}",
                                 "remote edge targets an implicit node"))

    for e in known_edges:
        if e.label.refinement is not None and e.attr is not EdgeAttr.IMPLICIT:
            out.append(Violation("RefinementOnExplicit", f"edge {e.src}->{e.tgt}",
                                 "refinement is only allowed on implicit edges"))

    for e in known_edges:
        if e.attr is EdgeAttr.REMOTE and g.kind(e.tgt) is NodeKind.TERMINAL:
            parent = g.primary_parent_edge(e.tgt)
            if parent is not None and parent.label.category is Category.U:
                out.append(Violation("RemoteToPunctuation", f"edge {e.src}->{e.tgt}",
                                     "remote edge targets a punctuation token"))

    if g.root in seen:
        reachable = _primary_reachable(g, g.root)
        for t in term_ids:
            if t not in reachable:
                out.append(Violation("TerminalUnreachable", f"node {t}",
                                     "terminal not reachable from root via primary edges"))

    g._violations = out
    return list(out)


def _cycle_nodes(g: Graph, edges: list[Edge]) -> set[int]:
    """Node ids left with nonzero in-degree after Kahn elimination."""
    indeg = {v.id: 0 for v in g.nodes}
    succ: dict[int, list[int]] = {v.id: [] for v in g.nodes}
    for e in edges:
        indeg[e.tgt] += 1
        succ[e.src].append(e.tgt)
    queue = deque(sorted(i for i, d in indeg.items() if d == 0))
    remaining = set(indeg)
    while queue:
        u = queue.popleft()
        remaining.discard(u)
        for w in succ[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return remaining


def _primary_reachable(g: Graph, start: int) -> set[int]:
    reach = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for e in g.outgoing(u):
            if e.attr is EdgeAttr.PRIMARY and e.tgt not in reach:
                reach.add(e.tgt)
                queue.append(e.tgt)
    return reach


def primary_yield(g: Graph, v: int) -> tuple[int, ...]:
    """Terminal positions reachable from v through primary edges only.

    A terminal yields itself; an implicit node yields the empty tuple.
    Remote and implicit edges are not followed.
    """
    if not g.has_node(v):
        raise KeyError(f"unknown node id {v}")
    cached = g._yields.get(v)
    if cached is not None:
        return cached
    reach = _primary_reachable(g, v)
    result = tuple(sorted(t for t in reach if g.kind(t) is NodeKind.TERMINAL))
    g._yields[v] = result
    return result


@dataclass(frozen=True)
class ImplicitGroup:
    """The implicit children of one parent: its yield plus their labels.

    Labels are a multiset, stored sorted by display string. Parents with
    identical yields stay distinct here (keyed by parent id) and are merged
    by yield only at metric time.
    """

    parent: int
    span: tuple[int, ...]
    labels: tuple[EdgeLabel, ...]


def implicit_groups(g: Graph) -> list[ImplicitGroup]:
    """One group per parent with at least one implicit child, sorted by span."""
    bad = validate(g)
    if bad:
        raise InvalidGraphError(bad)
    per_parent: dict[int, list[EdgeLabel]] = {}
    for e in g.edges:
        if e.attr is EdgeAttr.IMPLICIT:
            per_parent.setdefault(e.src, []).append(e.label)
    groups = [
        ImplicitGroup(parent, primary_yield(g, parent),
                      tuple(sorted(labels, key=str)))
        for parent, labels in per_parent.items()
    ]
    groups.sort(key=lambda grp: (grp.span, grp.parent))
    return groups


def canonical_signature(g: Graph) -> tuple:
    """A hashable structural form, invariant under renaming of created nodes.

    Terminals keep their identity (position); nonterminals are represented
    by their recursively sorted child lists; implicit units by their edge
    labels alone. Remote edges are compared through canonical traversal
    indices. Two graphs are isomorphic modulo created-node ids iff their
    signatures are equal.
    """
    kids: dict[int, list[Edge]] = {}
    for e in g.edges:
        if e.attr is not EdgeAttr.REMOTE:
            kids.setdefault(e.src, []).append(e)

    big = 1 << 60
    reprs: dict[int, tuple] = {}
    sorted_kids: dict[int, list[Edge]] = {}

    def build(v: int) -> None:
        node = g.node(v)
        if node.kind is NodeKind.TERMINAL:
            reprs[v] = ("t", v)
            return
        if node.kind is NodeKind.IMPLICIT:
            reprs[v] = ("imp",)
            return
        out = kids.get(v, [])
        for e in out:
            if e.tgt not in reprs:
                build(e.tgt)

        def key(e: Edge) -> tuple:
            y = primary_yield(g, e.tgt)
            return (y[0] if y else big, str(e.label), e.attr.value,
                    repr(reprs[e.tgt]))

        ordered = sorted(out, key=key)
        sorted_kids[v] = ordered
        reprs[v] = ("n", tuple(
            (str(e.label), e.attr.value, reprs[e.tgt]) for e in ordered))

    if g.has_node(g.root):
        build(g.root)

    order: dict[int, int] = {}

    def assign(v: int) -> None:
        order[v] = len(order)
        for e in sorted_kids.get(v, []):
            if e.tgt not in order:
                assign(e.tgt)

    if g.has_node(g.root):
        assign(g.root)

    remotes = sorted(
        (order.get(e.src, -1 - e.src), order.get(e.tgt, -1 - e.tgt), str(e.label))
        for e in g.edges if e.attr is EdgeAttr.REMOTE)
    return (g.tokens, reprs.get(g.root, ()), tuple(remotes))


def graphs_equal(a: Graph, b: Graph) -> bool:
    """Structural equality modulo renaming of created (non-terminal) nodes."""
    return canonical_signature(a) == canonical_signature(b)


def iter_edges(g: Graph, attr: EdgeAttr) -> Iterator[Edge]:
    for e in g.edges:
        if e.attr is attr:
            yield e
