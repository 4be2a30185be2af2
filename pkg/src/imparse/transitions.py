"""Transition systems for incremental construction of anchored graphs.

Two closely related systems share one state shape. The eager system carries
a dedicated Implicit action that creates an implicit unit under the stack
top in one step, and its Node action attaches the new parent immediately.
The standard system drops both shortcuts: Node places an unattached concept
node on the buffer and implicit units are recovered from refined edges when
the finished state is read out.

State is immutable; apply returns a new state and never mutates its input.
"""

from __future__ import annotations

import dataclasses
import enum

from .graph import (Category, Edge, EdgeAttr, EdgeLabel, Graph, Node,
                    NodeKind, validate)


class SystemKind(str, enum.Enum):
    EAGER = "eager"
    STANDARD = "standard"


class ActionKind(str, enum.Enum):
    SHIFT = "shift"
    REDUCE = "reduce"
    NODE_EAGER = "node-eager"
    NODE_STANDARD = "node-standard"
    IMPLICIT = "implicit"
    LEFT_EDGE = "left-edge"
    RIGHT_EDGE = "right-edge"
    LEFT_REMOTE = "left-remote"
    RIGHT_REMOTE = "right-remote"
    SWAP = "swap"
    FINISH = "finish"


_TRACE_NAMES = {
    ActionKind.SHIFT: "SHIFT",
    ActionKind.REDUCE: "REDUCE",
    ActionKind.NODE_EAGER: "NODE",
    ActionKind.NODE_STANDARD: "NODE",
    ActionKind.IMPLICIT: "IMPLICIT",
    ActionKind.LEFT_EDGE: "LEFT-EDGE",
    ActionKind.RIGHT_EDGE: "RIGHT-EDGE",
    ActionKind.LEFT_REMOTE: "LEFT-REMOTE",
    ActionKind.RIGHT_REMOTE: "RIGHT-REMOTE",
    ActionKind.SWAP: "SWAP",
    ActionKind.FINISH: "FINISH",
}

# kinds whose actions carry an edge label
LABELLED_KINDS = frozenset({
    ActionKind.NODE_EAGER, ActionKind.IMPLICIT, ActionKind.LEFT_EDGE,
    ActionKind.RIGHT_EDGE, ActionKind.LEFT_REMOTE, ActionKind.RIGHT_REMOTE,
})


@dataclasses.dataclass(frozen=True)
class Action:
    kind: ActionKind
    label: EdgeLabel | None = None

    def __post_init__(self) -> None:
        if (self.label is not None) != (self.kind in LABELLED_KINDS):
            raise ValueError(
                f"action {self.kind.value} "
                + ("takes no label" if self.label is not None
                   else "requires a label"))

    def __str__(self) -> str:
        name = _TRACE_NAMES[self.kind]
        if self.label is None:
            return name
        return f"{name} {self.label.trace_form}"


def parse_action(text: str, system: SystemKind) -> Action:
    """Inverse of str(action); NODE resolves by the active system."""
    name, _, rest = text.strip().partition(" ")
    by_name = {"SHIFT": ActionKind.SHIFT, "REDUCE": ActionKind.REDUCE,
               "IMPLICIT": ActionKind.IMPLICIT,
               "LEFT-EDGE": ActionKind.LEFT_EDGE,
               "RIGHT-EDGE": ActionKind.RIGHT_EDGE,
               "LEFT-REMOTE": ActionKind.LEFT_REMOTE,
               "RIGHT-REMOTE": ActionKind.RIGHT_REMOTE,
               "SWAP": ActionKind.SWAP, "FINISH": ActionKind.FINISH}
    if name == "NODE":
        kind = (ActionKind.NODE_EAGER if system is SystemKind.EAGER
                else ActionKind.NODE_STANDARD)
    elif name in by_name:
        kind = by_name[name]
    else:
        raise ValueError(f"unknown action {name!r}")
    label = EdgeLabel.parse(rest) if rest else None
    return Action(kind, label)


class IllegalActionError(ValueError):
    def __init__(self, action: Action, reason: str):
        super().__init__(f"{action}: {reason}")
        self.action = action
        self.reason = reason


class TerminalStateError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class ParserState:
    """Stack/buffer configuration plus the partial graph built so far.

    Node ids follow the anchored-graph convention: terminals 0..n-1, the
    root is n, created nodes count up from n+1 in creation order. The kinds
    of created nodes live in created_kinds, indexed by id - n - 1.
    """

    tokens: tuple[str, ...]
    stack: tuple[int, ...]
    buffer: tuple[int, ...]
    edges: tuple[Edge, ...]
    created_kinds: tuple[NodeKind, ...]
    terminal: bool = False
    history: tuple[Action, ...] = ()

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @property
    def root(self) -> int:
        return len(self.tokens)

    @property
    def next_id(self) -> int:
        return len(self.tokens) + 1 + len(self.created_kinds)

    def kind_of(self, nid: int) -> NodeKind:
        if nid < self.n_tokens:
            return NodeKind.TERMINAL
        if nid == self.root:
            return NodeKind.ROOT
        return self.created_kinds[nid - self.root - 1]

    def has_node(self, nid: int) -> bool:
        return 0 <= nid < self.next_id

    def parent_edge(self, nid: int) -> Edge | None:
        """The primary or implicit in-edge, if built."""
        for e in self.edges:
            if e.tgt == nid and e.attr is not EdgeAttr.REMOTE:
                return e
        return None

    def outgoing(self, nid: int) -> list[Edge]:
        return [e for e in self.edges if e.src == nid]

    def has_edge(self, src: int, tgt: int) -> bool:
        return any(e.src == src and e.tgt == tgt for e in self.edges)


def initial_state(tokens: list[str] | tuple[str, ...]) -> ParserState:
    if not tokens:
        raise ValueError("cannot initialize on an empty token sequence")
    n = len(tokens)
    return ParserState(tokens=tuple(tokens), stack=(n,),
                       buffer=tuple(range(n)), edges=(), created_kinds=())


def maxsteps(n_tokens: int) -> int:
    """Watchdog bound on derivation length."""
    return 20 * n_tokens + 40


def _reachable(st: ParserState, start: int, goal: int) -> bool:
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        if v == goal:
            return True
        for e in st.edges:
            if e.src == v and e.tgt not in seen:
                seen.add(e.tgt)
                frontier.append(e.tgt)
    return False


def _node_cap(st: ParserState) -> bool:
    return len(st.created_kinds) < 2 * st.n_tokens + 8


def _check(st: ParserState, kind: ActionKind,
           system: SystemKind) -> str | None:
    """Structural legality; returns a reason string when illegal."""
    s0 = st.stack[-1] if st.stack else None
    s1 = st.stack[-2] if len(st.stack) >= 2 else None
    if kind is ActionKind.SHIFT:
        if not st.buffer:
            return "buffer is empty"
        return None
    if kind is ActionKind.REDUCE:
        if s0 is None:
            return "stack is empty"
        if s0 == st.root:
            return "cannot reduce the root"
        if st.parent_edge(s0) is None and st.buffer:
            return "node has no parent yet"
        return None
    if kind is ActionKind.NODE_EAGER:
        if system is not SystemKind.EAGER:
            return "not available in this system"
        if s0 is None or s0 == st.root:
            return "needs a non-root stack top"
        if st.parent_edge(s0) is not None:
            return "stack top already has a parent"
        if not _node_cap(st):
            return "node budget exhausted"
        return None
    if kind is ActionKind.NODE_STANDARD:
        if system is not SystemKind.STANDARD:
            return "not available in this system"
        if s0 is None or s0 == st.root:
            return "needs a non-root stack top"
        if not _node_cap(st):
            return "node budget exhausted"
        return None
    if kind is ActionKind.IMPLICIT:
        if system is not SystemKind.EAGER:
            return "not available in this system"
        if s0 is None or s0 == st.root:
            return "needs a non-root stack top"
        if st.kind_of(s0) in (NodeKind.TERMINAL, NodeKind.IMPLICIT):
            return "leaves cannot take implicit children"
        if not _node_cap(st):
            return "node budget exhausted"
        return None
    if kind in (ActionKind.LEFT_EDGE, ActionKind.LEFT_REMOTE,
                ActionKind.RIGHT_EDGE, ActionKind.RIGHT_REMOTE):
        if s1 is None:
            return "needs two stack items"
        left = kind in (ActionKind.LEFT_EDGE, ActionKind.LEFT_REMOTE)
        parent, child = (s0, s1) if left else (s1, s0)
        remote = kind in (ActionKind.LEFT_REMOTE, ActionKind.RIGHT_REMOTE)
        if st.kind_of(parent) in (NodeKind.TERMINAL, NodeKind.IMPLICIT):
            return "leaves cannot take children"
        if child == st.root:
            return "the root cannot be a child"
        if remote:
            if st.kind_of(child) is NodeKind.IMPLICIT:
                return "implicit units cannot take remote parents"
            pe = st.parent_edge(child)
            if pe is not None and pe.label.category is Category.U:
                return "punctuation cannot take remote parents"
        else:
            if st.parent_edge(child) is not None:
                return "child already has a parent"
        if st.has_edge(parent, child):
            return "edge already present"
        if _reachable(st, child, parent):
            return "would create a cycle"
        return None
    if kind is ActionKind.SWAP:
        if s1 is None:
            return "needs two stack items"
        if s1 == st.root:
            return "cannot swap the root"
        if s1 >= s0:
            return "second item is not older than the top"
        return None
    if kind is ActionKind.FINISH:
        if st.stack != (st.root,) or st.buffer:
            return "stack and buffer are not drained"
        return None
    raise AssertionError(kind)


def _check_label(action: Action, system: SystemKind) -> str | None:
    if action.label is None or action.label.refinement is None:
        return None
    if action.kind is ActionKind.IMPLICIT:
        return None
    if action.kind in (ActionKind.LEFT_EDGE, ActionKind.RIGHT_EDGE):
        if system is SystemKind.STANDARD:
            return None
        return "refined labels are restricted to implicit edges"
    return "refined labels are restricted to implicit edges"


def is_legal(st: ParserState, action: Action, system: SystemKind) -> bool:
    if st.terminal:
        return False
    return (_check(st, action.kind, system) is None
            and _check_label(action, system) is None)


def legal_actions(st: ParserState, system: SystemKind) -> set[ActionKind]:
    """Kinds with at least one legal instantiation in this state."""
    if st.terminal:
        raise TerminalStateError("no actions apply to a finished state")
    return {k for k in ActionKind if _check(st, k, system) is None}


def apply(st: ParserState, action: Action, system: SystemKind) -> ParserState:
    if st.terminal:
        raise IllegalActionError(action, "state is already finished")
    reason = _check(st, action.kind, system) or _check_label(action, system)
    if reason is not None:
        raise IllegalActionError(action, reason)
    kind = action.kind
    hist = st.history + (action,)
    rep = dataclasses.replace
    if kind is ActionKind.SHIFT:
        return rep(st, stack=st.stack + (st.buffer[0],),
                   buffer=st.buffer[1:], history=hist)
    if kind is ActionKind.REDUCE:
        return rep(st, stack=st.stack[:-1], history=hist)
    if kind is ActionKind.NODE_EAGER:
        y = st.next_id
        e = Edge(y, st.stack[-1], action.label)
        return rep(st, buffer=(y,) + st.buffer, edges=st.edges + (e,),
                   created_kinds=st.created_kinds + (NodeKind.NONTERMINAL,),
                   history=hist)
    if kind is ActionKind.NODE_STANDARD:
        y = st.next_id
        return rep(st, buffer=(y,) + st.buffer,
                   created_kinds=st.created_kinds + (NodeKind.NONTERMINAL,),
                   history=hist)
    if kind is ActionKind.IMPLICIT:
        y = st.next_id
        e = Edge(st.stack[-1], y, action.label, EdgeAttr.IMPLICIT)
        return rep(st, buffer=(y,) + st.buffer, edges=st.edges + (e,),
                   created_kinds=st.created_kinds + (NodeKind.IMPLICIT,),
                   history=hist)
    if kind in (ActionKind.LEFT_EDGE, ActionKind.LEFT_REMOTE,
                ActionKind.RIGHT_EDGE, ActionKind.RIGHT_REMOTE):
        s0, s1 = st.stack[-1], st.stack[-2]
        left = kind in (ActionKind.LEFT_EDGE, ActionKind.LEFT_REMOTE)
        parent, child = (s0, s1) if left else (s1, s0)
        remote = kind in (ActionKind.LEFT_REMOTE, ActionKind.RIGHT_REMOTE)
        e = Edge(parent, child, action.label,
                 EdgeAttr.REMOTE if remote else EdgeAttr.PRIMARY)
        return rep(st, edges=st.edges + (e,), history=hist)
    if kind is ActionKind.SWAP:
        return rep(st, stack=st.stack[:-2] + (st.stack[-1],),
                   buffer=(st.stack[-2],) + st.buffer, history=hist)
    if kind is ActionKind.FINISH:
        return rep(st, stack=(), terminal=True, history=hist)
    raise AssertionError(kind)


def _reclassify(st: ParserState) -> tuple[list[Node], list[Edge]]:
    """Created childless nodes reached by a primary edge become implicit.

    This is how the standard system encodes implicit units; the rule is
    system-agnostic because the eager system never produces such nodes.
    """
    has_out = {e.src for e in st.edges}
    nodes = [Node(i, NodeKind.TERMINAL) for i in range(st.n_tokens)]
    nodes.append(Node(st.root, NodeKind.ROOT))
    implicit_ids = set()
    for k, kind in enumerate(st.created_kinds):
        nid = st.root + 1 + k
        if (kind is NodeKind.NONTERMINAL and nid not in has_out
                and any(e.tgt == nid and e.attr is EdgeAttr.PRIMARY
                        for e in st.edges)):
            kind = NodeKind.IMPLICIT
            implicit_ids.add(nid)
        nodes.append(Node(nid, kind))
    edges = []
    for e in st.edges:
        if e.attr is EdgeAttr.PRIMARY and e.tgt in implicit_ids:
            e = Edge(e.src, e.tgt, e.label, EdgeAttr.IMPLICIT)
        edges.append(e)
    return nodes, edges


def extract_graph(st: ParserState, normalize: bool = False) -> Graph:
    """Read the finished state out as a graph.

    With normalize=True the result is additionally repaired into a valid
    graph: stray refinements are stripped, unattachable remotes dropped,
    edgeless created nodes deleted and orphan subtrees hung off the root.
    """
    if not st.terminal:
        raise ValueError("state has not been finished")
    nodes, edges = _reclassify(st)
    if not normalize:
        return Graph(st.tokens, nodes, edges, st.root)
    edges = [e if (e.attr is EdgeAttr.IMPLICIT or e.label.refinement is None)
             else Edge(e.src, e.tgt, EdgeLabel(e.label.category), e.attr)
             for e in edges]
    by_id = {v.id: v for v in nodes}
    changed = True
    while changed:
        changed = False
        incident: dict[int, int] = {}
        parent: dict[int, Edge] = {}
        for e in edges:
            incident[e.src] = incident.get(e.src, 0) + 1
            incident[e.tgt] = incident.get(e.tgt, 0) + 1
            if e.attr is not EdgeAttr.REMOTE:
                parent[e.tgt] = e
        drop_nodes = {v.id for v in nodes
                      if v.id > st.root and not incident.get(v.id)}
        keep_edges = []
        for e in edges:
            bad = e.src in drop_nodes or e.tgt in drop_nodes
            if e.attr is EdgeAttr.REMOTE:
                tgt_parent = parent.get(e.tgt)
                if (e.tgt not in parent
                        or by_id[e.tgt].kind is NodeKind.IMPLICIT
                        or (tgt_parent is not None
                            and tgt_parent.label.category is Category.U)):
                    bad = True
            if bad:
                changed = True
            else:
                keep_edges.append(e)
        edges = keep_edges
        if drop_nodes:
            nodes = [v for v in nodes if v.id not in drop_nodes]
            by_id = {v.id: v for v in nodes}
    attached = {e.tgt for e in edges if e.attr is not EdgeAttr.REMOTE}
    for v in nodes:
        if v.id != st.root and v.id not in attached:
            edges.append(Edge(st.root, v.id, EdgeLabel(Category.H)))
    g = Graph(st.tokens, nodes, edges, st.root)
    if validate(g):
        raise ValueError("normalization failed: "
                         + "; ".join(str(v) for v in validate(g)))
    return g
