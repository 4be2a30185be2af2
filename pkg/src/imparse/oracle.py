"""Static oracle: derive action sequences that rebuild a gold graph.

The oracle walks tiers in the fixed precedence order: Finish, then edges
between the two top stack items, then implicit emission, then parent
creation, then Reduce, Swap and Shift. Parents are created at the child
whose yield reaches furthest right, so by creation time the whole span of
the new node has already left the buffer; Swap is used purely as an
excavator that lifts older nodes out of the way when the stack top still
has an unbuilt edge to something buried deeper.

Graphs whose nonterminals all dominate at least one token round-trip; a
unit made of implicit leaves only can never be created and is reported as
stuck rather than silently skipped.
"""

from __future__ import annotations

import dataclasses

from .codec import Document
from .graph import (Edge, EdgeAttr, Graph, InvalidGraphError, NodeKind,
                    graphs_equal, primary_yield, validate)
from .transitions import (Action, ActionKind, ParserState, SystemKind, apply,
                          initial_state, maxsteps)

_POLICIES = ("default",)


@dataclasses.dataclass(frozen=True)
class OracleConfig:
    system: SystemKind = SystemKind.EAGER
    policy: str = "default"

    def __post_init__(self) -> None:
        if self.policy not in _POLICIES:
            raise ValueError(f"unknown oracle policy {self.policy!r}; "
                             f"registered: {', '.join(_POLICIES)}")


class OracleStuckError(RuntimeError):
    def __init__(self, message: str, state: ParserState | None = None):
        if state is not None:
            message += (f" [stack={list(state.stack)} "
                        f"buffer={list(state.buffer)} "
                        f"step={len(state.history)}]")
        super().__init__(message)
        self.state = state


class _Oracle:
    """Bookkeeping shared by one derivation: node maps and built edges."""

    def __init__(self, gold: Graph, cfg: OracleConfig):
        self.gold = gold
        self.cfg = cfg
        self.eager = cfg.system is SystemKind.EAGER
        n = len(gold.tokens)
        self.s2g = {i: i for i in range(n + 1)}
        self.g2s = dict(self.s2g)
        self.built: set[Edge] = set()
        self._out: dict[int, list[Edge]] = {}
        self._incident: dict[int, list[Edge]] = {}
        self._parent: dict[int, Edge] = {}
        for e in gold.edges:
            self._out.setdefault(e.src, []).append(e)
            self._incident.setdefault(e.src, []).append(e)
            self._incident.setdefault(e.tgt, []).append(e)
            if e.attr is not EdgeAttr.REMOTE:
                self._parent[e.tgt] = e
        # the child whose yield reaches furthest right triggers creation
        self.trigger: dict[int, int] = {}
        for v in self._out:
            best, best_pos = None, -1
            for e in self._out[v]:
                if e.attr is not EdgeAttr.PRIMARY:
                    continue
                y = primary_yield(gold, e.tgt)
                if y and y[-1] > best_pos:
                    best, best_pos = e.tgt, y[-1]
            if best is not None:
                self.trigger[v] = best

    def _unbuilt_between(self, a: int, b: int) -> Edge | None:
        for e in self._incident.get(a, ()):
            if e not in self.built and {e.src, e.tgt} == {a, b}:
                return e
        return None

    def _next_implicit(self, g: int) -> Edge | None:
        """The implicit out-edge due next, once explicit children are done."""
        pending = [e for e in self._out.get(g, ())
                   if e.attr is EdgeAttr.IMPLICIT and e not in self.built]
        if not pending:
            return None
        for e in self._out[g]:
            if e.attr is EdgeAttr.PRIMARY and e not in self.built:
                return None
        return min(pending, key=lambda e: (str(e.label), e.tgt))

    def _complete(self, g: int) -> bool:
        return all(e in self.built for e in self._out.get(g, ()))

    def _done(self, g: int) -> bool:
        return all(e in self.built for e in self._incident.get(g, ()))

    def _has_floater(self, st: ParserState) -> bool:
        touched = {e.src for e in st.edges} | {e.tgt for e in st.edges}
        return any(st.root + 1 + k not in touched
                   for k in range(len(st.created_kinds)))

    def _uncreated_parent(self, g: int) -> Edge | None:
        pe = self._parent.get(g)
        if (pe is not None and pe not in self.built
                and pe.src not in self.g2s):
            return pe
        return None

    def choose(self, st: ParserState) -> Action:
        S, B = st.stack, st.buffer
        if S == (st.root,) and not B:
            if len(self.built) == len(self.gold.edges):
                return Action(ActionKind.FINISH)
            raise OracleStuckError(
                f"{len(self.gold.edges) - len(self.built)} gold edges "
                "remain with nothing left to process", st)
        s0 = S[-1] if S else None
        if len(S) >= 2:
            g1, g0 = self.s2g[S[-2]], self.s2g[S[-1]]
            e = self._unbuilt_between(g1, g0)
            if e is not None and not (self.eager
                                      and e.attr is EdgeAttr.IMPLICIT):
                right = e.src == g1
                if e.attr is EdgeAttr.REMOTE:
                    kind = (ActionKind.RIGHT_REMOTE if right
                            else ActionKind.LEFT_REMOTE)
                else:
                    kind = (ActionKind.RIGHT_EDGE if right
                            else ActionKind.LEFT_EDGE)
                return Action(kind, e.label)
        if s0 is not None and s0 != st.root:
            g0 = self.s2g[s0]
            imp = self._next_implicit(g0)
            if imp is not None:
                if self.eager:
                    return Action(ActionKind.IMPLICIT, imp.label)
                if not self._has_floater(st):
                    return Action(ActionKind.NODE_STANDARD)
            pe = self._uncreated_parent(g0)
            if (imp is None and pe is not None and self._complete(g0)
                    and self.trigger.get(pe.src) == g0):
                if self.eager:
                    return Action(ActionKind.NODE_EAGER, pe.label)
                if not self._has_floater(st):
                    return Action(ActionKind.NODE_STANDARD)
            if self._done(g0):
                return Action(ActionKind.REDUCE)
        if len(S) >= 2 and S[-2] != st.root and S[-2] < S[-1]:
            g0 = self.s2g[S[-1]]
            if self._unbuilt_between(self.s2g[S[-2]], g0) is None:
                for v in S[:-2]:
                    if self._unbuilt_between(self.s2g[v], g0) is not None:
                        return Action(ActionKind.SWAP)
        if B:
            return Action(ActionKind.SHIFT)
        raise OracleStuckError("no tier applies", st)

    def note(self, st: ParserState, action: Action) -> None:
        """Record the effect of an action chosen for the given state."""
        kind = action.kind
        if kind in (ActionKind.SHIFT, ActionKind.REDUCE, ActionKind.SWAP,
                    ActionKind.FINISH):
            return
        s0 = st.stack[-1]
        g0 = self.s2g[s0]
        if kind is ActionKind.NODE_EAGER:
            pe = self._parent[g0]
            self._map(st.next_id, pe.src)
            self.built.add(pe)
            return
        if kind is ActionKind.IMPLICIT:
            e = self._next_implicit(g0)
            if e is None or e.label != action.label:
                raise OracleStuckError("state is off the oracle path", st)
            self._map(st.next_id, e.tgt)
            self.built.add(e)
            return
        if kind is ActionKind.NODE_STANDARD:
            e = self._next_implicit(g0)
            target = e.tgt if e is not None else self._parent[g0].src
            self._map(st.next_id, target)
            return
        left = kind in (ActionKind.LEFT_EDGE, ActionKind.LEFT_REMOTE)
        parent, child = ((st.stack[-1], st.stack[-2]) if left
                         else (st.stack[-2], st.stack[-1]))
        gp, gc = self.s2g[parent], self.s2g[child]
        remote = kind in (ActionKind.LEFT_REMOTE, ActionKind.RIGHT_REMOTE)
        for e in self._out.get(gp, ()):
            if (e.tgt == gc and e not in self.built
                    and e.label == action.label
                    and (e.attr is EdgeAttr.REMOTE) == remote):
                self.built.add(e)
                return
        raise OracleStuckError("state is off the oracle path", st)

    def _map(self, state_id: int, gold_id: int) -> None:
        self.s2g[state_id] = gold_id
        self.g2s[gold_id] = state_id


def oracle_next(st: ParserState, gold: Graph,
                cfg: OracleConfig) -> Action:
    """The action the oracle takes in st, reached by its own past actions.

    The full history is replayed to recover the node correspondence.
    Histories that do not reproduce the state, or that emit an implicit
    unit the gold graph lacks, raise OracleStuckError.
    """
    bad = validate(gold)
    if bad:
        raise InvalidGraphError(bad)
    oracle = _Oracle(gold, cfg)
    cur = initial_state(gold.tokens)
    for action in st.history:
        oracle.note(cur, action)
        cur = apply(cur, action, cfg.system)
    if cur != st:
        raise OracleStuckError("state does not match its own history", st)
    return oracle.choose(cur)


def oracle_sequence(gold: Graph, cfg: OracleConfig) -> list[Action]:
    """Full derivation for gold, ending in Finish."""
    bad = validate(gold)
    if bad:
        raise InvalidGraphError(bad)
    oracle = _Oracle(gold, cfg)
    cur = initial_state(gold.tokens)
    actions: list[Action] = []
    for _ in range(maxsteps(len(gold.tokens))):
        action = oracle.choose(cur)
        oracle.note(cur, action)
        cur = apply(cur, action, cfg.system)
        actions.append(action)
        if action.kind is ActionKind.FINISH:
            return actions
    raise OracleStuckError("derivation exceeded the step budget", cur)


def replay(tokens, actions, system: SystemKind) -> ParserState:
    """Apply a whole action sequence from a fresh state."""
    cur = initial_state(tokens)
    for action in actions:
        cur = apply(cur, action, system)
    return cur


@dataclasses.dataclass(frozen=True)
class RoundTrip:
    doc_id: str
    status: str  # equal | unequal | stuck | invalid
    detail: str = ""


@dataclasses.dataclass(frozen=True)
class RoundTripReport:
    results: tuple[RoundTrip, ...]

    @property
    def coverage(self) -> float:
        if not self.results:
            return 100.0
        ok = sum(1 for r in self.results if r.status == "equal")
        return 100.0 * ok / len(self.results)

    @property
    def ok(self) -> bool:
        return all(r.status == "equal" for r in self.results)

    def failures(self) -> list[RoundTrip]:
        return [r for r in self.results if r.status != "equal"]


def verify_roundtrip(corpus: list[Document],
                     cfg: OracleConfig) -> RoundTripReport:
    """Derive, replay and compare every document; never raises per-doc."""
    from .transitions import extract_graph
    results = []
    for doc in corpus:
        try:
            actions = oracle_sequence(doc.graph, cfg)
            final = replay(doc.graph.tokens, actions, cfg.system)
            rebuilt = extract_graph(final)
            if graphs_equal(doc.graph, rebuilt):
                results.append(RoundTrip(doc.id, "equal"))
            else:
                results.append(RoundTrip(doc.id, "unequal",
                                         "graphs differ after replay"))
        except InvalidGraphError as exc:
            results.append(RoundTrip(doc.id, "invalid", str(exc)))
        except OracleStuckError as exc:
            results.append(RoundTrip(doc.id, "stuck", str(exc)))
    return RoundTripReport(tuple(results))
