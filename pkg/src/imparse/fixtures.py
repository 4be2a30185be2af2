"""Hand-built graphs and synthetic corpora for tests, demos and benchmarks.

The builders here are the ground truth the rest of the test suite leans on:
a small review-domain fixture corpus exercising every category, all six
refinements, remote edges, multi-implicit parents and discontinuities, plus
two gold/predicted evaluation pairs with known metric outcomes, and a
deterministic synthetic corpus whose split statistics match the reference
counts used by the stats command's tests.
"""

from __future__ import annotations

import random

from .codec import Document
from .graph import (Category, Edge, EdgeAttr, EdgeLabel, Graph, Node,
                    NodeKind, Refinement)


class GraphBuilder:
    """Incremental construction helper keeping the node-id discipline.

    Terminals take ids 0..n-1, the root is n, created nodes follow.
    """

    def __init__(self, tokens: list[str] | tuple[str, ...]):
        self.tokens = tuple(tokens)
        self.nodes: list[Node] = [Node(i, NodeKind.TERMINAL)
                                  for i in range(len(self.tokens))]
        self.root = len(self.tokens)
        self.nodes.append(Node(self.root, NodeKind.ROOT))
        self.edges: list[Edge] = []
        self._next = self.root + 1

    def unit(self, parent: int, label: str) -> int:
        """New nonterminal attached under parent by a primary edge."""
        nid = self._next
        self._next += 1
        self.nodes.append(Node(nid, NodeKind.NONTERMINAL))
        self.edges.append(Edge(parent, nid, EdgeLabel.parse(label)))
        return nid

    def tok(self, parent: int, idx: int, label: str) -> None:
        self.edges.append(Edge(parent, idx, EdgeLabel.parse(label)))

    def imp(self, parent: int, label: str) -> int:
        """New implicit unit under parent; label may carry a refinement."""
        nid = self._next
        self._next += 1
        self.nodes.append(Node(nid, NodeKind.IMPLICIT))
        self.edges.append(Edge(parent, nid, EdgeLabel.parse(label),
                               EdgeAttr.IMPLICIT))
        return nid

    def remote(self, src: int, tgt: int, label: str) -> None:
        self.edges.append(Edge(src, tgt, EdgeLabel.parse(label),
                               EdgeAttr.REMOTE))

    def graph(self) -> Graph:
        return Graph(self.tokens, self.nodes, self.edges, self.root)

    def document(self, doc_id: str) -> Document:
        text = " ".join(self.tokens)
        spans = []
        pos = 0
        for t in self.tokens:
            spans.append((pos, pos + len(t)))
            pos += len(t) + 1
        return Document(doc_id, text, tuple(spans), self.graph())


def review_doc() -> Document:
    """Two-scene web review with three refined implicit arguments."""
    b = GraphBuilder(["Great", "service", "and", "awesome", "prices", "."])
    sc1 = b.unit(b.root, "H")
    b.tok(sc1, 0, "D")
    b.tok(sc1, 1, "P")
    b.imp(sc1, "A+Generic")
    b.imp(sc1, "A+Genre-based")
    b.tok(b.root, 2, "L")
    sc2 = b.unit(b.root, "H")
    b.tok(sc2, 3, "S")
    b.tok(sc2, 4, "A")
    b.imp(sc2, "A+Genre-based")
    b.tok(sc2, 5, "U")
    return b.document("review")


def mechanic_pair() -> tuple[Document, Document]:
    """Gold/predicted pair: one span mismatch plus one label mismatch.

    Labelled scores come out 0 and unlabelled 0.5 for this pair.
    """
    tokens = ["Have", "a", "real", "mechanic", "check", "before", "you",
              "leave"]

    def build(imp_on_pa: bool) -> GraphBuilder:
        b = GraphBuilder(tokens)
        sc1 = b.unit(b.root, "H")
        b.tok(sc1, 0, "D")
        pa = b.unit(sc1, "P")
        b.tok(pa, 1, "F")
        b.tok(pa, 2, "D")
        b.tok(pa, 3, "C")
        b.tok(sc1, 4, "P")
        b.tok(b.root, 5, "L")
        sc2 = b.unit(b.root, "H")
        b.tok(sc2, 6, "A")
        b.tok(sc2, 7, "P")
        b.remote(sc1, 6, "A")
        b.remote(sc1, 2, "D")
        if imp_on_pa:
            b.imp(pa, "A+Non-specific")
            b.imp(sc2, "A+Type-identifiable")
        else:
            b.imp(sc1, "A+Non-specific")
            b.imp(sc2, "A+Non-specific")
        return b

    gold = build(imp_on_pa=False).document("mechanic")
    pred = build(imp_on_pa=True).document("mechanic")
    return gold, pred


def service_pair() -> tuple[Document, Document]:
    """Gold/predicted pair: one of two same-parent implicits is missing.

    Labelled scores come out 0.5 and unlabelled 1.0 for this pair.
    """
    tokens = ["The", "service", "is", "over-rated", "."]

    def build(drop_second: bool) -> GraphBuilder:
        b = GraphBuilder(tokens)
        sc = b.unit(b.root, "H")
        svc = b.unit(sc, "A")
        b.tok(svc, 0, "F")
        b.tok(svc, 1, "P")
        b.imp(svc, "A+Generic")
        if not drop_second:
            b.imp(svc, "A+Genre-based")
        b.tok(sc, 2, "F")
        b.tok(sc, 3, "S")
        b.tok(sc, 4, "U")
        b.imp(sc, "A+Non-specific")
        return b

    gold = build(drop_second=False).document("service")
    pred = build(drop_second=True).document("service")
    return gold, pred


def make_fixture_corpus() -> list[Document]:
    """The curated corpus: 34 documents spanning the full phenomenon space."""
    docs: list[Document] = [review_doc()]

    gold_a, pred_a = mechanic_pair()
    gold_b, pred_b = service_pair()
    docs += [Document("mechanic-gold", gold_a.text, gold_a.tokens, gold_a.graph),
             Document("mechanic-pred", pred_a.text, pred_a.tokens, pred_a.graph),
             Document("service-gold", gold_b.text, gold_b.tokens, gold_b.graph),
             Document("service-pred", pred_b.text, pred_b.tokens, pred_b.graph)]

    b = GraphBuilder(["Hi"])
    b.tok(b.root, 0, "H")
    docs.append(b.document("hi"))

    b = GraphBuilder(["Sleep", "!"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "P")
    b.imp(sc, "A+Deictic")
    b.tok(b.root, 1, "U")
    docs.append(b.document("sleep"))

    b = GraphBuilder(["They", "visit", "often", "."])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "A")
    b.tok(sc, 1, "P")
    b.tok(sc, 2, "T")
    b.imp(sc, "A+Iterated-set")
    b.tok(b.root, 3, "U")
    docs.append(b.document("visit-often"))

    b = GraphBuilder(["Closed", "on", "Sundays"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "S")
    tt = b.unit(sc, "T")
    b.tok(tt, 1, "R")
    b.tok(tt, 2, "C")
    b.imp(sc, "A+Type-identifiable")
    b.imp(sc, "A+Genre-based")
    docs.append(b.document("closed-sundays"))

    b = GraphBuilder(["Delicious", "!"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "S")
    b.imp(sc, "A+Generic")
    b.imp(sc, "A+Generic")
    b.tok(b.root, 1, "U")
    docs.append(b.document("delicious"))

    b = GraphBuilder(["Fresh", "and", "tasty"])
    sc1 = b.unit(b.root, "H")
    b.tok(sc1, 0, "S")
    b.imp(sc1, "P")
    b.imp(sc1, "A+Genre-based")
    b.tok(b.root, 1, "L")
    sc2 = b.unit(b.root, "H")
    b.tok(sc2, 2, "S")
    b.imp(sc2, "A+Genre-based")
    docs.append(b.document("fresh-tasty"))

    # crossing yields: first scene spans tokens 0 and 2, second spans token 1
    b = GraphBuilder(["suddenly", "she", "laughed"])
    x = b.unit(b.root, "H")
    b.tok(x, 0, "D")
    b.tok(x, 2, "P")
    y = b.unit(b.root, "H")
    b.tok(y, 1, "A")
    docs.append(b.document("crossing"))

    # interleaved scenes: {0,2} and {1,3}
    b = GraphBuilder(["pick", "it", "up", "now"])
    x = b.unit(b.root, "H")
    b.tok(x, 0, "P")
    b.tok(x, 2, "D")
    y = b.unit(b.root, "H")
    b.tok(y, 1, "A")
    b.tok(y, 3, "T")
    docs.append(b.document("interleaved"))

    b = GraphBuilder(["John", "left", "and", "smiled"])
    sc1 = b.unit(b.root, "H")
    b.tok(sc1, 0, "A")
    b.tok(sc1, 1, "P")
    b.tok(b.root, 2, "L")
    sc2 = b.unit(b.root, "H")
    b.tok(sc2, 3, "P")
    b.remote(sc2, 0, "A")
    docs.append(b.document("john-left"))

    b = GraphBuilder(["the", "dog", "barked", "and", "ran"])
    sc1 = b.unit(b.root, "H")
    np = b.unit(sc1, "A")
    b.tok(np, 0, "F")
    b.tok(np, 1, "C")
    b.tok(sc1, 2, "P")
    b.tok(b.root, 3, "L")
    sc2 = b.unit(b.root, "H")
    b.tok(sc2, 4, "P")
    b.remote(sc2, np, "A")
    docs.append(b.document("dog-ran"))

    b = GraphBuilder(["she", "promised", "to", "come"])
    sc1 = b.unit(b.root, "H")
    b.tok(sc1, 0, "A")
    b.tok(sc1, 1, "P")
    sc2 = b.unit(sc1, "A")
    b.tok(sc2, 2, "F")
    b.tok(sc2, 3, "P")
    b.remote(sc2, 0, "A")
    docs.append(b.document("promised"))

    b = GraphBuilder(["very", "very", "good"])
    sc = b.unit(b.root, "H")
    du = b.unit(sc, "D")
    b.tok(du, 0, "E")
    b.tok(du, 1, "C")
    b.tok(sc, 2, "S")
    b.imp(sc, "A+Genre-based")
    docs.append(b.document("very-good"))

    b = GraphBuilder(["dogs", "bark", "loudly"])
    sc = b.unit(b.root, "H")
    pa = b.unit(sc, "A")
    b.tok(pa, 0, "C")
    b.tok(sc, 1, "P")
    b.tok(sc, 2, "D")
    docs.append(b.document("dogs-bark"))

    b = GraphBuilder(["I", "came", ",", "I", "saw", ",", "I", "conquered"])
    for a, p in [(0, 1), (3, 4), (6, 7)]:
        sc = b.unit(b.root, "H")
        b.tok(sc, a, "A")
        b.tok(sc, p, "P")
    b.tok(b.root, 2, "U")
    b.tok(b.root, 5, "U")
    docs.append(b.document("came-saw"))

    b = GraphBuilder(["three", "dogs", "barked"])
    sc = b.unit(b.root, "H")
    np = b.unit(sc, "A")
    b.tok(np, 0, "Q")
    b.tok(np, 1, "C")
    b.tok(sc, 2, "P")
    docs.append(b.document("three-dogs"))

    b = GraphBuilder(["wow", "that", "hurt"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "G")
    b.tok(sc, 1, "A")
    b.tok(sc, 2, "P")
    docs.append(b.document("wow"))

    b = GraphBuilder(["cats", "and", "dogs", "play"])
    sc = b.unit(b.root, "H")
    np = b.unit(sc, "A")
    b.tok(np, 0, "C")
    b.tok(np, 1, "N")
    b.tok(np, 2, "C")
    b.tok(sc, 3, "P")
    docs.append(b.document("cats-dogs"))

    b = GraphBuilder(["sat", "in", "the", "park"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "P")
    pp = b.unit(sc, "A")
    b.tok(pp, 1, "R")
    b.tok(pp, 2, "F")
    b.tok(pp, 3, "C")
    b.imp(sc, "A+Deictic")
    docs.append(b.document("sat-park"))

    b = GraphBuilder(["arrived", "at", "noon"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "P")
    tt = b.unit(sc, "T")
    b.tok(tt, 1, "R")
    b.tok(tt, 2, "C")
    b.imp(sc, "A+Deictic")
    docs.append(b.document("arrived-noon"))

    b = GraphBuilder(["very", "friendly", "at", "weekends", "."])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "D")
    b.tok(sc, 1, "S")
    tt = b.unit(sc, "T")
    b.tok(tt, 2, "R")
    b.tok(tt, 3, "C")
    b.imp(sc, "A+Genre-based")
    b.tok(b.root, 4, "U")
    docs.append(b.document("friendly-weekends"))

    b = GraphBuilder(["come", "here"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "P")
    b.tok(sc, 1, "D")
    b.imp(sc, "A+Deictic")
    b.imp(sc, "A+Generic")
    docs.append(b.document("come-here"))

    b = GraphBuilder(["The", "experience", "has", "been", "great"])
    sc = b.unit(b.root, "H")
    exp = b.unit(sc, "P")
    b.tok(exp, 0, "F")
    b.tok(exp, 1, "C")
    b.tok(sc, 2, "F")
    b.tok(sc, 3, "F")
    b.tok(sc, 4, "D")
    b.imp(sc, "A+Generic")
    docs.append(b.document("experience"))

    b = GraphBuilder(["He", "washed", "and", "dried", "it"])
    sc1 = b.unit(b.root, "H")
    b.tok(sc1, 0, "A")
    b.tok(sc1, 1, "P")
    b.tok(b.root, 2, "L")
    sc2 = b.unit(b.root, "H")
    b.tok(sc2, 3, "P")
    b.tok(sc2, 4, "A")
    b.remote(sc1, 4, "A")
    b.remote(sc2, 0, "A")
    docs.append(b.document("washed-dried"))

    b = GraphBuilder(["Highly", "recommended", "!"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "D")
    b.tok(sc, 1, "S")
    b.imp(sc, "A+Genre-based")
    b.imp(sc, "A+Generic")
    b.tok(b.root, 2, "U")
    docs.append(b.document("recommended"))

    b = GraphBuilder(["Shipped", "quickly"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "P")
    b.tok(sc, 1, "D")
    b.imp(sc, "A+Genre-based")
    b.imp(sc, "A+Generic")
    b.imp(sc, "A+Non-specific")
    docs.append(b.document("shipped"))

    b = GraphBuilder(["the", "quick", "brown", "fox", "jumps"])
    sc = b.unit(b.root, "H")
    np = b.unit(sc, "A")
    b.tok(np, 0, "F")
    b.tok(np, 1, "E")
    b.tok(np, 2, "E")
    b.tok(np, 3, "C")
    b.tok(sc, 4, "P")
    b.imp(sc, "A+Non-specific")
    docs.append(b.document("fox"))

    b = GraphBuilder(["leaving", "early", "helps"])
    outer = b.unit(b.root, "H")
    inner = b.unit(outer, "A")
    b.tok(inner, 0, "P")
    b.tok(inner, 1, "T")
    b.imp(inner, "A+Generic")
    b.tok(outer, 2, "P")
    b.imp(outer, "A+Genre-based")
    docs.append(b.document("leaving-helps"))

    # crossing yields plus a remote into the crossed region
    b = GraphBuilder(["early", "he", "left"])
    x = b.unit(b.root, "H")
    b.tok(x, 0, "D")
    b.tok(x, 2, "P")
    y = b.unit(b.root, "H")
    b.tok(y, 1, "A")
    b.remote(x, 1, "A")
    docs.append(b.document("early-left"))

    b = GraphBuilder(["meets", "weekly"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "P")
    b.tok(sc, 1, "T")
    b.imp(sc, "A+Iterated-set")
    b.imp(sc, "A+Deictic")
    docs.append(b.document("meets-weekly"))

    return docs


def make_training_corpus() -> list[Document]:
    """A 16-document subset used by the overfitting checks."""
    keep = {"review", "service-gold", "hi", "sleep", "visit-often",
            "closed-sundays", "delicious", "fresh-tasty", "very-good",
            "three-dogs", "wow", "sat-park", "arrived-noon", "come-here",
            "shipped", "meets-weekly"}
    return [d for d in make_fixture_corpus() if d.id in keep]


_SPLIT_PROFILES = {
    "train": (285, 2671, {"deictic": 87, "generic": 59, "genre-based": 103,
                          "type-identifiable": 3, "non-specific": 18,
                          "iterated-set": 4}),
    "dev": (59, 540, {"deictic": 11, "generic": 15, "genre-based": 19,
                      "type-identifiable": 1, "non-specific": 10,
                      "iterated-set": 0}),
    "eval": (49, 489, {"deictic": 9, "generic": 12, "genre-based": 25,
                       "type-identifiable": 2, "non-specific": 8,
                       "iterated-set": 5}),
}

_VOCAB = ["the", "service", "was", "great", "food", "prices", "friendly",
          "staff", "really", "good", "place", "clean", "fast", "delivery",
          "nice", "people", "came", "back", "again", "recommend"]

_FILL_CATS = ["A", "D", "E", "C", "T", "F"]


def make_revisited_split(name: str) -> list[Document]:
    """Synthetic split whose sentence/token/implicit counts match the
    published statistics of the revisited review corpus."""
    n_sent, n_tok, imp_counts = _SPLIT_PROFILES[name]
    base, extra = divmod(n_tok, n_sent)
    imp_queue: list[str] = []
    for ref in Refinement:
        imp_queue.extend([ref.value] * imp_counts[ref.value])
    docs = []
    for i in range(n_sent):
        length = base + (1 if i < extra else 0)
        words = [_VOCAB[(i + j) % len(_VOCAB)] for j in range(length - 1)]
        words.append(".")
        b = GraphBuilder(words)
        sc = b.unit(b.root, "H")
        b.tok(sc, 0, "P")
        for j in range(1, length - 1):
            b.tok(sc, j, _FILL_CATS[j % len(_FILL_CATS)])
        b.tok(b.root, length - 1, "U")
        for ref in imp_queue[i::n_sent]:
            b.imp(sc, f"A+{ref}")
        docs.append(b.document(f"{name}-{i:04d}"))
    return docs


def make_revisited_corpus() -> dict[str, list[Document]]:
    return {name: make_revisited_split(name) for name in _SPLIT_PROFILES}


def make_random_graph(rng: random.Random, tokens: list[str] | None = None,
                      with_remote: bool = True) -> Graph:
    """A random valid graph; every nonterminal keeps a terminal descendant."""
    if tokens is None:
        n = rng.randint(1, 6)
        tokens = [rng.choice(_VOCAB) for _ in range(n)]
    b = GraphBuilder(tokens)
    n = len(tokens)
    n_units = rng.randint(0, min(3, n))
    units: list[int] = []
    for _ in range(n_units):
        parent = rng.choice([b.root] + units)
        units.append(b.unit(parent, rng.choice(["H", "A", "P", "E", "D"])))
    # deal one terminal to every unit first so none is left token-less
    order = list(range(n))
    rng.shuffle(order)
    for k, unit in enumerate(units):
        if k < n:
            b.tok(unit, order[k], rng.choice(["C", "P", "A", "S"]))
    for idx in order[len(units):]:
        parent = rng.choice([b.root] + units)
        b.tok(parent, idx, rng.choice(["A", "C", "D", "E", "F", "P", "S", "T"]))
    for _ in range(rng.randint(0, 3)):
        parent = rng.choice([b.root] + units)
        if parent == b.root:
            continue
        ref = rng.choice([r.value for r in Refinement] + [None])
        b.imp(parent, "A" if ref is None else f"A+{ref}")
    if with_remote and units and rng.random() < 0.4:
        src = rng.choice(units)
        candidates = [v for v in range(n) if not any(
            e.src == src and e.tgt == v for e in b.edges)]
        if candidates:
            b.remote(src, rng.choice(candidates), "A")
    g = b.graph()
    return g


def make_random_pair(rng: random.Random) -> tuple[Graph, Graph]:
    """Two independent random graphs over one token sequence."""
    n = rng.randint(1, 6)
    tokens = [rng.choice(_VOCAB) for _ in range(n)]
    return (make_random_graph(rng, tokens, with_remote=False),
            make_random_graph(rng, tokens, with_remote=False))
