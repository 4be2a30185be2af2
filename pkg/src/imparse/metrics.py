"""Evaluation metrics for anchored semantic graphs.

Edge scores compare labelled primary or remote edges by the primary yield of
their child. Implicit scores compare groups of implicit units merged under a
common parent, keyed by the parent's primary yield; the labelled variant
additionally requires the multisets of implicit labels to coincide.

Precision is defined as 1.0 when nothing was predicted and recall as 1.0 when
the reference is empty, so an empty prediction against a non-empty reference
scores P=1, R=0, F=0.
"""

from __future__ import annotations

import dataclasses
from collections import Counter

from .graph import EdgeAttr, Graph, implicit_groups, primary_yield

UNMATCHED = "UNMATCHED"


class MetricError(ValueError):
    pass


class TokenMismatchError(MetricError):
    """Raised when two graphs under comparison disagree on the tokens."""


@dataclasses.dataclass(frozen=True)
class PRF:
    """Micro-countable precision/recall/F1 triple.

    matched_pred covers the rare case where the number of matched items is
    counted differently on the prediction side; when None the gold-side count
    is used for precision as well.
    """

    matched: int
    pred_total: int
    gold_total: int
    matched_pred: int | None = None

    @property
    def p(self) -> float:
        if self.pred_total == 0:
            return 1.0
        m = self.matched if self.matched_pred is None else self.matched_pred
        return m / self.pred_total

    @property
    def r(self) -> float:
        if self.gold_total == 0:
            return 1.0
        return self.matched / self.gold_total

    @property
    def f(self) -> float:
        p, r = self.p, self.r
        if p + r == 0.0:
            return 0.0
        return 2 * p * r / (p + r)

    def __add__(self, other: "PRF") -> "PRF":
        mp = None
        if self.matched_pred is not None or other.matched_pred is not None:
            mp = ((self.matched if self.matched_pred is None
                   else self.matched_pred)
                  + (other.matched if other.matched_pred is None
                     else other.matched_pred))
        return PRF(self.matched + other.matched,
                   self.pred_total + other.pred_total,
                   self.gold_total + other.gold_total, mp)

    def to_json(self) -> dict:
        out = {"p": self.p, "r": self.r, "f": self.f,
               "matched": self.matched, "gold": self.gold_total,
               "pred": self.pred_total}
        if self.matched_pred is not None and self.matched_pred != self.matched:
            out["matched_pred"] = self.matched_pred
        return out


def _check_tokens(gold: Graph, pred: Graph) -> None:
    if gold.tokens != pred.tokens:
        raise TokenMismatchError(
            f"token mismatch: {gold.tokens!r} vs {pred.tokens!r}")


def _edge_items(g: Graph, attr: EdgeAttr) -> Counter:
    items: Counter = Counter()
    for e in g.edges:
        if e.attr is attr:
            items[(primary_yield(g, e.tgt), e.label.category.value)] += 1
    return items


def edge_f1(gold: Graph, pred: Graph, which: str = "primary") -> PRF:
    """Labelled edge score over primary or remote edges.

    An edge matches when its attribute, its child's primary yield and its
    category agree; refinements never participate.
    """
    _check_tokens(gold, pred)
    try:
        attr = EdgeAttr(which)
    except ValueError:
        raise MetricError(f"unknown edge class {which!r}") from None
    if attr is EdgeAttr.IMPLICIT:
        raise MetricError("implicit edges are scored by implicit_f1")
    g_items = _edge_items(gold, attr)
    p_items = _edge_items(pred, attr)
    matched = sum((g_items & p_items).values())
    return PRF(matched, sum(p_items.values()), sum(g_items.values()))


def _group_map(g: Graph) -> dict[tuple[int, ...], Counter]:
    spans: dict[tuple[int, ...], Counter] = {}
    for grp in implicit_groups(g):
        bucket = spans.setdefault(grp.span, Counter())
        for lab in grp.labels:
            bucket[str(lab)] += 1
    return spans


def implicit_f1(gold: Graph, pred: Graph, labelled: bool = True,
                unit_level: bool = False) -> PRF:
    """Group-level implicit score.

    Groups of implicit units are merged per parent and keyed by the parent's
    primary yield. Unlabelled: a group matches when the same span hosts
    implicit units on both sides. Labelled: the label multisets must be equal
    as well. With unit_level=True the counts are over individual implicit
    units instead of groups, while keeping the same matching rule.
    """
    _check_tokens(gold, pred)
    g_map = _group_map(gold)
    p_map = _group_map(pred)
    both = set(g_map) & set(p_map)
    if not unit_level:
        if labelled:
            matched = sum(1 for s in both if g_map[s] == p_map[s])
        else:
            matched = len(both)
        return PRF(matched, len(p_map), len(g_map))
    g_units = sum(sum(c.values()) for c in g_map.values())
    p_units = sum(sum(c.values()) for c in p_map.values())
    if labelled:
        matched = sum(sum(g_map[s].values()) for s in both
                      if g_map[s] == p_map[s])
        return PRF(matched, p_units, g_units)
    m_gold = sum(sum(g_map[s].values()) for s in both)
    m_pred = sum(sum(p_map[s].values()) for s in both)
    return PRF(m_gold, p_units, g_units, matched_pred=m_pred)


def corpus_prf(pairs: list[tuple[Graph, Graph]], labelled: bool = True,
               unit_level: bool = False) -> PRF:
    """Micro-averaged implicit score over (gold, predicted) pairs."""
    total = PRF(0, 0, 0)
    for gold, pred in pairs:
        total = total + implicit_f1(gold, pred, labelled=labelled,
                                    unit_level=unit_level)
    return total


class ConfusionMatrix:
    """Count table over class-string pairs; rows are the first annotation."""

    def __init__(self) -> None:
        self._cells: Counter = Counter()

    def add(self, gold_cls: str, pred_cls: str, count: int = 1) -> None:
        self._cells[(gold_cls, pred_cls)] += count

    def classes(self) -> list[str]:
        seen = set()
        for g, p in self._cells:
            seen.add(g)
            seen.add(p)
        seen.discard(UNMATCHED)
        return [UNMATCHED] + sorted(seen)

    def total(self) -> int:
        return sum(self._cells.values())

    def cell(self, gold_cls: str, pred_cls: str) -> int:
        return self._cells[(gold_cls, pred_cls)]

    def without(self, cls: str) -> "ConfusionMatrix":
        out = ConfusionMatrix()
        for (g, p), c in self._cells.items():
            if g != cls and p != cls:
                out.add(g, p, c)
        return out

    def to_json(self) -> dict:
        classes = self.classes()
        return {"classes": classes,
                "rows": [[self.cell(g, p) for p in classes]
                         for g in classes]}

    @classmethod
    def from_json(cls, obj: dict) -> "ConfusionMatrix":
        out = cls()
        for gi, g in enumerate(obj["classes"]):
            for pi, p in enumerate(obj["classes"]):
                c = obj["rows"][gi][pi]
                if c:
                    out.add(g, p, c)
        return out


def cohen_kappa(m: ConfusionMatrix) -> float:
    """Chance-corrected agreement over the matched cells.

    The UNMATCHED row and column are dropped first; classes present only in
    rows or only in columns keep zero mass on the other axis.
    """
    core = m.without(UNMATCHED)
    n = core.total()
    if n == 0:
        raise MetricError("no matched pairs to compute agreement over")
    classes = [c for c in core.classes() if c != UNMATCHED]
    row = {c: sum(core.cell(c, p) for p in classes) for c in classes}
    col = {c: sum(core.cell(g, c) for g in classes) for c in classes}
    p_o = sum(core.cell(c, c) for c in classes) / n
    p_e = sum(row[c] * col[c] for c in classes) / (n * n)
    if p_e == 1.0:
        raise MetricError("degenerate marginals: chance agreement is 1")
    return (p_o - p_e) / (1 - p_e)


def _unit_class(label_str: str) -> str:
    lab = label_str.partition("+")
    return lab[2] if lab[2] else lab[0]


def _group_class(counter: Counter) -> str:
    parts = []
    for lab, c in counter.items():
        parts.extend([_unit_class(lab)] * c)
    return "|".join(sorted(parts))


def confusion_from_pairs(pairs: list[tuple[Graph, Graph]]) -> ConfusionMatrix:
    """Implicit-group confusion over aligned (gold, predicted) graphs.

    Classes are the sorted short names of a group's units joined by '|';
    groups present on one side only pair with UNMATCHED.
    """
    matrix = ConfusionMatrix()
    for gold, pred in pairs:
        _check_tokens(gold, pred)
        g_map = _group_map(gold)
        p_map = _group_map(pred)
        for span in sorted(set(g_map) | set(p_map)):
            g_cls = _group_class(g_map[span]) if span in g_map else UNMATCHED
            p_cls = _group_class(p_map[span]) if span in p_map else UNMATCHED
            matrix.add(g_cls, p_cls)
    return matrix


def agreement_report(gold_docs, other_docs):
    """Inter-annotation comparison over two parallel corpora.

    Returns (labelled PRF, unlabelled PRF, confusion matrix, kappa). Kappa is
    None when no span was matched by both sides. Documents are aligned by id.
    """
    other_by_id = {d.id: d for d in other_docs}
    pairs = []
    for doc in gold_docs:
        if doc.id not in other_by_id:
            raise MetricError(f"no counterpart for document {doc.id!r}")
        pairs.append((doc.graph, other_by_id[doc.id].graph))
    labelled = corpus_prf(pairs, labelled=True)
    unlabelled = corpus_prf(pairs, labelled=False)
    matrix = confusion_from_pairs(pairs)
    try:
        kappa = cohen_kappa(matrix)
    except MetricError:
        kappa = None
    return labelled, unlabelled, matrix, kappa
