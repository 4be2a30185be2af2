"""Hashed sparse features over parser states.

Templates cover the forms and kinds of the top three stack items and the
first two buffer items, the labels of edges already incident to the top
two stack items, child-category counts, the number of implicit children
attached to the stack top so far (refined labels count, since they realize
implicit units), bucketed stack and buffer depths, the last three actions
and a handful of pairwise conjunctions. Feature strings are hashed into a
fixed space with crc32.
"""

from __future__ import annotations

import zlib

from .graph import EdgeAttr, NodeKind
from .transitions import ParserState

HASH_BITS = 20
_MASK = (1 << HASH_BITS) - 1

TEMPLATES = ("bias", "form", "kind", "incident", "children", "implicit",
             "depth", "history", "conj", "shape")

_PLACEHOLDER = {NodeKind.ROOT: "<root>", NodeKind.NONTERMINAL: "<unit>",
                NodeKind.IMPLICIT: "<implicit>"}


def _hash(s: str) -> int:
    return zlib.crc32(s.encode("utf-8")) & _MASK


def _form(st: ParserState, nid: int | None) -> str:
    if nid is None:
        return "<none>"
    kind = st.kind_of(nid)
    if kind is NodeKind.TERMINAL:
        return st.tokens[nid]
    return _PLACEHOLDER[kind]


def _kind(st: ParserState, nid: int | None) -> str:
    return "<none>" if nid is None else st.kind_of(nid).value


def _shape(form: str) -> str:
    if not form or form.startswith("<"):
        return form
    if form.isdigit():
        return "d"
    if not any(c.isalnum() for c in form):
        return "p"
    if form[0].isupper():
        return "X"
    return "x"


def extract_features(st: ParserState) -> list[int]:
    """Hashed feature ids for one state; duplicates are collapsed."""
    s0 = st.stack[-1] if len(st.stack) >= 1 else None
    s1 = st.stack[-2] if len(st.stack) >= 2 else None
    s2 = st.stack[-3] if len(st.stack) >= 3 else None
    b0 = st.buffer[0] if len(st.buffer) >= 1 else None
    b1 = st.buffer[1] if len(st.buffer) >= 2 else None
    feats = ["bias"]
    for name, nid in (("s0", s0), ("s1", s1), ("s2", s2),
                      ("b0", b0), ("b1", b1)):
        feats.append(f"{name}.form={_form(st, nid)}")
        feats.append(f"{name}.kind={_kind(st, nid)}")
    for name, nid in (("s0", s0), ("s1", s1)):
        if nid is None:
            continue
        n_children = 0
        child_cats: dict[str, int] = {}
        n_imp = 0
        for e in st.edges:
            if e.src == nid:
                feats.append(f"{name}.out={e.label}")
                n_children += 1
                cat = e.label.category.value
                child_cats[cat] = child_cats.get(cat, 0) + 1
                # refined labels mark implicit realizations that only get
                # their implicit attr at extraction time
                if e.attr is EdgeAttr.IMPLICIT or e.label.refinement:
                    n_imp += 1
            if e.tgt == nid:
                feats.append(f"{name}.in={e.label.category.value}"
                             f":{e.attr.value}")
        feats.append(f"{name}.nch={min(n_children, 5)}")
        for cat, c in child_cats.items():
            feats.append(f"{name}.ch.{cat}={min(c, 3)}")
        if name == "s0":
            feats.append(f"s0.nimp={min(n_imp, 3)}")
    feats.append(f"depth={min(len(st.stack), 5)}")
    feats.append(f"buf={min(len(st.buffer), 5)}")
    hist = st.history[-3:]
    for k, action in enumerate(reversed(hist), start=1):
        feats.append(f"a-{k}={action}")
    last = str(hist[-1]) if hist else "<start>"
    feats.append(f"s0s1.kind={_kind(st, s1)}|{_kind(st, s0)}")
    feats.append(f"s0b0.kind={_kind(st, s0)}|{_kind(st, b0)}")
    feats.append(f"s0b0.form={_form(st, s0)}|{_form(st, b0)}")
    feats.append(f"a-1s0={last}|{_kind(st, s0)}")
    feats.append(f"s0.shape={_shape(_form(st, s0))}")
    feats.append(f"b0.shape={_shape(_form(st, b0))}")
    return sorted({_hash(f) for f in feats})
