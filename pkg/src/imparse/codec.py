"""Canonical JSON interchange for documents and corpora.

One document is one JSON object:

    {"id": str, "text": str, "tokens": [[from, to], ...],
     "nodes": [{"id": int, "kind": "root"|"terminal"|"nonterminal"|"implicit"}, ...],
     "edges": [{"src": int, "tgt": int, "cat": str, "refinement": str?,
                "attr": "primary"|"remote"|"implicit"}, ...],
     "root": int}

Token entries are character spans into "text", ordered and non-overlapping.
"refinement" may only appear on edges with "attr": "implicit" and takes one
of: "deictic", "generic", "genre-based", "type-identifiable", "non-specific",
"iterated-set". Corpora are JSON Lines files, one document per line.

Decoding failures are reported as three distinct error kinds, each carrying
a path into the offending input: malformed JSON, schema violations, and
graph validation failures.

Writing is deterministic: keys sorted, nodes by id, edges by (src, tgt,
label), so equal documents serialize to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .graph import (Category, Edge, EdgeAttr, EdgeLabel, Graph, Node,
                    NodeKind, Refinement, Violation, validate)

_KINDS = {k.value: k for k in NodeKind}
_ATTRS = {a.value: a for a in EdgeAttr}
_REFINEMENTS = {r.value: r for r in Refinement}
_CATEGORIES = {c.value: c for c in Category}


class CodecError(ValueError):
    """Base class for document decoding failures."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        self.reason = message
        super().__init__(f"{path}: {message}")


class MalformedJsonError(CodecError):
    """The input is not JSON at all."""


class SchemaError(CodecError):
    """The input is JSON but does not conform to the document schema."""


class GraphValidationError(CodecError):
    """The decoded graph breaks a well-formedness rule."""

    def __init__(self, violations: list[Violation], path: str = "$"):
        self.violations = violations
        detail = "; ".join(str(v) for v in violations)
        super().__init__(f"graph does not validate: {detail}", path)


@dataclass(frozen=True)
class Document:
    """A sentence: raw text, token anchors, and the graph over the tokens.

    `tokens` holds character spans; the surface forms live on the graph
    (graph.tokens), derived as text[from:to] per span.
    """

    id: str
    text: str
    tokens: tuple[tuple[int, int], ...]
    graph: Graph


def _expect(cond: bool, message: str, path: str) -> None:
    if not cond:
        raise SchemaError(message, path)


def _get(obj: dict, key: str, typ, path: str):
    _expect(key in obj, f"missing required key {key!r}", path)
    val = obj[key]
    _expect(isinstance(val, typ) and not isinstance(val, bool),
            f"key {key!r} has wrong type", f"{path}.{key}")
    return val


def document_from_obj(obj: object, path: str = "$") -> Document:
    """Decode one already-parsed JSON object into a validated Document."""
    _expect(isinstance(obj, dict), "document must be a JSON object", path)
    assert isinstance(obj, dict)
    allowed = {"id", "text", "tokens", "nodes", "edges", "root"}
    for key in obj:
        _expect(key in allowed, f"unknown key {key!r}", f"{path}.{key}")

    doc_id = _get(obj, "id", str, path)
    text = _get(obj, "text", str, path)
    raw_tokens = _get(obj, "tokens", list, path)
    raw_nodes = _get(obj, "nodes", list, path)
    raw_edges = _get(obj, "edges", list, path)
    root = _get(obj, "root", int, path)

    spans: list[tuple[int, int]] = []
    prev_end = 0
    for i, item in enumerate(raw_tokens):
        tpath = f"{path}.tokens[{i}]"
        _expect(isinstance(item, list) and len(item) == 2
                and all(isinstance(x, int) and not isinstance(x, bool) for x in item),
                "token anchor must be a [from, to] integer pair", tpath)
        start, end = item
        _expect(0 <= start < end <= len(text),
                f"anchor [{start}, {end}] out of bounds for text of length {len(text)}",
                tpath)
        _expect(start >= prev_end, "token anchors must be ordered and non-overlapping",
                tpath)
        prev_end = end
        spans.append((start, end))

    nodes: list[Node] = []
    for i, item in enumerate(raw_nodes):
        npath = f"{path}.nodes[{i}]"
        _expect(isinstance(item, dict), "node must be an object", npath)
        for key in item:
            _expect(key in {"id", "kind"}, f"unknown key {key!r}", f"{npath}.{key}")
        nid = _get(item, "id", int, npath)
        kind_text = _get(item, "kind", str, npath)
        _expect(kind_text in _KINDS, f"unknown node kind {kind_text!r}",
                f"{npath}.kind")
        nodes.append(Node(nid, _KINDS[kind_text]))

    edges: list[Edge] = []
    for i, item in enumerate(raw_edges):
        epath = f"{path}.edges[{i}]"
        _expect(isinstance(item, dict), "edge must be an object", epath)
        for key in item:
            _expect(key in {"src", "tgt", "cat", "refinement", "attr"},
                    f"unknown key {key!r}", f"{epath}.{key}")
        src = _get(item, "src", int, epath)
        tgt = _get(item, "tgt", int, epath)
        cat_text = _get(item, "cat", str, epath)
        _expect(cat_text in _CATEGORIES, f"unknown category {cat_text!r}",
                f"{epath}.cat")
        attr_text = _get(item, "attr", str, epath)
        _expect(attr_text in _ATTRS, f"unknown edge attr {attr_text!r}",
                f"{epath}.attr")
        refinement = None
        if "refinement" in item:
            ref_text = _get(item, "refinement", str, epath)
            _expect(ref_text in _REFINEMENTS, f"unknown refinement {ref_text!r}",
                    f"{epath}.refinement")
            _expect(attr_text == EdgeAttr.IMPLICIT.value,
                    "refinement is only allowed on implicit edges",
                    f"{epath}.refinement")
            refinement = _REFINEMENTS[ref_text]
        edges.append(Edge(src, tgt, EdgeLabel(_CATEGORIES[cat_text], refinement),
                          _ATTRS[attr_text]))

    forms = [text[a:b] for a, b in spans]
    graph = Graph(forms, nodes, edges, root)
    bad = validate(graph)
    if bad:
        raise GraphValidationError(bad, path)
    return Document(doc_id, text, tuple(spans), graph)


def read_document(data: bytes | str) -> Document:
    """Decode one UTF-8 JSON document, validating schema and graph."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJsonError(f"input is not UTF-8: {exc}") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(str(exc)) from None
    return document_from_obj(obj)


def document_to_obj(d: Document) -> dict:
    nodes = [{"id": v.id, "kind": v.kind.value} for v in d.graph.nodes]
    edges = []
    for e in d.graph.edges:
        item: dict[str, object] = {"src": e.src, "tgt": e.tgt,
                                   "cat": e.label.category.value,
                                   "attr": e.attr.value}
        if e.label.refinement is not None:
            item["refinement"] = e.label.refinement.value
        edges.append(item)
    return {"id": d.id, "text": d.text,
            "tokens": [[a, b] for a, b in d.tokens],
            "nodes": nodes, "edges": edges, "root": d.graph.root}


def write_document(d: Document) -> bytes:
    """Serialize to canonical bytes; equal documents give identical output."""
    bad = validate(d.graph)
    if bad:
        raise GraphValidationError(bad)
    text = json.dumps(document_to_obj(d), sort_keys=True, ensure_ascii=False,
                      separators=(",", ":"))
    return text.encode("utf-8")


def read_corpus(path: str | Path) -> list[Document]:
    """Read a JSON Lines corpus; error paths include the 1-based line number."""
    docs = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                docs.append(read_document(line))
            except CodecError as exc:
                exc.path = f"{path}:{lineno} {exc.path}"
                exc.args = (f"{exc.path}: {exc.reason}",)
                raise
    return docs


def iter_corpus(path: str | Path) -> Iterator[Document]:
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield read_document(line)
            except CodecError as exc:
                exc.path = f"{path}:{lineno} {exc.path}"
                exc.args = (f"{exc.path}: {exc.reason}",)
                raise


def write_corpus(path: str | Path, docs: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for d in docs:
            handle.write(write_document(d).decode("utf-8"))
            handle.write("\n")


@dataclass
class CorpusStats:
    """Aggregate counts over a corpus; additive under concatenation."""

    sentences: int = 0
    tokens: int = 0
    nodes: int = 0
    edges: int = 0
    by_refinement: dict[str, int] = field(
        default_factory=lambda: {r.value: 0 for r in Refinement})
    unrefined_implicit: int = 0

    @property
    def implicit_total(self) -> int:
        return sum(self.by_refinement.values()) + self.unrefined_implicit

    def add(self, other: "CorpusStats") -> "CorpusStats":
        merged = {k: self.by_refinement[k] + other.by_refinement[k]
                  for k in self.by_refinement}
        return CorpusStats(self.sentences + other.sentences,
                           self.tokens + other.tokens,
                           self.nodes + other.nodes,
                           self.edges + other.edges,
                           merged,
                           self.unrefined_implicit + other.unrefined_implicit)

    def to_json(self) -> dict:
        implicit = dict(self.by_refinement)
        implicit["unrefined"] = self.unrefined_implicit
        implicit["total"] = self.implicit_total
        return {"sentences": self.sentences, "tokens": self.tokens,
                "nodes": self.nodes, "edges": self.edges, "implicit": implicit}


def corpus_stats(docs: Iterable[Document]) -> CorpusStats:
    stats = CorpusStats()
    for d in docs:
        stats.sentences += 1
        stats.tokens += len(d.tokens)
        stats.nodes += len(d.graph.nodes)
        stats.edges += len(d.graph.edges)
        for e in d.graph.edges:
            if e.attr is EdgeAttr.IMPLICIT:
                if e.label.refinement is None:
                    stats.unrefined_implicit += 1
                else:
                    stats.by_refinement[e.label.refinement.value] += 1
    return stats
