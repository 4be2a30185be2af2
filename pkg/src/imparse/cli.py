"""Command line front end.

Subcommands: validate, stats, evaluate, oracle-check, train, parse, convert.
Results go to stdout as JSON; diagnostics go to stderr. Exit status is 0 on
success, 1 for content problems (malformed input, invalid graphs, failed
round trips, mismatched corpora) and 2 for OS-level I/O or usage errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys

from . import codec
from .codec import CodecError, Document
from .metrics import (PRF, MetricError, cohen_kappa, confusion_from_pairs,
                      corpus_prf, edge_f1)
from .oracle import OracleConfig, verify_roundtrip
from .parser import (ModelFormatError, load_model, parse_tokens, save_model,
                     train)
from .transitions import SystemKind


def _read_corpus_checked(path: str) -> list[Document]:
    docs = list(codec.iter_corpus(path))
    ids = set()
    for doc in docs:
        if doc.id in ids:
            raise CodecError(path, f"duplicate document id {doc.id!r}")
        ids.add(doc.id)
    return docs


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def cmd_validate(args) -> int:
    report = []
    ok = True
    for path in args.files:
        errors = []
        with open(path, "rb") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                try:
                    codec.read_document(raw)
                except CodecError as exc:
                    ok = False
                    errors.append(f"line {lineno}: {exc}")
        report.append({"file": path, "ok": not errors, "errors": errors})
    _emit({"files": report, "ok": ok})
    return 0 if ok else 1


def cmd_stats(args) -> int:
    per_file = []
    total = codec.CorpusStats()
    for path in args.files:
        stats = codec.corpus_stats(_read_corpus_checked(path))
        per_file.append({"file": path, **stats.to_json()})
        total = total.add(stats)
    _emit({"files": per_file, "total": total.to_json()})
    return 0


def cmd_evaluate(args) -> int:
    gold_docs = _read_corpus_checked(args.gold)
    pred_by_id = {d.id: d for d in _read_corpus_checked(args.pred)}
    pairs = []
    for doc in gold_docs:
        if doc.id not in pred_by_id:
            print(f"error: {args.pred}: no document with id {doc.id!r}",
                  file=sys.stderr)
            return 1
        pairs.append((doc.graph, pred_by_id[doc.id].graph))
    primary = PRF(0, 0, 0)
    remote = PRF(0, 0, 0)
    for gold, pred in pairs:
        primary = primary + edge_f1(gold, pred, "primary")
        remote = remote + edge_f1(gold, pred, "remote")
    unit = args.unit_level_metric
    report = {"primary": primary.to_json(), "remote": remote.to_json(),
              "implicit_labelled": corpus_prf(
                  pairs, labelled=True, unit_level=unit).to_json()}
    if not args.labelled_only:
        report["implicit_unlabelled"] = corpus_prf(
            pairs, labelled=False, unit_level=unit).to_json()
    matrix = confusion_from_pairs(pairs)
    report["confusion"] = matrix.to_json()
    try:
        report["kappa"] = cohen_kappa(matrix)
    except MetricError:
        report["kappa"] = None
    _emit(report)
    return 0


def cmd_oracle_check(args) -> int:
    cfg = OracleConfig(system=SystemKind(args.system))
    reports = []
    all_ok = True
    for path in args.files:
        report = verify_roundtrip(_read_corpus_checked(path), cfg)
        all_ok = all_ok and report.ok
        reports.append({
            "file": path, "coverage": report.coverage,
            "documents": len(report.results),
            "failures": [{"id": r.doc_id, "status": r.status,
                          "detail": r.detail} for r in report.failures()]})
        print(f"{path}: {report.coverage:.1f}% round-trip", file=sys.stderr)
    _emit({"files": reports, "ok": all_ok})
    return 0 if all_ok else 1


def cmd_train(args) -> int:
    docs = _read_corpus_checked(args.corpus)
    model = train(docs, SystemKind(args.system), epochs=args.epochs,
                  seed=args.seed)
    save_model(model, args.out, binary=args.binary)
    _emit({"out": args.out, "system": args.system,
           "trained_on": model.meta.get("trained_on"),
           "skipped": model.meta.get("skipped", [])})
    return 0


def _sentence_tasks(path: str) -> list[tuple]:
    """Plain text input: one sentence per line, whitespace tokens."""
    tasks = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.rstrip("\n")
            if not text.strip():
                continue
            spans = []
            pos = 0
            for tok in text.split():
                start = text.index(tok, pos)
                spans.append((start, start + len(tok)))
                pos = start + len(tok)
            tasks.append((f"s{lineno:04d}", text, tuple(spans),
                          tuple(text.split())))
    return tasks


_WORKER_MODEL = None


def _init_worker(model_path: str) -> None:
    global _WORKER_MODEL
    _WORKER_MODEL = load_model(model_path)


def _parse_task(task):
    doc_id, text, spans, tokens = task
    result = parse_tokens(tokens, _WORKER_MODEL)
    doc = Document(doc_id, text, spans, result.graph)
    return codec.document_to_obj(doc)


def _dot(doc_obj: dict) -> str:
    """Deterministic graphviz rendering of one document object."""
    lines = [f'digraph "{doc_obj["id"]}" {{', "  rankdir=TB;"]
    token_forms = {i: doc_obj["text"][a:b]
                   for i, (a, b) in enumerate(doc_obj["tokens"])}
    for node in doc_obj["nodes"]:
        nid, kind = node["id"], node["kind"]
        if kind == "terminal":
            form = token_forms[nid].replace('"', r'\"')
            lines.append(f'  n{nid} [shape=box, label="{form}"];')
        elif kind == "implicit":
            lines.append(f'  n{nid} [shape=ellipse, style=dashed, '
                         'label="IMPLICIT"];')
        elif kind == "root":
            lines.append(f'  n{nid} [shape=point];')
        else:
            lines.append(f'  n{nid} [shape=ellipse, label=""];')
    for e in doc_obj["edges"]:
        label = e["cat"] + (f'+{e["refinement"]}' if "refinement" in e else "")
        style = {"primary": "solid", "remote": "dashed",
                 "implicit": "dotted"}[e["attr"]]
        lines.append(f'  n{e["src"]} -> n{e["tgt"]} '
                     f'[label="{label}", style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_parse(args) -> int:
    global _WORKER_MODEL
    model = load_model(args.model)
    if args.input.endswith(".jsonl"):
        docs = _read_corpus_checked(args.input)
        tasks = [(d.id, d.text, d.tokens, d.graph.tokens) for d in docs]
    else:
        tasks = _sentence_tasks(args.input)
    if not tasks:
        print("error: no sentences to parse", file=sys.stderr)
        return 1
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=args.jobs, initializer=_init_worker,
                initargs=(args.model,)) as pool:
            objs = list(pool.map(_parse_task, tasks))
    else:
        _WORKER_MODEL = model
        objs = [_parse_task(t) for t in tasks]
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for obj in objs:
            out.write(json.dumps(obj, sort_keys=True,
                                 ensure_ascii=False,
                                 separators=(",", ":")) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if args.emit_dot:
        os.makedirs(args.emit_dot, exist_ok=True)
        for obj in objs:
            path = os.path.join(args.emit_dot, f"{obj['id']}.dot")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(_dot(obj))
    return 0


def cmd_convert(args) -> int:
    if args.src.endswith(".jsonl"):
        docs = _read_corpus_checked(args.src)
    elif args.src.endswith(".json"):
        with open(args.src, "rb") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise codec.MalformedJsonError(args.src, str(exc)) from None
        if not isinstance(raw, list):
            raise CodecError(args.src, "expected a JSON array of documents")
        docs = [codec.document_from_obj(obj, path=f"$[{i}]")
                for i, obj in enumerate(raw)]
    else:
        print("error: convert expects .json or .jsonl input",
              file=sys.stderr)
        return 2
    if args.dst.endswith(".jsonl"):
        codec.write_corpus(args.dst, docs)
    elif args.dst.endswith(".json"):
        with open(args.dst, "w", encoding="utf-8") as fh:
            json.dump([codec.document_to_obj(d) for d in docs], fh,
                      indent=2, sort_keys=True, ensure_ascii=False)
            fh.write("\n")
    else:
        print("error: convert expects .json or .jsonl output",
              file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="imparse",
        description="Parse and evaluate implicit arguments in anchored "
                    "semantic graphs.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check corpus files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("evaluate", help="score predictions against gold")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--unit-level-metric", action="store_true",
                   help="count implicit units instead of groups")
    p.add_argument("--labelled-only", action="store_true",
                   help="omit the unlabelled implicit score")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle-check",
                       help="verify derivations rebuild the gold graphs")
    p.add_argument("files", nargs="+")
    p.add_argument("--system", choices=["eager", "standard"],
                   default="eager")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("train", help="fit a parser on a gold corpus")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--system", choices=["eager", "standard"],
                   default="eager")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binary", action="store_true",
                   help="write a pickle instead of JSON")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("parse", help="parse sentences with a trained model")
    p.add_argument("input", help=".jsonl corpus or .txt, one sentence "
                                 "per line")
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--emit-dot", metavar="DIR", default=None,
                   help="write one graphviz file per sentence")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("convert", help="convert between .json and .jsonl")
    p.add_argument("src")
    p.add_argument("dst")
    p.set_defaults(func=cmd_convert)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CodecError, ModelFormatError, MetricError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
