"""Trainable greedy parser over the transition systems.

Training is teacher-forced: the oracle derivation supplies the gold action
at every state and the averaged perceptron is updated against the decoder's
current argmax. Decoding is greedy over the legal actions instantiated from
the label alphabets harvested at training time, with a deterministic
tie-break so that an untrained model still produces a flat, implicit-free
analysis instead of random structure.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import pickle
import random

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .codec import Document
from .features import HASH_BITS, TEMPLATES, extract_features
from .graph import EdgeLabel, Graph, InvalidGraphError
from .metrics import PRF, confusion_from_pairs, corpus_prf, edge_f1
from .oracle import OracleConfig, OracleStuckError, oracle_sequence
from .perceptron import AveragedPerceptron
from .transitions import (Action, ActionKind, ParserState, SystemKind, apply,
                          extract_graph, initial_state, is_legal, maxsteps)

log = logging.getLogger(__name__)

MODEL_FORMAT = "imparse-model"
MODEL_VERSION = 1

# decode tie-break: prefer attachment over structure creation, and make the
# all-zero model drain into a flat analysis instead of spinning
_RANK = {ActionKind.FINISH: 0, ActionKind.LEFT_EDGE: 1,
         ActionKind.RIGHT_EDGE: 1, ActionKind.LEFT_REMOTE: 2,
         ActionKind.RIGHT_REMOTE: 2, ActionKind.IMPLICIT: 3,
         ActionKind.NODE_EAGER: 3, ActionKind.REDUCE: 4,
         ActionKind.NODE_STANDARD: 5, ActionKind.SWAP: 6,
         ActionKind.SHIFT: 7}

_FAMILIES = ("node", "implicit", "edge", "remote")


class ModelFormatError(ValueError):
    pass


@dataclasses.dataclass
class Model:
    system: SystemKind
    labels: dict[str, list[str]]
    perceptron: AveragedPerceptron
    meta: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        self._templates: list[Action] = [
            Action(ActionKind.SHIFT), Action(ActionKind.REDUCE),
            Action(ActionKind.SWAP), Action(ActionKind.FINISH)]
        if self.system is SystemKind.EAGER:
            for lab in self.labels["node"]:
                self._templates.append(
                    Action(ActionKind.NODE_EAGER, EdgeLabel.parse(lab)))
            for lab in self.labels["implicit"]:
                self._templates.append(
                    Action(ActionKind.IMPLICIT, EdgeLabel.parse(lab)))
        else:
            self._templates.append(Action(ActionKind.NODE_STANDARD))
        for lab in self.labels["edge"]:
            for kind in (ActionKind.LEFT_EDGE, ActionKind.RIGHT_EDGE):
                self._templates.append(Action(kind, EdgeLabel.parse(lab)))
        for lab in self.labels["remote"]:
            for kind in (ActionKind.LEFT_REMOTE, ActionKind.RIGHT_REMOTE):
                self._templates.append(Action(kind, EdgeLabel.parse(lab)))

    def candidates(self, st: ParserState) -> list[Action]:
        return [a for a in self._templates if is_legal(st, a, self.system)]

    def best_action(self, st: ParserState) -> Action:
        cands = self.candidates(st)
        feats = extract_features(st)
        scores = self.perceptron.score(feats, [str(a) for a in cands])
        return min(cands, key=lambda a: (
            -scores[str(a)], _RANK[a.kind],
            "" if a.label is None else str(a.label), a.kind.value))


def _harvest_labels(sequences: list[list[Action]]) -> dict[str, list[str]]:
    sets: dict[str, set[str]] = {f: set() for f in _FAMILIES}
    for actions in sequences:
        for a in actions:
            if a.kind is ActionKind.NODE_EAGER:
                sets["node"].add(str(a.label))
            elif a.kind is ActionKind.IMPLICIT:
                sets["implicit"].add(str(a.label))
            elif a.kind in (ActionKind.LEFT_EDGE, ActionKind.RIGHT_EDGE):
                sets["edge"].add(str(a.label))
            elif a.kind in (ActionKind.LEFT_REMOTE, ActionKind.RIGHT_REMOTE):
                sets["remote"].add(str(a.label))
    if not sets["edge"]:
        sets["edge"].add("A")
    return {f: sorted(sets[f]) for f in _FAMILIES}


def train(docs: list[Document], system: SystemKind, epochs: int = 20,
          seed: int = 0) -> Model:
    """Fit a greedy parser on gold documents via the static oracle."""
    cfg = OracleConfig(system=system)
    items: list[tuple[Document, list[Action]]] = []
    skipped: list[tuple[str, str]] = []
    for doc in docs:
        try:
            items.append((doc, oracle_sequence(doc.graph, cfg)))
        except (OracleStuckError, InvalidGraphError) as exc:
            skipped.append((doc.id, str(exc)))
            log.warning("skipping %s: %s", doc.id, exc)
    if not items:
        raise ValueError("no document yields an oracle derivation")
    model = Model(system=system,
                  labels=_harvest_labels([seq for _, seq in items]),
                  perceptron=AveragedPerceptron(),
                  meta={"epochs": epochs, "seed": seed,
                        "trained_on": len(items),
                        "skipped": [doc_id for doc_id, _ in skipped]})
    rng = random.Random(seed)
    order = list(items)
    for _ in range(epochs):
        rng.shuffle(order)
        for doc, seq in order:
            st = initial_state(doc.graph.tokens)
            for gold_action in seq:
                guess = model.best_action(st)
                model.perceptron.update(str(gold_action), str(guess),
                                        extract_features(st))
                st = apply(st, gold_action, system)
    model.perceptron.freeze()
    model.perceptron.prune()
    return model


@dataclasses.dataclass(frozen=True)
class ParseResult:
    graph: Graph
    actions: tuple[str, ...]
    guard_triggered: bool = False


def _drain_action(st: ParserState, system: SystemKind) -> Action:
    for kind in (ActionKind.FINISH, ActionKind.REDUCE, ActionKind.SHIFT):
        action = Action(kind)
        if is_legal(st, action, system):
            return action
    raise RuntimeError("no drain action applies")


def parse_tokens(tokens, model: Model) -> ParseResult:
    """Greedy decode; a step budget guards against degenerate loops."""
    st = initial_state(tokens)
    budget = maxsteps(len(st.tokens))
    guard = False
    while not st.terminal:
        if len(st.history) >= budget:
            guard = True
            action = _drain_action(st, model.system)
        else:
            action = model.best_action(st)
        st = apply(st, action, model.system)
    graph = extract_graph(st, normalize=True)
    return ParseResult(graph, tuple(str(a) for a in st.history), guard)


def evaluate_model(model: Model, docs: list[Document],
                   unit_level: bool = False) -> dict:
    """Parse every document and score against its gold graph."""
    pairs = []
    guard_count = 0
    for doc in docs:
        result = parse_tokens(doc.graph.tokens, model)
        guard_count += result.guard_triggered
        pairs.append((doc.graph, result.graph))
    primary = PRF(0, 0, 0)
    remote = PRF(0, 0, 0)
    for gold, pred in pairs:
        primary = primary + edge_f1(gold, pred, "primary")
        remote = remote + edge_f1(gold, pred, "remote")
    report = {
        "primary": primary.to_json(),
        "remote": remote.to_json(),
        "implicit_labelled": corpus_prf(
            pairs, labelled=True, unit_level=unit_level).to_json(),
        "implicit_unlabelled": corpus_prf(
            pairs, labelled=False, unit_level=unit_level).to_json(),
        "confusion": confusion_from_pairs(pairs).to_json(),
    }
    if guard_count:
        report["guard_triggered"] = guard_count
    return report


def action_accuracy(model: Model, docs: list[Document]) -> float:
    """Teacher-forced agreement with the oracle, for diagnostics."""
    cfg = OracleConfig(system=model.system)
    total = correct = 0
    for doc in docs:
        st = initial_state(doc.graph.tokens)
        for gold_action in oracle_sequence(doc.graph, cfg):
            correct += model.best_action(st) == gold_action
            total += 1
            st = apply(st, gold_action, model.system)
    return correct / total if total else 0.0


def _model_payload(model: Model) -> dict:
    return {"format": MODEL_FORMAT, "version": MODEL_VERSION,
            "system": model.system.value, "hash_bits": HASH_BITS,
            "templates": list(TEMPLATES), "labels": model.labels,
            "meta": model.meta, "weights": model.perceptron.to_json()}


def save_model(model: Model, path, binary: bool = False) -> None:
    payload = _model_payload(model)
    if binary:
        with open(path, "wb") as fh:
            pickle.dump(payload, fh)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")


def load_model(path) -> Model:
    with open(path, "rb") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == b"{":
            payload = json.load(fh)
        else:
            payload = pickle.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a parser model file")
    if payload.get("version") != MODEL_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported model version {payload.get('version')!r}")
    if payload.get("hash_bits") != HASH_BITS:
        raise ModelFormatError(
            f"{path}: incompatible feature space "
            f"({payload.get('hash_bits')} hash bits, expected {HASH_BITS})")
    return Model(system=SystemKind(payload["system"]),
                 labels={f: list(payload["labels"].get(f, []))
                         for f in _FAMILIES},
                 perceptron=AveragedPerceptron.from_json(payload["weights"]),
                 meta=dict(payload.get("meta", {})))


class ImplicitArgumentParser(BaseEstimator):
    """Estimator facade over train/parse with the usual fit/predict API.

    Parameters
    ----------
    system : str, "eager" or "standard"
        Transition system to train.
    epochs : int
        Passes over the training corpus.
    seed : int
        Shuffling seed; training is fully deterministic given the seed.
    """

    def __init__(self, system: str = "eager", epochs: int = 20,
                 seed: int = 0):
        self.system = system
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y=None):
        if not X:
            raise ValueError("fit needs at least one document")
        system = SystemKind(self.system)
        self.model_ = train(list(X), system, epochs=self.epochs,
                            seed=self.seed)
        self.n_documents_ = len(X)
        return self

    def _tokens(self, item) -> tuple[str, ...]:
        if isinstance(item, Document):
            return item.graph.tokens
        return tuple(item)

    def predict(self, X) -> list[Graph]:
        check_is_fitted(self, "model_")
        return [parse_tokens(self._tokens(item), self.model_).graph
                for item in X]

    def score(self, X, y=None) -> float:
        """Labelled implicit F1 against the documents' own graphs."""
        check_is_fitted(self, "model_")
        pairs = [(doc.graph, parse_tokens(doc.graph.tokens, self.model_).graph)
                 for doc in X]
        return corpus_prf(pairs, labelled=True).f
