"""Trainable parser: label harvesting, decoding, persistence, estimator API."""

import json
import pickle

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from imparse import (Document, Edge, EdgeLabel, Graph, ImplicitArgumentParser,
                     Model, ModelFormatError, Node, NodeKind, SystemKind,
                     action_accuracy, evaluate_model, graphs_equal, load_model,
                     parse_tokens, primary_yield, save_model, train, validate)
from imparse.parser import HASH_BITS, MODEL_FORMAT, MODEL_VERSION


def untrained(docs, system=SystemKind.EAGER):
    return train(docs, system, epochs=0)


def test_harvested_label_alphabets(training_corpus):
    model = untrained(training_corpus)
    assert set(model.labels) == {"node", "implicit", "edge", "remote"}
    assert "A+Generic" in model.labels["implicit"]
    assert "A+Genre-based" in model.labels["implicit"]
    assert "P" in model.labels["node"]
    assert "H" in model.labels["edge"]
    for fam, labels in model.labels.items():
        assert labels == sorted(labels)


def test_remote_labels_harvested_when_present(fixture_corpus):
    model = untrained(fixture_corpus)
    assert "A" in model.labels["remote"]


def test_training_metadata(training_corpus):
    model = train(training_corpus, SystemKind.EAGER, epochs=2, seed=7)
    assert model.meta["epochs"] == 2
    assert model.meta["seed"] == 7
    assert model.meta["trained_on"] == len(training_corpus)
    assert model.meta["skipped"] == []


def test_training_skips_undervable_documents(training_corpus):
    nodes = [Node(0, NodeKind.TERMINAL), Node(1, NodeKind.ROOT),
             Node(2, NodeKind.NONTERMINAL), Node(3, NodeKind.NONTERMINAL)]
    edges = [Edge(1, 2, EdgeLabel.parse("H")),
             Edge(2, 3, EdgeLabel.parse("E")),
             Edge(3, 0, EdgeLabel.parse("C")),
             Edge(3, 2, EdgeLabel.parse("E"))]
    bad = Document("cyc", "x", ((0, 1),), Graph(["x"], nodes, edges, 1))
    model = train(list(training_corpus) + [bad], SystemKind.EAGER, epochs=0)
    assert model.meta["skipped"] == ["cyc"]
    assert model.meta["trained_on"] == len(training_corpus)
    with pytest.raises(ValueError, match="no document"):
        train([bad], SystemKind.EAGER, epochs=0)


def test_training_improves_action_accuracy(training_corpus):
    base = action_accuracy(untrained(training_corpus), training_corpus)
    trained = train(training_corpus, SystemKind.EAGER, epochs=10, seed=0)
    fitted = action_accuracy(trained, training_corpus)
    assert fitted > base
    assert fitted > 0.9


@pytest.fixture(scope="module")
def flat_model(training_corpus):
    return untrained(training_corpus)


def test_untrained_decode_is_flat_and_implicit_free(flat_model):
    result = parse_tokens(("the", "cat", "sat"), flat_model)
    assert not result.guard_triggered
    assert validate(result.graph) == []
    assert all(n.kind is not NodeKind.IMPLICIT for n in result.graph.nodes)
    assert result.actions[-1] == "FINISH"


def test_decode_is_deterministic(training_corpus):
    model = train(training_corpus, SystemKind.EAGER, epochs=3, seed=1)
    tokens = training_corpus[0].graph.tokens
    a = parse_tokens(tokens, model)
    b = parse_tokens(tokens, model)
    assert a.actions == b.actions
    assert graphs_equal(a.graph, b.graph)


def test_single_token_decode(flat_model):
    result = parse_tokens(("hi",), flat_model)
    assert result.actions[-1] == "FINISH"
    assert validate(result.graph) == []
    assert 0 in primary_yield(result.graph, result.graph.root)


def test_decode_never_exceeds_budget(training_corpus, flat_model):
    from imparse.transitions import maxsteps
    for doc in training_corpus:
        result = parse_tokens(doc.graph.tokens, flat_model)
        assert len(result.actions) <= maxsteps(len(doc.graph.tokens))


def test_save_load_json_round_trip(tmp_path, training_corpus):
    model = train(training_corpus, SystemKind.EAGER, epochs=5, seed=0)
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.system is model.system
    assert loaded.labels == model.labels
    assert loaded.meta == model.meta
    for doc in training_corpus:
        a = parse_tokens(doc.graph.tokens, model)
        b = parse_tokens(doc.graph.tokens, loaded)
        assert a.actions == b.actions


def test_save_load_binary_round_trip(tmp_path, training_corpus):
    model = train(training_corpus, SystemKind.STANDARD, epochs=5, seed=0)
    path = tmp_path / "model.bin"
    save_model(model, path, binary=True)
    loaded = load_model(path)
    assert loaded.system is SystemKind.STANDARD
    doc = training_corpus[0]
    assert parse_tokens(doc.graph.tokens, loaded).actions == \
        parse_tokens(doc.graph.tokens, model).actions


def test_model_file_is_stable_json(tmp_path, training_corpus):
    model = train(training_corpus, SystemKind.EAGER, epochs=1, seed=0)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(model, p1)
    save_model(model, p2)
    assert p1.read_bytes() == p2.read_bytes()
    payload = json.loads(p1.read_text())
    assert payload["format"] == MODEL_FORMAT
    assert payload["version"] == MODEL_VERSION
    assert payload["hash_bits"] == HASH_BITS


@pytest.mark.parametrize("mangle,msg", [
    (lambda d: {"format": "something-else"}, "not a parser model"),
    (lambda d: {**d, "version": 99}, "unsupported model version"),
    (lambda d: {**d, "hash_bits": 4}, "incompatible feature space"),
])
def test_load_rejects_bad_payloads(tmp_path, training_corpus, mangle, msg):
    model = train(training_corpus, SystemKind.EAGER, epochs=0)
    path = tmp_path / "model.json"
    save_model(model, path)
    payload = json.loads(path.read_text())
    path.write_text(json.dumps(mangle(payload)))
    with pytest.raises(ModelFormatError, match=msg):
        load_model(path)


def test_load_rejects_non_dict_pickle(tmp_path):
    path = tmp_path / "model.bin"
    with open(path, "wb") as fh:
        pickle.dump([1, 2, 3], fh)
    with pytest.raises(ModelFormatError, match="not a parser model"):
        load_model(path)


def test_model_requires_all_label_families():
    with pytest.raises(KeyError):
        Model(system=SystemKind.EAGER, labels={"edge": ["A"]},
              perceptron=None)


def test_evaluate_model_report_shape(training_corpus):
    model = train(training_corpus[:3], SystemKind.EAGER, epochs=5, seed=0)
    report = evaluate_model(model, training_corpus[:3])
    assert set(report) >= {"primary", "remote", "implicit_labelled",
                           "implicit_unlabelled", "confusion"}
    for key in ("primary", "implicit_labelled"):
        assert set(report[key]) >= {"p", "r", "f", "matched", "gold", "pred"}
    assert report["implicit_labelled"]["f"] <= \
        report["implicit_unlabelled"]["f"] + 1e-9


def test_estimator_params_and_clone():
    est = ImplicitArgumentParser(system="standard", epochs=3, seed=5)
    assert est.get_params() == {"system": "standard", "epochs": 3, "seed": 5}
    est.set_params(epochs=9)
    assert est.epochs == 9
    fresh = clone(est)
    assert fresh.get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        fresh.predict([("a", "b")])


def test_estimator_fit_predict_score(training_corpus):
    docs = training_corpus[:3]
    est = ImplicitArgumentParser(epochs=0).fit(docs)
    assert est.n_documents_ == 3
    graphs = est.predict(docs)
    assert len(graphs) == 3
    assert all(validate(g) == [] for g in graphs)
    # predict also takes raw token sequences
    tok_graphs = est.predict([docs[0].graph.tokens])
    assert graphs_equal(tok_graphs[0], graphs[0])
    score = est.score(docs)
    assert 0.0 <= score <= 1.0


def test_estimator_rejects_empty_fit():
    with pytest.raises(ValueError, match="at least one document"):
        ImplicitArgumentParser().fit([])


def test_overfit_small_corpus_recovers_implicits(training_corpus):
    docs = training_corpus[:4]
    est = ImplicitArgumentParser(epochs=30, seed=0).fit(docs)
    assert est.score(docs) > 0.9
