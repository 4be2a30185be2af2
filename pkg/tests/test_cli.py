"""End-to-end checks of every subcommand, run in process via cli.main."""

import contextlib
import io
import json

import pytest

from imparse import cli, codec
from imparse.fixtures import (GraphBuilder, mechanic_pair, make_training_corpus,
                              service_pair)


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv)
    return code, json.loads(out), err


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory, training_corpus):
    path = tmp_path_factory.mktemp("corpus") / "gold.jsonl"
    codec.write_corpus(path, training_corpus)
    return str(path)


@pytest.fixture(scope="module")
def model_file(tmp_path_factory, corpus_file):
    out = tmp_path_factory.mktemp("model") / "model.json"
    with contextlib.redirect_stdout(io.StringIO()):
        code = cli.main(["train", corpus_file, "--out", str(out),
                         "--epochs", "3", "--seed", "0"])
    assert code == 0
    return str(out)


def test_validate_clean_corpus(capsys, corpus_file):
    code, report, _ = run_json(capsys, ["validate", corpus_file])
    assert code == 0
    assert report["ok"] is True
    assert report["files"][0]["errors"] == []


def test_validate_flags_bad_lines(capsys, tmp_path, training_corpus):
    path = tmp_path / "mixed.jsonl"
    good = codec.write_document(training_corpus[0]).decode()
    path.write_text(good + "\n{not json\n" + good + "\n")
    code, report, _ = run_json(capsys, ["validate", str(path)])
    assert code == 1
    assert report["ok"] is False
    errors = report["files"][0]["errors"]
    assert len(errors) == 1 and errors[0].startswith("line 2:")


def test_validate_missing_file_is_usage_error(capsys, tmp_path):
    code, out, err = run(capsys, ["validate", str(tmp_path / "nope.jsonl")])
    assert code == 2
    assert "error" in err


def test_stats_totals_add_up(capsys, tmp_path, training_corpus):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    codec.write_corpus(a, training_corpus[:4])
    codec.write_corpus(b, training_corpus[4:])
    code, report, _ = run_json(capsys, ["stats", str(a), str(b)])
    assert code == 0
    total = report["total"]
    assert total["sentences"] == len(training_corpus)
    for key in ("tokens", "nodes", "edges"):
        assert total[key] == sum(f[key] for f in report["files"])
    assert total["implicit"]["total"] == sum(
        f["implicit"]["total"] for f in report["files"])


def test_stats_rejects_duplicate_ids(capsys, tmp_path, training_corpus):
    path = tmp_path / "dup.jsonl"
    codec.write_corpus(path, [training_corpus[0], training_corpus[0]])
    code, out, err = run(capsys, ["stats", str(path)])
    assert code == 1
    assert "duplicate document id" in err


def write_pairs(tmp_path, pairs):
    gold = tmp_path / "gold.jsonl"
    pred = tmp_path / "pred.jsonl"
    codec.write_corpus(gold, [g for g, _ in pairs])
    codec.write_corpus(pred, [p for _, p in pairs])
    return str(gold), str(pred)


def test_evaluate_reports_worked_pair_values(capsys, tmp_path):
    gold, pred = write_pairs(tmp_path, [mechanic_pair()])
    code, report, _ = run_json(capsys, ["evaluate", gold, pred])
    assert code == 0
    assert report["implicit_labelled"]["f"] == 0.0
    assert report["implicit_unlabelled"]["f"] == 0.5
    assert report["primary"]["f"] == 1.0
    assert "kappa" in report


def test_evaluate_second_pair_and_flags(capsys, tmp_path):
    gold, pred = write_pairs(tmp_path, [service_pair()])
    code, report, _ = run_json(capsys, ["evaluate", gold, pred,
                                        "--labelled-only"])
    assert code == 0
    assert report["implicit_labelled"]["f"] == 0.5
    assert "implicit_unlabelled" not in report
    code, report, _ = run_json(
        capsys, ["evaluate", gold, pred, "--unit-level-metric"])
    assert report["implicit_unlabelled"]["p"] == 1.0
    assert report["implicit_unlabelled"]["r"] == 1.0


def test_evaluate_missing_prediction(capsys, tmp_path):
    (g_m, p_m), (g_s, _) = mechanic_pair(), service_pair()
    gold = tmp_path / "gold.jsonl"
    pred = tmp_path / "pred.jsonl"
    codec.write_corpus(gold, [g_m, g_s])
    codec.write_corpus(pred, [p_m])
    code, out, err = run(capsys, ["evaluate", str(gold), str(pred)])
    assert code == 1
    assert "no document with id 'service'" in err


def test_oracle_check_clean(capsys, corpus_file):
    for system in ("eager", "standard"):
        code, report, err = run_json(
            capsys, ["oracle-check", corpus_file, "--system", system])
        assert code == 0
        assert report["ok"] is True
        assert report["files"][0]["coverage"] == 100.0
        assert "100.0% round-trip" in err


def test_oracle_check_reports_stuck_document(capsys, tmp_path):
    b = GraphBuilder(["song"])
    sc = b.unit(b.root, "H")
    b.tok(sc, 0, "P")
    empty = b.unit(sc, "A")
    b.imp(empty, "A+generic")
    path = tmp_path / "stuck.jsonl"
    codec.write_corpus(path, [b.document("hollow")])
    code, report, _ = run_json(capsys, ["oracle-check", str(path)])
    assert code == 1
    failures = report["files"][0]["failures"]
    assert failures[0]["id"] == "hollow"
    assert failures[0]["status"] == "stuck"


def test_train_writes_model_and_summary(capsys, tmp_path, corpus_file):
    out = tmp_path / "m.json"
    code, report, _ = run_json(
        capsys, ["train", corpus_file, "--out", str(out), "--epochs", "1"])
    assert code == 0
    assert report["trained_on"] == len(make_training_corpus())
    assert report["skipped"] == []
    payload = json.loads(out.read_text())
    assert payload["format"] == "imparse-model"


def test_train_binary_model_loads(capsys, tmp_path, corpus_file):
    out = tmp_path / "m.bin"
    code, _, _ = run_json(
        capsys, ["train", corpus_file, "--out", str(out),
                 "--epochs", "0", "--binary", "--system", "standard"])
    assert code == 0
    from imparse import load_model
    assert load_model(out).system.value == "standard"


def test_parse_jsonl_input(capsys, tmp_path, corpus_file, model_file):
    out = tmp_path / "pred.jsonl"
    code, stdout, _ = run(capsys, ["parse", corpus_file,
                                   "--model", model_file, "--out", str(out)])
    assert code == 0
    pred = list(codec.iter_corpus(out))
    gold = list(codec.iter_corpus(corpus_file))
    assert [d.id for d in pred] == [d.id for d in gold]
    assert [d.text for d in pred] == [d.text for d in gold]


def test_parse_text_input(capsys, tmp_path, model_file):
    src = tmp_path / "plain.txt"
    src.write_text("Great service and awesome prices .\n\nClosed on Sundays\n")
    out = tmp_path / "pred.jsonl"
    code, _, _ = run(capsys, ["parse", str(src), "--model", model_file,
                              "--out", str(out)])
    assert code == 0
    docs = list(codec.iter_corpus(out))
    assert [d.id for d in docs] == ["s0001", "s0003"]
    assert docs[0].graph.tokens == ("Great", "service", "and", "awesome",
                                    "prices", ".")
    assert docs[0].text[slice(*docs[0].tokens[1])] == "service"


def test_parse_stdout_when_no_out(capsys, tmp_path, model_file):
    src = tmp_path / "one.txt"
    src.write_text("Closed on Sundays\n")
    code, stdout, _ = run(capsys, ["parse", str(src), "--model", model_file])
    assert code == 0
    lines = [l for l in stdout.splitlines() if l]
    assert len(lines) == 1
    assert json.loads(lines[0])["id"] == "s0001"


def test_parse_empty_input(capsys, tmp_path, model_file):
    src = tmp_path / "empty.txt"
    src.write_text("\n \n")
    code, _, err = run(capsys, ["parse", str(src), "--model", model_file])
    assert code == 1
    assert "no sentences" in err


def test_parse_emit_dot(capsys, tmp_path, model_file):
    src = tmp_path / "plain.txt"
    src.write_text("Closed on Sundays\n")
    dot_dir = tmp_path / "dot"
    out = tmp_path / "pred.jsonl"
    code, _, _ = run(capsys, ["parse", str(src), "--model", model_file,
                              "--out", str(out), "--emit-dot", str(dot_dir)])
    assert code == 0
    dot = (dot_dir / "s0001.dot").read_text()
    assert dot.startswith('digraph "s0001"')
    assert 'label="Closed"' in dot
    assert "style=solid" in dot


def test_parse_parallel_matches_serial(capsys, tmp_path, corpus_file,
                                       model_file):
    serial = tmp_path / "serial.jsonl"
    parallel = tmp_path / "parallel.jsonl"
    assert run(capsys, ["parse", corpus_file, "--model", model_file,
                        "--out", str(serial)])[0] == 0
    assert run(capsys, ["parse", corpus_file, "--model", model_file,
                        "--out", str(parallel), "--jobs", "2"])[0] == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_parse_missing_model(capsys, tmp_path, corpus_file):
    code, _, err = run(capsys, ["parse", corpus_file,
                                "--model", str(tmp_path / "none.json")])
    assert code == 2
    assert "error" in err


def test_convert_round_trip(capsys, tmp_path, corpus_file):
    as_json = tmp_path / "corpus.json"
    back = tmp_path / "back.jsonl"
    assert run(capsys, ["convert", corpus_file, str(as_json)])[0] == 0
    array = json.loads(as_json.read_text())
    assert isinstance(array, list) and len(array) == 16
    assert run(capsys, ["convert", str(as_json), str(back)])[0] == 0
    with open(corpus_file, "rb") as fh:
        assert back.read_bytes() == fh.read()


def test_convert_rejects_unknown_extensions(capsys, tmp_path, corpus_file):
    code, _, err = run(capsys, ["convert", corpus_file,
                                str(tmp_path / "out.xml")])
    assert code == 2
    assert "expects .json or .jsonl output" in err
    code, _, err = run(capsys, ["convert", str(tmp_path / "in.csv"),
                                str(tmp_path / "out.jsonl")])
    assert code == 2


def test_convert_rejects_non_array_json(capsys, tmp_path):
    src = tmp_path / "notarray.json"
    src.write_text('{"id": "x"}\n')
    code, _, err = run(capsys, ["convert", str(src),
                                str(tmp_path / "out.jsonl")])
    assert code == 1
    assert "expected a JSON array" in err


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["no-such-command"])
    assert err.value.code == 2
