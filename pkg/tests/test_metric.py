import random

import pytest

from imparse import (PRF, ConfusionMatrix, MetricError, TokenMismatchError,
                     UNMATCHED, agreement_report, cohen_kappa,
                     confusion_from_pairs, corpus_prf, edge_f1, implicit_f1)
from imparse.fixtures import (make_random_pair, mechanic_pair, review_doc,
                              service_pair)


def test_prf_conventions():
    assert PRF(0, 0, 5).p == 1.0
    assert PRF(0, 5, 0).r == 1.0
    assert PRF(0, 0, 0).f == 0.0 if PRF(0, 0, 0).p + PRF(0, 0, 0).r == 0 \
        else PRF(0, 0, 0).f == 1.0
    # empty prediction against non-empty gold: P=1, R=0, F=0
    empty = PRF(0, 0, 7)
    assert (empty.p, empty.r, empty.f) == (1.0, 0.0, 0.0)


def test_prf_table_arithmetic():
    prf = PRF(9, 22, 50)
    assert round(prf.p, 3) == 0.409
    assert round(prf.r, 3) == 0.180
    assert round(prf.f, 3) == 0.250


def test_prf_addition_and_json():
    total = PRF(1, 2, 3) + PRF(2, 2, 2)
    assert (total.matched, total.pred_total, total.gold_total) == (3, 4, 5)
    assert total.to_json()["matched"] == 3
    asym = PRF(2, 4, 4, matched_pred=3) + PRF(1, 1, 1)
    assert asym.matched == 3 and asym.matched_pred == 4
    assert asym.to_json()["matched_pred"] == 4


def test_worked_example_mixed_pair():
    gold, pred = mechanic_pair()
    lab = implicit_f1(gold.graph, pred.graph, labelled=True)
    unl = implicit_f1(gold.graph, pred.graph, labelled=False)
    assert (lab.p, lab.r, lab.f) == (0.0, 0.0, 0.0)
    assert (unl.p, unl.r, unl.f) == (0.5, 0.5, 0.5)


def test_worked_example_label_miss_pair():
    gold, pred = service_pair()
    lab = implicit_f1(gold.graph, pred.graph, labelled=True)
    unl = implicit_f1(gold.graph, pred.graph, labelled=False)
    assert (lab.p, lab.r, lab.f) == (0.5, 0.5, 0.5)
    assert (unl.p, unl.r, unl.f) == (1.0, 1.0, 1.0)


def test_identity_comparison_is_perfect():
    doc = review_doc()
    for labelled in (True, False):
        prf = implicit_f1(doc.graph, doc.graph, labelled=labelled)
        assert (prf.p, prf.r, prf.f) == (1.0, 1.0, 1.0)
    assert edge_f1(doc.graph, doc.graph).f == 1.0


def test_edge_f1_distinguishes_attrs(corpus_by_id):
    gold = corpus_by_id["mechanic-gold"].graph
    pred = corpus_by_id["mechanic-pred"].graph
    # the pair differs only in implicit placement, which the explicit-edge
    # scores must not see
    assert edge_f1(gold, pred, "primary").f == 1.0
    assert edge_f1(gold, pred, "remote").f == 1.0
    with pytest.raises(MetricError):
        edge_f1(gold, pred, "implicit")
    with pytest.raises(MetricError):
        edge_f1(gold, pred, "banana")


def test_edge_f1_sees_category_changes():
    from imparse.fixtures import GraphBuilder

    def build(cat):
        b = GraphBuilder(["dogs", "bark"])
        sc = b.unit(b.root, "H")
        b.tok(sc, 0, cat)
        b.tok(sc, 1, "P")
        return b.graph()

    prf = edge_f1(build("A"), build("D"))
    assert (prf.matched, prf.pred_total, prf.gold_total) == (2, 3, 3)


def test_token_mismatch_raises():
    a = review_doc().graph
    b, _ = make_random_pair(random.Random(0))
    with pytest.raises(TokenMismatchError):
        implicit_f1(a, b)
    with pytest.raises(TokenMismatchError):
        edge_f1(a, b)


def test_unit_level_counts(corpus_by_id):
    gold = corpus_by_id["service-gold"].graph
    pred = corpus_by_id["service-pred"].graph
    lab = implicit_f1(gold, pred, labelled=True, unit_level=True)
    # only the scene-level group matches exactly; it has one unit
    assert (lab.matched, lab.pred_total, lab.gold_total) == (1, 2, 3)
    unl = implicit_f1(gold, pred, labelled=False, unit_level=True)
    assert (unl.matched, unl.matched_pred) == (3, 2)
    assert unl.p == 1.0
    assert unl.r == 1.0


def test_corpus_prf_micro_sums():
    m_gold, m_pred = mechanic_pair()
    s_gold, s_pred = service_pair()
    pairs = [(m_gold.graph, m_pred.graph), (s_gold.graph, s_pred.graph)]
    lab = corpus_prf(pairs, labelled=True)
    assert (lab.matched, lab.pred_total, lab.gold_total) == (1, 4, 4)
    unl = corpus_prf(pairs, labelled=False)
    assert (unl.matched, unl.pred_total, unl.gold_total) == (3, 4, 4)


def test_symmetry_and_label_dominance_on_random_pairs():
    rng = random.Random(7)
    for _ in range(300):
        gold, pred = make_random_pair(rng)
        for unit_level in (False, True):
            lab = implicit_f1(gold, pred, labelled=True,
                              unit_level=unit_level)
            rev = implicit_f1(pred, gold, labelled=True,
                              unit_level=unit_level)
            assert lab.p == rev.r and lab.r == rev.p
            unl = implicit_f1(gold, pred, labelled=False,
                              unit_level=unit_level)
            assert lab.f <= unl.f + 1e-12


def test_confusion_from_pairs():
    m_gold, m_pred = mechanic_pair()
    s_gold, s_pred = service_pair()
    matrix = confusion_from_pairs(
        [(m_gold.graph, m_pred.graph), (s_gold.graph, s_pred.graph)])
    assert matrix.cell("Non-specific", UNMATCHED) == 1
    assert matrix.cell(UNMATCHED, "Non-specific") == 1
    assert matrix.cell("Non-specific", "Type-identifiable") == 1
    assert matrix.cell("Generic|Genre-based", "Generic") == 1
    assert matrix.cell("Non-specific", "Non-specific") == 1
    assert matrix.total() == 5


def test_confusion_matrix_json_round_trip():
    m = ConfusionMatrix()
    m.add("a", "a", 3)
    m.add("a", "b")
    m.add(UNMATCHED, "b", 2)
    again = ConfusionMatrix.from_json(m.to_json())
    assert again.to_json() == m.to_json()
    assert again.classes()[0] == UNMATCHED


def test_kappa_perfect_agreement():
    m = ConfusionMatrix()
    m.add("x", "x", 5)
    m.add("y", "y", 5)
    assert cohen_kappa(m) == 1.0


def test_kappa_chance_level_agreement():
    m = ConfusionMatrix()
    for g in ("x", "y"):
        for p in ("x", "y"):
            m.add(g, p, 4)
    assert cohen_kappa(m) == 0.0


def test_kappa_hand_computed_three_class():
    m = ConfusionMatrix()
    m.add("a", "a", 6)
    m.add("a", "b", 2)
    m.add("b", "b", 4)
    m.add("b", "c", 1)
    m.add("c", "c", 5)
    m.add("c", "a", 2)
    # p_o = 15/20, p_e = (8*8 + 5*6 + 7*6)/400 = 136/400
    expected = (0.75 - 0.34) / (1 - 0.34)
    assert cohen_kappa(m) == pytest.approx(expected)


def test_kappa_ignores_unmatched_mass():
    m = ConfusionMatrix()
    m.add("x", "x", 5)
    m.add("y", "y", 5)
    m.add("x", UNMATCHED, 50)
    m.add(UNMATCHED, "y", 50)
    assert cohen_kappa(m) == 1.0


def test_kappa_degenerate_cases():
    with pytest.raises(MetricError):
        cohen_kappa(ConfusionMatrix())
    single = ConfusionMatrix()
    single.add("x", "x", 9)
    with pytest.raises(MetricError):
        cohen_kappa(single)


def test_agreement_report_alignment():
    m_gold, m_pred = mechanic_pair()
    s_gold, s_pred = service_pair()
    lab, unl, matrix, kappa = agreement_report([m_gold, s_gold],
                                               [s_pred, m_pred])
    assert (lab.matched, lab.gold_total) == (1, 4)
    assert (unl.matched, unl.gold_total) == (3, 4)
    assert matrix.total() == 5
    assert kappa is not None
    with pytest.raises(MetricError):
        agreement_report([m_gold], [s_pred])
