import numpy as np
import pytest
from hypothesis import given, strategies as st

from imbtext.evaluate import (ConfusionMatrix, aggregate_folds, confusion, failed_row, format_row, header, metrics,
                              parse_row)


def test_confusion_examples():
    assert confusion([1, 1, 2, 2], [1, 2, 2, 2], 2).counts.tolist() == [[1, 1], [0, 2]]
    assert confusion([1, 2, 3], [1, 2, 3], 3).counts.tolist() == np.eye(3, dtype=int).tolist()
    cm = confusion([1, 2, 3, 3], [1, 1, 1, 1], 3).counts
    assert np.count_nonzero(cm.sum(axis=0)) == 1


def test_confusion_errors():
    with pytest.raises(ValueError):
        confusion([1, 2], [1], 2)
    with pytest.raises(ValueError):
        confusion([1, 3], [1, 1], 2)


def test_metrics_hand_example():
    rep = metrics(ConfusionMatrix(np.array([[1, 1], [0, 2]])))
    assert rep.accuracy == 0.75
    assert rep.precision.tolist() == pytest.approx([1.0, 2 / 3])
    assert rep.recall.tolist() == pytest.approx([0.5, 1.0])
    assert rep.f_score == pytest.approx(11 / 15)


def test_unpredicted_class_zero():
    rep = metrics(confusion([1, 2, 2, 2], [2, 2, 2, 2], 2))
    assert rep.precision[0] == 0 and rep.recall[0] == 0 and rep.f1[0] == 0


def test_diagonal_all_ones():
    rep = metrics(ConfusionMatrix(np.diag([3, 4, 5])))
    assert rep.accuracy == 1 and rep.f_score == 1 and (rep.precision == 1).all()


def test_pooled_example():
    a = ConfusionMatrix(np.array([[1, 0], [1, 0]]))
    b = ConfusionMatrix(np.array([[0, 1], [0, 1]]))
    rep = aggregate_folds([a, b])
    assert rep.pooled.counts.tolist() == [[1, 1], [1, 1]]
    assert rep.precision.tolist() == [0.5, 0.5] and rep.recall.tolist() == [0.5, 0.5]


def test_identical_folds_match_single():
    a = ConfusionMatrix(np.array([[3, 1], [2, 5]]))
    one, three = metrics(a), aggregate_folds([a, a, a])
    assert one.f_score == pytest.approx(three.f_score) and one.accuracy == pytest.approx(three.accuracy)


def test_empty_fold_list():
    with pytest.raises(ValueError):
        aggregate_folds([])


@given(st.lists(st.lists(st.integers(0, 9), min_size=9, max_size=9), min_size=1, max_size=6), st.randoms())
def test_pooling_order_invariant(grids, rnd):
    folds = [ConfusionMatrix(np.array(g).reshape(3, 3)) for g in grids]
    if sum(f.total for f in folds) == 0:
        return
    shuffled = folds[:]
    rnd.shuffle(shuffled)
    a, b = aggregate_folds(folds), aggregate_folds(shuffled)
    assert a.f_score == b.f_score and np.array_equal(a.precision, b.precision)


def test_csv_row_roundtrip():
    rep = metrics(ConfusionMatrix(np.array([[1, 1], [0, 2]])))
    assert header(2) == "name,accuracy,f-score,prec_1,rec_1,prec_2,rec_2"
    row = format_row("No sampling", rep)
    assert row == "No sampling,0.750000,0.733333,1.000000,0.500000,0.666667,1.000000"
    name, acc, f, prec, rec = parse_row(row)
    assert name == "No sampling" and acc == 0.75 and rec.tolist() == [0.5, 1.0]


def test_failed_row_shape():
    row = failed_row("cnn", "boom, bad", 2)
    assert row.split(",")[:3] == ["cnn", "FAILED", "boom; bad"]
    assert len(row.split(",")) == len(header(2).split(","))
