import numpy as np
import pytest
from scipy import sparse

from imbtext import formats
from imbtext.igselect import rank_features
from imbtext.textprep import RawDocument
from imbtext.vectorize import Dataset, build_vocabulary


def test_corpus_roundtrip(tmp_path):
    docs = [RawDocument("hello  world", 2), RawDocument("x", 1)]
    p = tmp_path / "c.tsv"
    formats.write_corpus(p, docs)
    back = formats.read_corpus(p)
    assert [(d.label, d.text) for d in back] == [(2, "hello world"), (1, "x")]
    assert b"\r" not in p.read_bytes()


def test_corpus_error_location(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("1\tok\nno tab here\n", encoding="utf-8")
    with pytest.raises(formats.FormatError) as exc:
        formats.read_corpus(p)
    assert (exc.value.line, exc.value.column) == (2, 12)


def test_bad_label(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("x\tok\n", encoding="utf-8")
    with pytest.raises(formats.FormatError) as exc:
        formats.read_corpus(p)
    assert exc.value.line == 1


def test_dataset_roundtrip(tmp_path):
    X = sparse.random(12, 9, density=0.3, random_state=1, format="csr")
    X.data = np.round(X.data * 5) + 1
    ds = Dataset(X, np.arange(12) % 3 + 1, 3)
    p = tmp_path / "d.txt"
    formats.write_dataset(p, ds)
    back = formats.read_dataset(p)
    assert back.n_classes == 3 and back.dim == 9
    assert (back.X != ds.X).nnz == 0
    assert np.array_equal(back.y, ds.y)


def test_dataset_fractional_values_roundtrip(tmp_path):
    ds = Dataset.from_dense([[0.1 + 0.2, 0.0], [1.0, 2.5]], [1, 2])
    p = tmp_path / "d.txt"
    formats.write_dataset(p, ds)
    assert np.array_equal(formats.read_dataset(p).dense(), ds.dense())


@pytest.mark.parametrize("line, col", [("1 3:1 2:1", 7), ("1 0:x", 3), ("1 5:1", 3)])
def test_dataset_errors(tmp_path, line, col):
    p = tmp_path / "d.txt"
    p.write_text(f"# dim=4 classes=2\n{line}\n", encoding="utf-8")
    with pytest.raises(formats.FormatError) as exc:
        formats.read_dataset(p)
    assert (exc.value.line, exc.value.column) == (2, col)


def test_vocabulary_roundtrip(tmp_path):
    vocab = build_vocabulary([["a", "b"], ["a"]])
    p = tmp_path / "v.tsv"
    formats.write_vocabulary(p, vocab)
    back = formats.read_vocabulary(p)
    assert back.index == vocab.index and back.frequency == vocab.frequency


def test_ranking_and_predictions(tmp_path):
    ds = Dataset.from_dense([[1, 0], [1, 1], [0, 1], [0, 0]], [1, 1, 2, 2])
    r = rank_features(ds)
    p = tmp_path / "r.tsv"
    formats.write_ranking(p, r, [("a",), ("b",)])
    rows = formats.read_ranking(p)
    assert [i for i, _, _ in rows] == r.order.tolist()
    assert rows[0][2] == r.scores[r.order[0]]
    q = tmp_path / "p.tsv"
    formats.write_predictions(q, [1, 2], [2, 2], folds=[0, 1], rows=[5, 7])
    t, pr, f = formats.read_predictions(q)
    assert t.tolist() == [1, 2] and pr.tolist() == [2, 2] and f.tolist() == [0, 1]
    assert q.read_text().splitlines()[0] == "5\t1\t2\t0"


def test_provenance_roundtrip(tmp_path):
    p = tmp_path / "prov.tsv"
    formats.write_provenance(p, ["original", "synthetic"])
    assert formats.read_provenance(p) == ["original", "synthetic"]
