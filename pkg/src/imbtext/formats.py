"""Readers and writers for the text formats exchanged between subcommands.

All files are UTF-8 with LF line endings.

corpus        ``label<TAB>text``
vocabulary    ``ngram<TAB>index<TAB>frequency`` (n-gram tokens joined by spaces)
dataset       ``# dim=V classes=m`` header, then ``label idx:count ...`` per row
provenance    ``row<TAB>tag``
ranking       ``index<TAB>ngram<TAB>ig_score``
predictions   ``row<TAB>true<TAB>predicted`` (optionally ``<TAB>fold``)
"""

import re
import sys
from pathlib import Path

import numpy as np
from scipy import sparse

from .textprep import RawDocument
from .vectorize import Dataset, Vocabulary


class FormatError(ValueError):
    """Malformed input, located by 1-based line and column."""

    def __init__(self, path, line, column, message):
        self.path = str(path)
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{self.path}:{line}:{column}: {message}")


def _open_w(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


def _lines(path):
    """Numbered lines without terminators; ``-`` reads standard input."""
    if str(path) == "-":
        for no, line in enumerate(sys.stdin, 1):
            yield no, line.rstrip("\n").rstrip("\r")
        return
    with open(path, encoding="utf-8", newline="") as fh:
        for no, line in enumerate(fh, 1):
            yield no, line.rstrip("\n").rstrip("\r")


def fmt_count(v):
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _parse_label(path, no, col, text):
    try:
        label = int(text)
    except ValueError:
        raise FormatError(path, no, col, f"label {text!r} is not an integer") from None
    if label < 1:
        raise FormatError(path, no, col, f"label {label} must be >= 1")
    return label


# -- corpus -------------------------------------------------------------------


def read_corpus(path):
    docs = []
    for no, line in _lines(path):
        if not line:
            continue
        tab = line.find("\t")
        if tab < 0:
            raise FormatError(path, no, len(line) + 1, "expected label<TAB>text")
        docs.append(RawDocument(line[tab + 1:], _parse_label(path, no, 1, line[:tab])))
    return docs


def write_corpus(path, docs):
    with _open_w(path) as fh:
        for doc in docs:
            text = " ".join(doc.text.split())
            fh.write(f"{doc.label}\t{text}\n")


# -- vocabulary ---------------------------------------------------------------


def write_vocabulary(path, vocab):
    with _open_w(path) as fh:
        for i, gram in enumerate(vocab.ngram_list()):
            fh.write(f"{' '.join(gram)}\t{i}\t{vocab.frequency.get(gram, 0)}\n")


def read_vocabulary(path):
    index, freq = {}, {}
    for no, line in _lines(path):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(path, no, 1, "expected ngram<TAB>index<TAB>frequency")
        gram = tuple(parts[0].split(" "))
        try:
            idx, f = int(parts[1]), int(parts[2])
        except ValueError:
            raise FormatError(path, no, len(parts[0]) + 2, "index and frequency must be integers") from None
        index[gram] = idx
        freq[gram] = f
    if sorted(index.values()) != list(range(len(index))):
        raise FormatError(path, 1, 1, "indices are not dense 0..V-1")
    return Vocabulary(index, freq)


# -- sparse dataset -----------------------------------------------------------

_HEADER = re.compile(r"#\s*dim=(\d+)\s+classes=(\d+)\s*$")


def write_dataset(path, ds):
    X = ds.X
    with _open_w(path) as fh:
        fh.write(f"# dim={ds.dim} classes={ds.n_classes}\n")
        for r in range(X.shape[0]):
            lo, hi = X.indptr[r], X.indptr[r + 1]
            cells = " ".join(f"{j}:{fmt_count(v)}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi]) if v != 0)
            fh.write(f"{ds.y[r]} {cells}".rstrip() + "\n")


def read_dataset(path):
    dim = n_classes = None
    labels, indptr, indices, data = [], [0], [], []
    for no, line in _lines(path):
        if not line.strip():
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m and dim is None:
                dim, n_classes = int(m.group(1)), int(m.group(2))
            continue
        fields = line.split(" ")
        labels.append(_parse_label(path, no, 1, fields[0]))
        col = len(fields[0]) + 2
        last = -1
        for cell in fields[1:]:
            if not cell:
                col += 1
                continue
            idx, sep, val = cell.partition(":")
            try:
                j, v = int(idx), float(val)
            except ValueError:
                raise FormatError(path, no, col, f"bad cell {cell!r}, expected idx:count") from None
            if not sep or j < 0 or j <= last:
                raise FormatError(path, no, col, f"bad cell {cell!r}, indices must increase")
            if dim is not None and j >= dim:
                raise FormatError(path, no, col, f"index {j} outside dimension {dim}")
            last = j
            indices.append(j)
            data.append(v)
            col += len(cell) + 1
        indptr.append(len(indices))
    if dim is None:
        dim = max(indices) + 1 if indices else 0
    if n_classes is None:
        n_classes = max(labels) if labels else 1
    if labels and max(labels) > n_classes:
        raise FormatError(path, 1, 1, f"labels exceed declared {n_classes} classes")
    X = sparse.csr_matrix((np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64),
                           np.array(indptr, dtype=np.int64)), shape=(len(labels), dim))
    return Dataset(X, np.array(labels, dtype=np.int64), n_classes)


# -- provenance, rankings, predictions ----------------------------------------


def write_provenance(path, tags):
    with _open_w(path) as fh:
        for i, tag in enumerate(tags):
            fh.write(f"{i}\t{tag}\n")


def read_provenance(path):
    out = []
    for no, line in _lines(path):
        if line:
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(path, no, 1, "expected row<TAB>tag")
            out.append(parts[1])
    return out


def write_ranking(path, ranking, ngrams=None):
    with _open_w(path) as fh:
        for i in ranking.order.tolist():
            name = " ".join(ngrams[i]) if ngrams is not None else ""
            fh.write(f"{i}\t{name}\t{float(ranking.scores[i])!r}\n")


def read_ranking(path):
    rows = []
    for no, line in _lines(path):
        if line:
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(path, no, 1, "expected index<TAB>ngram<TAB>ig_score")
            try:
                rows.append((int(parts[0]), parts[1], float(parts[2])))
            except ValueError:
                raise FormatError(path, no, 1, "index must be an integer and score a real") from None
    return rows


def write_predictions(path, y_true, y_pred, folds=None, rows=None):
    with _open_w(path) as fh:
        for r, (t, p) in enumerate(zip(y_true, y_pred)):
            extra = f"\t{folds[r]}" if folds is not None else ""
            row = rows[r] if rows is not None else r
            fh.write(f"{row}\t{t}\t{p}{extra}\n")


def read_predictions(path):
    true, pred, folds = [], [], []
    for no, line in _lines(path):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) not in (3, 4):
            raise FormatError(path, no, 1, "expected row<TAB>true<TAB>predicted[<TAB>fold]")
        true.append(int(parts[1]))
        pred.append(int(parts[2]))
        folds.append(int(parts[3]) if len(parts) == 4 else 0)
    return np.array(true), np.array(pred), np.array(folds)
