"""Bag-of-n-grams vocabulary, count vectors and stratified splitting."""

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse

MAX_N = 3


def ngrams(tokens, max_n=MAX_N):
    """All 1..max_n-grams of ``tokens`` as tuples, in order of appearance."""
    tokens = tuple(tokens)
    out = []
    for n in range(1, max_n + 1):
        out.extend(tokens[i:i + n] for i in range(len(tokens) - n + 1))
    return out


@dataclass(frozen=True)
class Vocabulary:
    """N-gram -> column index, plus the corpus frequency of every entry."""

    index: dict
    frequency: dict = field(default_factory=dict)
    remove_leq: int = 0

    def __len__(self):
        return len(self.index)

    def __contains__(self, gram):
        return tuple(gram) in self.index

    def ngram_list(self):
        out = [None] * len(self.index)
        for gram, i in self.index.items():
            out[i] = gram
        return out

    @classmethod
    def from_ngrams(cls, grams, remove_leq=0):
        grams = [tuple(g) for g in grams]
        return cls({g: i for i, g in enumerate(grams)}, {}, remove_leq)


@dataclass(frozen=True)
class SparseVector:
    indices: np.ndarray
    counts: np.ndarray
    dim: int

    def pairs(self):
        return list(zip(self.indices.tolist(), self.counts.tolist()))

    def toarray(self):
        out = np.zeros(self.dim)
        out[self.indices] = self.counts
        return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rows of a CSR count matrix paired with 1-based class labels."""

    X: sparse.csr_matrix
    y: np.ndarray
    n_classes: int

    def __post_init__(self):
        X = self.X
        if not sparse.isspmatrix_csr(X) or X.dtype != np.float64:
            X = sparse.csr_matrix(X, dtype=np.float64)
        if not X.has_sorted_indices:
            X = X.sorted_indices()
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} rows but {y.shape[0]} labels")
        if y.size and (y.min() < 1 or y.max() > self.n_classes):
            raise ValueError(f"labels must lie in 1..{self.n_classes}")

    def __len__(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    def class_counts(self):
        return np.bincount(self.y, minlength=self.n_classes + 1)[1:]

    def rows_of(self, label):
        return np.flatnonzero(self.y == label)

    def subset(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.X[rows], self.y[rows], self.n_classes)

    def with_columns(self, columns):
        return Dataset(self.X[:, np.asarray(columns, dtype=np.int64)], self.y, self.n_classes)

    def dense(self):
        return self.X.toarray()

    @classmethod
    def from_dense(cls, X, y, n_classes=None):
        y = np.asarray(y, dtype=np.int64)
        if n_classes is None:
            n_classes = int(y.max()) if y.size else 1
        return cls(sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64))), y, n_classes)


def build_vocabulary(corpus, remove_leq=0):
    """Keep every 1-3-gram whose total corpus frequency exceeds ``remove_leq``.

    Indices follow the lexicographic order of the token tuples, so the
    result does not depend on document order.
    """
    if remove_leq < 0:
        raise ValueError("remove_leq must be >= 0")
    counts = Counter()
    for tokens in corpus:
        counts.update(ngrams(tokens))
    kept = sorted(g for g, c in counts.items() if c > remove_leq)
    return Vocabulary({g: i for i, g in enumerate(kept)},
                      {g: counts[g] for g in kept}, remove_leq)


def vectorize(tokens, vocab):
    """Count vector of the in-vocabulary n-grams of one token stream."""
    counts = Counter(vocab.index[g] for g in ngrams(tokens) if g in vocab.index)
    idx = np.array(sorted(counts), dtype=np.int64)
    vals = np.array([counts[i] for i in idx.tolist()], dtype=np.float64)
    return SparseVector(idx, vals, len(vocab))


def vectorize_corpus(corpus, vocab):
    """CSR matrix with one row per token stream."""
    indptr = [0]
    indices = []
    data = []
    for tokens in corpus:
        vec = vectorize(tokens, vocab)
        indices.extend(vec.indices.tolist())
        data.extend(vec.counts.tolist())
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr)),
        shape=(len(indptr) - 1, len(vocab)))


def build_dataset(corpus, labels, vocab, n_classes=None):
    labels = np.asarray(labels, dtype=np.int64)
    if n_classes is None:
        n_classes = int(labels.max()) if labels.size else 1
    return Dataset(vectorize_corpus(corpus, vocab), labels, n_classes)


def as_fraction(x):
    """Exact rational for a user-supplied ratio or fraction (0.1 -> 1/10)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x)).limit_denominator(10**9)


def largest_remainder(quotas, total, rng=None):
    """Integer apportionment of ``total`` following the real ``quotas``.

    Leftover units go to the largest fractional parts; equal parts go to the
    lower position, or to random positions when ``rng`` is given.
    """
    quotas = [as_fraction(q) for q in quotas]
    base = [math.floor(q) for q in quotas]
    left = total - sum(base)
    if left < 0 or left > len(quotas):
        raise ValueError("quotas do not sum to total")
    rems = [q - b for q, b in zip(quotas, base)]
    keys = rng.random(len(quotas)) if rng is not None else np.arange(len(quotas))
    order = sorted(range(len(quotas)), key=lambda i: (-rems[i], keys[i]))
    for i in order[:left]:
        base[i] += 1
    return base


def stratified_split_indices(y, n_classes, train_fraction, seed=0):
    f = as_fraction(train_fraction)
    if not 0 < f < 1:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    y = np.asarray(y)
    counts = np.bincount(y, minlength=n_classes + 1)[1:]
    total = math.floor(f * int(counts.sum()) + Fraction(1, 2))
    n_train = largest_remainder([f * int(c) for c in counts], total)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c, k in zip(range(1, n_classes + 1), n_train):
        rows = rng.permutation(np.flatnonzero(y == c))
        train.append(rows[:k])
        test.append(rows[k:])
    return np.sort(np.concatenate(train)).astype(np.int64), np.sort(np.concatenate(test)).astype(np.int64)


def stratified_split(ds, train_fraction, seed=0):
    """Class-proportional train/test split with largest-remainder rounding."""
    tr, te = stratified_split_indices(ds.y, ds.n_classes, train_fraction, seed)
    return ds.subset(tr), ds.subset(te)


def stratified_kfold_indices(y, n_classes, k, seed=0):
    if k < 2:
        raise ValueError("k must be >= 2")
    y = np.asarray(y)
    counts = np.bincount(y, minlength=n_classes + 1)[1:]
    present = counts[counts > 0]
    if present.size and present.min() < k:
        warnings.warn(f"smallest class has {present.min()} rows, fewer than k={k}; "
                      "some folds miss that class", stacklevel=2)
    rng = np.random.default_rng(seed)
    fold_of = np.empty(y.shape[0], dtype=np.int64)
    offset = 0
    for c in range(1, n_classes + 1):
        rows = rng.permutation(np.flatnonzero(y == c))
        # continuing the round-robin across classes keeps total fold sizes within one
        fold_of[rows] = (offset + np.arange(rows.size)) % k
        offset += rows.size
    return [(np.flatnonzero(fold_of != f), np.flatnonzero(fold_of == f)) for f in range(k)]


def stratified_kfold(ds, k, seed=0):
    return [(ds.subset(tr), ds.subset(te))
            for tr, te in stratified_kfold_indices(ds.y, ds.n_classes, k, seed)]
