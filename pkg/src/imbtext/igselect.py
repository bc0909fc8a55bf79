"""Multiclass information gain feature ranking.

IG(f) = H(C) - H(C | f), in bits.  In ``presence`` mode a feature takes
the values {0, 1}; in ``count`` mode every distinct observed count is its
own value, with no binning or smoothing.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

MODES = ("presence", "count")
# scores closer than this are one tie group
_TIE_DECIMALS = 12


@dataclass(frozen=True)
class IgRanking:
    scores: np.ndarray
    order: np.ndarray
    tie_groups: tuple

    def __len__(self):
        return self.scores.shape[0]


@dataclass(frozen=True)
class Selection:
    features: np.ndarray
    overshoot: bool


def _entropy_bits(counts):
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _columns(ds, mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    X = sparse.csc_matrix(ds.X)
    X.eliminate_zeros()
    if mode == "presence":
        X = X.copy()
        X.data[:] = 1.0
    return X


def information_gain(ds, feature, mode="count", base=2.0):
    """IG of a single column."""
    if len(ds) == 0:
        raise ValueError("empty dataset")
    return float(information_gain_all(ds, mode, base)[feature])


def information_gain_all(ds, mode="count", base=2.0):
    """IG of every column at once.

    The conditional term is accumulated from (feature, value, class) joint
    counts; rows with value zero are recovered per feature from the class
    totals.  Terms are summed in (value, class) order, independent of the
    row order of ``ds``.
    """
    n = len(ds)
    if n == 0:
        raise ValueError("empty dataset")
    X = _columns(ds, mode)
    V = X.shape[1]
    m = ds.n_classes
    class_totals = ds.class_counts().astype(np.float64)
    h_c = _entropy_bits(class_totals)

    feat = np.repeat(np.arange(V), np.diff(X.indptr))
    vals = X.data
    cls = ds.y[X.indices] - 1

    # joint counts N(f, v, c) over nonzero values
    uniq_fv, fv_id = np.unique(np.stack([feat, vals]), axis=1, return_inverse=True) if feat.size else (
        np.empty((2, 0)), np.empty(0, dtype=np.int64))
    fv_id = np.asarray(fv_id).reshape(-1)
    joint = np.zeros((uniq_fv.shape[1], m))
    np.add.at(joint, (fv_id, cls), 1.0)
    fv_feat = uniq_fv[0].astype(np.int64)

    # value-zero rows per feature and class
    nonzero_by_class = np.zeros((V, m))
    np.add.at(nonzero_by_class, fv_feat, joint)
    zero_joint = class_totals[None, :] - nonzero_by_class

    def cond_term(J):
        # sum_c N(v,c) log2(N(v,c)/N(v)) for each value row
        nv = J.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(J > 0, J * np.log2(np.where(J > 0, J, 1.0) / np.where(nv > 0, nv, 1.0)), 0.0)
        return t.sum(axis=1)

    term = cond_term(zero_joint)
    per_value = cond_term(joint)
    # per-feature sums in ascending value order (np.unique sorts (feature, value))
    nz_sum = np.zeros(V)
    np.add.at(nz_sum, fv_feat, per_value)
    ig = h_c + (term + nz_sum) / n
    if base != 2.0:
        ig = ig / np.log2(base)
    return ig


def rank_features(ds, mode="count", base=2.0):
    """Features sorted by descending IG, ties by ascending index."""
    scores = information_gain_all(ds, mode, base)
    return ranking_from_scores(scores)


def ranking_from_scores(scores):
    scores = np.asarray(scores, dtype=np.float64)
    key = np.round(scores, _TIE_DECIMALS)
    order = np.lexsort((np.arange(scores.size), -key))
    groups = []
    start = 0
    for i in range(1, order.size + 1):
        if i == order.size or key[order[i]] != key[order[start]]:
            groups.append(order[start:i])
            start = i
    return IgRanking(scores, order.astype(np.int64), tuple(groups))


def select_top(ranking, target_k):
    """Largest prefix of whole tie groups holding at most ``target_k`` features.

    The tie group that would straddle the cutoff is dropped entirely.  When
    even the first group is larger than ``target_k`` it is returned whole
    and ``overshoot`` is set.
    """
    if not 1 <= target_k <= len(ranking):
        raise ValueError(f"target_k must lie in 1..{len(ranking)}")
    taken = []
    size = 0
    for group in ranking.tie_groups:
        if size + group.size > target_k:
            break
        taken.append(group)
        size += group.size
    if not taken:
        return Selection(ranking.tie_groups[0].copy(), True)
    return Selection(np.concatenate(taken), False)
