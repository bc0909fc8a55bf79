"""Brute-force neighbour queries and Tomek links over sparse count rows.

The metric is squared Euclidean distance.  Equal distances always resolve
to the lower row index.
"""

import numpy as np

from .kernels import as_csr, knn_search, pairwise_sqdist

_BLOCK_CELLS = 1 << 22


class DistanceIndex:
    """Immutable view over the rows of a matrix for neighbour queries."""

    def __init__(self, X):
        self.X = as_csr(X)

    def __len__(self):
        return self.X.shape[0]

    def distance(self, i, j):
        return float(pairwise_sqdist(self.X[i], self.X[j])[0, 0])

    def distances_from(self, i, rows=None):
        ref = self.X if rows is None else self.X[np.asarray(rows, dtype=np.int64)]
        return pairwise_sqdist(self.X[i], ref)[0]

    def distance_matrix(self, rows=None, cols=None):
        A = self.X if rows is None else self.X[np.asarray(rows, dtype=np.int64)]
        B = self.X if cols is None else self.X[np.asarray(cols, dtype=np.int64)]
        return pairwise_sqdist(A, B)

    def kneighbors(self, queries, k, restrict_to=None):
        """Row indices of the ``k`` nearest neighbours of each query row.

        A query never counts as its own neighbour.  The result is an
        ``(len(queries), k)`` array padded with -1 where fewer candidates
        exist.
        """
        queries = np.asarray(queries, dtype=np.int64).reshape(-1)
        if restrict_to is None:
            cand = np.arange(len(self), dtype=np.int64)
        else:
            cand = np.unique(np.asarray(restrict_to, dtype=np.int64))
        if k < 1:
            raise ValueError("k must be >= 1")
        if cand.size == 0 or queries.size == 0:
            return np.full((queries.size, k), -1, dtype=np.int64)
        pos = knn_search(self.X[queries], queries, self.X[cand], cand, k)
        return np.where(pos >= 0, cand[np.maximum(pos, 0)], -1)

    def knn(self, query, k, restrict_to=None):
        row = self.kneighbors([query], k, restrict_to)[0]
        return row[row >= 0]


def _nearest_sets(index):
    """Per row: distance to its nearest other row, and every row at that distance."""
    n = len(index)
    nearest = np.full(n, np.inf)
    argmins = [None] * n
    step = max(1, _BLOCK_CELLS // max(1, n))
    for s in range(0, n, step):
        rows = np.arange(s, min(n, s + step))
        D = index.distance_matrix(rows)
        D[np.arange(rows.size), rows] = np.inf
        m = D.min(axis=1)
        nearest[rows] = m
        for r, i in enumerate(rows):
            argmins[i] = np.flatnonzero(D[r] == m[r])
    return nearest, argmins


def tomek_links(index, labels):
    """All opposite-label pairs ``(i, j)``, ``i < j``, that are each other's nearest.

    No third row may be strictly closer to either member; a row tied with
    the partner does not break the link.
    """
    labels = np.asarray(labels)
    n = len(index)
    if labels.shape[0] != n:
        raise ValueError("one label per row required")
    if n < 2:
        return []
    nearest, argmins = _nearest_sets(index)
    links = []
    for i in range(n):
        for j in argmins[i].tolist():
            if j > i and labels[i] != labels[j] and nearest[i] == nearest[j]:
                links.append((i, j))
    return links
