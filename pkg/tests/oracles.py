"""Brute-force reference implementations, written independently of the package."""

import numpy as np


def dense(X):
    return X.toarray() if hasattr(X, "toarray") else np.asarray(X, dtype=float)


def sqdist_matrix(X):
    X = dense(X)
    return ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)


def knn_oracle(X, q, k, cand=None):
    X = dense(X)
    cand = range(len(X)) if cand is None else sorted(set(int(c) for c in cand))
    dist = [(float(((X[q] - X[j]) ** 2).sum()), j) for j in cand if j != q]
    return [j for _, j in sorted(dist)[:k]]


def tomek_oracle(X, y):
    """Every opposite-label pair with no third point strictly closer to either member."""
    D = sqdist_matrix(X)
    n = len(D)
    links = []
    for i in range(n):
        for j in range(i + 1, n):
            if y[i] == y[j]:
                continue
            if all(D[i, z] >= D[i, j] and D[j, z] >= D[i, j] for z in range(n) if z not in (i, j)):
                links.append((i, j))
    return links


def enn_oracle(X, y, k, protect=()):
    """Rows removed by one leave-one-out k-NN vote; a tied vote removes."""
    D = sqdist_matrix(X)
    n = len(D)
    removed = []
    for i in range(n):
        order = sorted((D[i, j], j) for j in range(n) if j != i)[:k]
        votes = {}
        for _, j in order:
            votes[y[j]] = votes.get(y[j], 0) + 1
        own = votes.pop(y[i], 0)
        if (own == 0 or (votes and own <= max(votes.values()))) and y[i] not in protect:
            removed.append(i)
    return removed


def one_nn_consistent(X, y, store):
    """Does 1-NN over ``store`` (ties to the lower row) label every row correctly?"""
    D = sqdist_matrix(X)
    store = sorted(int(s) for s in store)
    for i in range(len(D)):
        best = min(store, key=lambda s: (D[i, s], s))
        if y[best] != y[i]:
            return False
    return True


def near_miss_oracle(X, y, minority, cap, k=3):
    X = dense(X)
    min_rows = [i for i in range(len(y)) if y[i] == minority]
    keep = set(min_rows)
    for c in sorted(set(y.tolist())):
        rows = [i for i in range(len(y)) if y[i] == c]
        if c == minority or len(rows) <= cap:
            keep.update(rows)
            continue
        scored = []
        for i in rows:
            d = sorted(float(np.sqrt(((X[i] - X[j]) ** 2).sum())) for j in min_rows)[:k]
            scored.append((float(np.mean(d)), i))
        keep.update(i for _, i in sorted(scored)[:cap])
    return sorted(keep)


def majority_neighbour_counts(X, n_min, k):
    """k' for each minority row of a stacked [minority; majority] matrix."""
    n = dense(X).shape[0]
    kk = min(k, n - 1)
    return np.array([sum(j >= n_min for j in knn_oracle(X, i, kk)) for i in range(n_min)]), kk


def decompose(s, x, r):
    """Best delta and residual for s = x + (r - x) * delta."""
    s, x, r = (np.asarray(v, dtype=float).ravel() for v in (s, x, r))
    d = r - x
    nn = float(d @ d)
    delta = float((s - x) @ d / nn) if nn > 0 else 0.0
    return delta, float(np.linalg.norm(s - x - delta * d))


def geometry_violations(res, n_min, k, variant, delta_ranges):
    """Problems with the synthetic rows of a binary SMOTE-family result.

    Each row must equal x + (ref - x) * delta for its recorded parents, with
    delta inside its mode's range, ref a legal partner of x, and x a legal
    generator for the variant.  Returns (number of rows checked, problems).
    """
    X = dense(res.dataset.X)
    parents, deltas, modes = res.info["parents"], res.info["delta"], res.info["mode"]
    n_orig = len(X) - len(parents)
    stacked = X[:n_orig]
    kprime, kk = majority_neighbour_counts(stacked, n_min, k)
    minority_nn = {}
    problems = []
    for row, (b, r), dlt, mode in zip(X[n_orig:], parents, deltas, modes):
        b, r = int(b), int(r)
        lo, hi = delta_ranges[mode]
        if b >= n_min:
            problems.append(f"base {b} is not a minority row")
        if not lo <= dlt <= hi:
            problems.append(f"delta {dlt} outside [{lo}, {hi}] for {mode}")
        if mode == "toward_majority":
            if variant != "b2" or r != knn_oracle(stacked, b, 1, range(n_min, n_orig))[0]:
                problems.append(f"ref {r} is not the nearest majority row of {b}")
        else:
            if b not in minority_nn:
                minority_nn[b] = knn_oracle(stacked, b, min(k, n_min - 1), range(n_min))
            if r not in minority_nn[b]:
                problems.append(f"ref {r} is not a minority neighbour of {b}")
        if variant in ("b1", "b2") and not (2 * kprime[b] >= kk and kprime[b] < kk):
            problems.append(f"row {b} with k'={kprime[b]} of K={kk} generated")
        if variant == "svm" and mode != ("extrapolate" if 2 * kprime[b] < kk else "interpolate"):
            problems.append(f"row {b} used mode {mode}")
        fit_delta, resid = decompose(row, stacked[b], stacked[r])
        if resid >= 1e-9:
            problems.append(f"residual {resid}")
        if np.any(stacked[r] != stacked[b]) and abs(fit_delta - dlt) > 1e-9:
            problems.append(f"recovered delta {fit_delta} != recorded {dlt}")
    return len(parents), problems
