"""Hot numeric kernels.

Every kernel has two implementations: a numba one operating on raw CSR
buffers and a vectorised numpy one operating on dense blocks.  The public
wrappers pick one according to :data:`imbtext._accel.HAS_NUMBA`; pass
``backend="numpy"`` or ``backend="numba"`` to force a path (benchmarks and
cross-checks do this).

Squared distances are accumulated feature by feature in ascending feature
order on the numba path, which makes them bitwise identical to a dense
sequential sum and exactly symmetric.  On integer count data both paths are
exact.
"""

import numpy as np
from scipy import sparse

from . import _accel
from ._accel import njit

# dense elements handled per numpy block (rows * cols * features)
_BLOCK_ELEMS = 1 << 22


def as_csr(X):
    """Canonical float64 CSR with sorted indices."""
    if sparse.issparse(X):
        X = sparse.csr_matrix(X, dtype=np.float64)
    else:
        X = sparse.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if not X.has_sorted_indices:
        X = X.sorted_indices()
    return X


def _resolve(backend):
    if backend is None:
        return _accel.backend()
    if backend == "numba" and not _accel.HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is disabled or missing")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


# ---------------------------------------------------------------------------
# squared Euclidean distances
# ---------------------------------------------------------------------------


@njit(cache=True)
def _row_sqdist(ip_a, ix_a, dv_a, a, ip_b, ix_b, dv_b, b):
    pa, ea = ip_a[a], ip_a[a + 1]
    pb, eb = ip_b[b], ip_b[b + 1]
    s = 0.0
    while pa < ea and pb < eb:
        ka = ix_a[pa]
        kb = ix_b[pb]
        if ka == kb:
            t = dv_a[pa] - dv_b[pb]
            pa += 1
            pb += 1
        elif ka < kb:
            t = dv_a[pa]
            pa += 1
        else:
            t = -dv_b[pb]
            pb += 1
        s += t * t
    while pa < ea:
        t = dv_a[pa]
        s += t * t
        pa += 1
    while pb < eb:
        t = dv_b[pb]
        s += t * t
        pb += 1
    return s


@njit(cache=True)
def _sqdist_csr(ip_a, ix_a, dv_a, ip_b, ix_b, dv_b):
    na = ip_a.shape[0] - 1
    nb = ip_b.shape[0] - 1
    out = np.empty((na, nb))
    for i in range(na):
        for j in range(nb):
            out[i, j] = _row_sqdist(ip_a, ix_a, dv_a, i, ip_b, ix_b, dv_b, j)
    return out


def _sqdist_dense(A, B):
    out = np.empty((A.shape[0], B.shape[0]))
    if A.shape[0] == 0 or B.shape[0] == 0:
        return out
    step = max(1, _BLOCK_ELEMS // max(1, B.shape[0] * max(1, A.shape[1])))
    for s in range(0, A.shape[0], step):
        diff = A[s:s + step, None, :] - B[None, :, :]
        np.square(diff, out=diff)
        out[s:s + step] = diff.sum(axis=2)
    return out


def pairwise_sqdist(A, B, backend=None):
    """Squared Euclidean distance matrix between the rows of ``A`` and ``B``."""
    A = as_csr(A)
    B = as_csr(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if _resolve(backend) == "numba":
        return _sqdist_csr(A.indptr, A.indices, A.data, B.indptr, B.indices, B.data)
    return _sqdist_dense(A.toarray(), B.toarray())


# ---------------------------------------------------------------------------
# k nearest neighbours
# ---------------------------------------------------------------------------


@njit(cache=True)
def _knn_csr(ip_q, ix_q, dv_q, qid, ip_r, ix_r, dv_r, rid, k):
    nq = qid.shape[0]
    nr = rid.shape[0]
    out = np.full((nq, k), -1, dtype=np.int64)
    best_d = np.empty(k)
    best_j = np.empty(k, dtype=np.int64)
    for i in range(nq):
        filled = 0
        for j in range(nr):
            if rid[j] == qid[i]:
                continue
            d = _row_sqdist(ip_q, ix_q, dv_q, i, ip_r, ix_r, dv_r, j)
            if filled == k and d >= best_d[k - 1]:
                continue
            # insertion keeps equal distances in scan order
            pos = filled if filled < k else k - 1
            while pos > 0 and best_d[pos - 1] > d:
                best_d[pos] = best_d[pos - 1]
                best_j[pos] = best_j[pos - 1]
                pos -= 1
            best_d[pos] = d
            best_j[pos] = j
            if filled < k:
                filled += 1
        for t in range(filled):
            out[i, t] = best_j[t]
    return out


def _knn_dense(Q, qid, R, rid, k):
    out = np.full((Q.shape[0], k), -1, dtype=np.int64)
    if Q.shape[0] == 0 or R.shape[0] == 0:
        return out
    step = max(1, _BLOCK_ELEMS // max(1, R.shape[0] * max(1, Q.shape[1])))
    for s in range(0, Q.shape[0], step):
        D = _sqdist_dense(Q[s:s + step], R)
        D[qid[s:s + step, None] == rid[None, :]] = np.inf
        order = np.argsort(D, axis=1, kind="stable")[:, :k]
        dk = np.take_along_axis(D, order, axis=1)
        order[~np.isfinite(dk)] = -1
        out[s:s + step, :order.shape[1]] = order
    return out


def knn_search(Q, qid, R, rid, k, backend=None):
    """For every row of ``Q`` the ``k`` nearest rows of ``R``.

    ``qid`` and ``rid`` are global row ids; a reference row whose id equals
    the query's id is skipped.  ``rid`` must be ascending so that equal
    distances resolve to the lower id.  Returns positions into ``R``, padded
    with -1 when fewer than ``k`` candidates exist.
    """
    Q = as_csr(Q)
    R = as_csr(R)
    qid = np.ascontiguousarray(qid, dtype=np.int64)
    rid = np.ascontiguousarray(rid, dtype=np.int64)
    if rid.size > 1 and np.any(np.diff(rid) <= 0):
        raise ValueError("reference ids must be strictly increasing")
    if k < 1:
        raise ValueError("k must be >= 1")
    if _resolve(backend) == "numba":
        return _knn_csr(Q.indptr, Q.indices, Q.data, qid,
                        R.indptr, R.indices, R.data, rid, int(k))
    return _knn_dense(Q.toarray(), qid, R.toarray(), rid, int(k))


# ---------------------------------------------------------------------------
# Pegasos passes
# ---------------------------------------------------------------------------


@njit(cache=True)
def _pegasos_epoch_csr(ip, ix, dv, Y, lam, order, W, t0):
    n, m = Y.shape
    d = W.shape[1] - 1
    radius = 1.0 / np.sqrt(lam)
    U = np.zeros_like(W)
    t = t0
    for s in range(order.shape[0]):
        i = order[s]
        t += 1
        eta = 1.0 / (lam * t)
        shrink = 1.0 - eta * lam
        for c in range(m):
            score = W[c, d]
            for p in range(ip[i], ip[i + 1]):
                score += W[c, ix[p]] * dv[p]
            y = Y[i, c]
            for f in range(d + 1):
                W[c, f] *= shrink
            if y * score < 1.0:
                step = eta * y
                for p in range(ip[i], ip[i + 1]):
                    W[c, ix[p]] += step * dv[p]
                W[c, d] += step
            norm = 0.0
            for f in range(d + 1):
                norm += W[c, f] * W[c, f]
            norm = np.sqrt(norm)
            if norm > radius:
                scale = radius / norm
                for f in range(d + 1):
                    W[c, f] *= scale
            for f in range(d + 1):
                U[c, f] += W[c, f]
    if order.shape[0] > 0:
        U /= order.shape[0]
    return U, t


def _pegasos_epoch_dense(X, Y, lam, order, W, t0):
    n, d = X.shape
    radius = 1.0 / np.sqrt(lam)
    U = np.zeros_like(W)
    t = t0
    for i in order:
        t += 1
        eta = 1.0 / (lam * t)
        x = np.append(X[i], 1.0)
        scores = W @ x
        W *= 1.0 - eta * lam
        viol = Y[i] * scores < 1.0
        if viol.any():
            W[viol] += (eta * Y[i, viol])[:, None] * x[None, :]
        norms = np.sqrt(np.einsum("ij,ij->i", W, W))
        over = norms > radius
        if over.any():
            W[over] *= (radius / norms[over])[:, None]
        U += W
    if len(order):
        U /= len(order)
    return U, t


def pegasos_epoch(X, Y, lam, order, W, t0=0, backend=None):
    """One Pegasos pass over the rows in ``order``, for every column of ``Y``.

    ``Y`` holds +1/-1 targets, one column per binary problem.  ``W`` is an
    ``(m, d + 1)`` weight array updated in place, its last column being the
    bias on a constant feature.  ``t0`` is the number of steps already taken.
    Returns the mean iterate over the pass and the new step count.
    """
    backend = _resolve(backend)
    if backend == "numba":
        X = as_csr(X)
    elif sparse.issparse(X):
        X = X.toarray()
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    order = np.ascontiguousarray(order, dtype=np.int64)
    if W.shape != (Y.shape[1], X.shape[1] + 1) or not W.flags.c_contiguous:
        raise ValueError("W must be a C-contiguous (m, d + 1) array")
    if backend == "numba":
        U, t = _pegasos_epoch_csr(X.indptr, X.indices, X.data, Y, float(lam), order, W, int(t0))
        return U, int(t)
    return _pegasos_epoch_dense(np.asarray(X, dtype=np.float64), Y, float(lam), order, W, int(t0))
