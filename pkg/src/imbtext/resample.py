"""Resampling algorithms for imbalanced datasets.

Two calling conventions are used:

* multiclass-capable undersamplers and cleaners take a :class:`Dataset`
  and treat the smallest class (lowest id on ties) as the minority;
* oversamplers take a binary problem as two row blocks, ``minority`` and
  ``majority``.  Their result dataset stacks ``[minority; majority;
  generated]`` with labels 1 (minority) and 2 (majority).

``ratio`` always means minority count over majority count after sampling.
Every sampler is a pure function of its inputs and ``seed``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .classify import DEFAULT_EPOCHS, DEFAULT_MARGIN_TOL, DEFAULT_REG, train_binary_with_support
from .kernels import as_csr
from .neighbors import DistanceIndex, tomek_links
from .vectorize import Dataset, as_fraction, largest_remainder

UNDERSAMPLERS = ("random_under", "cnn", "enn", "renn", "oss", "ncr", "near_miss1")
OVERSAMPLERS = ("random_over", "smote_regular", "smote_b1", "smote_b2", "smote_svm", "adasyn")
HYBRIDS = ("smote_tomek", "smote_enn")
METHODS = UNDERSAMPLERS + OVERSAMPLERS + HYBRIDS
RATIO_METHODS = ("random_under", "random_over", "near_miss1") + OVERSAMPLERS[1:] + HYBRIDS
SMOTE_VARIANTS = ("regular", "b1", "b2", "svm")

# delta range per generation mode; Eq. x_new = x_i + (x_ref - x_i) * delta
DELTA_RANGES = {
    "interpolate": (0.0, 1.0),
    "toward_majority": (0.0, 0.5),
    "extrapolate": (-0.5, 0.0),
}

ORIGINAL, DUPLICATE, SYNTHETIC = "original", "duplicate", "synthetic"


class SamplerError(ValueError):
    """A sampler could not run on its input."""

    def __init__(self, message, focus_class=None):
        self.focus_class = focus_class
        prefix = f"class {focus_class}: " if focus_class is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class ResamplePlan:
    method: str
    ratio: float = None
    k_neighbors: int = None
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.ratio is not None:
            if self.method not in RATIO_METHODS:
                raise ValueError(f"{self.method} does not take a ratio")
            if not 0 < float(self.ratio) <= 1:
                raise ValueError("ratio must lie in (0, 1]")
        elif self.method in RATIO_METHODS:
            object.__setattr__(self, "ratio", 1.0)
        if self.k_neighbors is None:
            object.__setattr__(self, "k_neighbors", default_k(self.method))
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")


def default_k(method):
    return 3 if method in ("enn", "renn", "ncr", "near_miss1") else 5


@dataclass(frozen=True, eq=False)
class ResampleResult:
    dataset: Dataset
    provenance: np.ndarray
    source: np.ndarray
    removed: frozenset
    info: dict = field(default_factory=dict)

    def counts(self):
        return self.dataset.class_counts()


# -- helpers ------------------------------------------------------------------


def ceil_target(count, ratio):
    """ceil(ratio * count) in exact arithmetic."""
    return math.ceil(as_fraction(ratio) * int(count))


def ceil_cap(n_min, ratio):
    """ceil(n_min / ratio) in exact arithmetic."""
    return math.ceil(int(n_min) / as_fraction(ratio))


def _check_ratio(ratio):
    if ratio is None or not 0 < float(ratio) <= 1:
        raise ValueError("ratio must lie in (0, 1]")


def minority_class(ds):
    counts = ds.class_counts()
    present = np.flatnonzero(counts > 0)
    if present.size == 0:
        raise SamplerError("empty dataset")
    return int(present[np.argmin(counts[present])]) + 1


def _subset_result(ds, keep, info=None):
    keep = np.asarray(keep, dtype=bool)
    rows = np.flatnonzero(keep)
    return ResampleResult(
        ds.subset(rows),
        np.full(rows.size, ORIGINAL, dtype=object),
        rows.astype(np.int64),
        frozenset(np.flatnonzero(~keep).tolist()),
        info or {},
    )


def _identity(ds, info=None):
    return _subset_result(ds, np.ones(len(ds), dtype=bool), info)


def _round_rows(n_new, n_base, rng):
    """How many rows each base generates: whole rounds, remainder at random."""
    counts = np.full(n_base, n_new // n_base, dtype=np.int64)
    rem = n_new % n_base
    if rem:
        counts[rng.choice(n_base, size=rem, replace=False)] += 1
    return counts


def _interpolate(X, base, ref, delta):
    """Rows ``X[base] + (X[ref] - X[base]) * delta`` as CSR.

    Evaluated as ``(1 - delta) * base + delta * ref`` so delta 0 and 1 give
    the parents exactly.
    """
    if len(base) == 0:
        return sparse.csr_matrix((0, X.shape[1]))
    delta = np.asarray(delta, dtype=np.float64)
    out = (sparse.diags(1.0 - delta) @ X[base] + sparse.diags(delta) @ X[ref]).tocsr()
    out.eliminate_zeros()
    out.sort_indices()
    return out


def _stack_binary(minority, majority):
    A = as_csr(minority)
    B = as_csr(majority)
    if A.shape[0] and B.shape[0] and A.shape[1] != B.shape[1]:
        raise ValueError("minority and majority rows differ in dimension")
    dim = A.shape[1] if A.shape[0] else B.shape[1]
    A = A if A.shape[0] else sparse.csr_matrix((0, dim))
    B = B if B.shape[0] else sparse.csr_matrix((0, dim))
    X = sparse.vstack([A, B], format="csr")
    y = np.concatenate([np.ones(A.shape[0], dtype=np.int64), np.full(B.shape[0], 2, dtype=np.int64)])
    return X, y, A.shape[0], B.shape[0]


@dataclass
class Generated:
    """Rows produced for one binary problem, indexed against ``[minority; majority]``."""

    rows: sparse.csr_matrix
    base: np.ndarray
    ref: np.ndarray
    delta: np.ndarray
    mode: np.ndarray
    tag: str
    info: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, dim, tag=SYNTHETIC, **info):
        z = np.empty(0, dtype=np.int64)
        return cls(sparse.csr_matrix((0, dim)), z, z, np.empty(0), np.empty(0, dtype=object), tag, info)

    def __len__(self):
        return self.rows.shape[0]


def _binary_result(X, y, gen):
    n = X.shape[0]
    rows = sparse.vstack([X, gen.rows], format="csr")
    labels = np.concatenate([y, np.ones(len(gen), dtype=np.int64)])
    prov = np.array([ORIGINAL] * n + [gen.tag] * len(gen), dtype=object)
    source = np.concatenate([np.arange(n), gen.base if gen.tag == DUPLICATE else np.full(len(gen), -1)])
    info = dict(gen.info)
    info.update(parents=np.stack([gen.base, gen.ref], axis=1) if len(gen) else np.empty((0, 2), dtype=np.int64),
                delta=gen.delta, mode=gen.mode)
    return ResampleResult(Dataset(rows, labels, 2), prov, source.astype(np.int64), frozenset(), info)


def _snap(gen, round_synthetic):
    if round_synthetic and len(gen):
        R = gen.rows.copy()
        R.data = np.round(R.data)
        R.eliminate_zeros()
        gen.rows = R
        gen.info["rounded"] = True
    return gen


# -- random sampling ----------------------------------------------------------


def random_under(ds, ratio, seed=0):
    """Cap every class at ceil(n_min / ratio) rows by uniform subsampling."""
    _check_ratio(ratio)
    rng = np.random.default_rng(seed)
    counts = ds.class_counts()
    n_min = counts[counts > 0].min() if np.any(counts > 0) else 0
    cap = ceil_cap(n_min, ratio)
    keep = np.ones(len(ds), dtype=bool)
    for c in range(1, ds.n_classes + 1):
        rows = ds.rows_of(c)
        if rows.size > cap:
            chosen = rng.choice(rows, size=cap, replace=False)
            keep[rows] = False
            keep[chosen] = True
    return _subset_result(ds, keep, {"cap": cap})


def generate_random_over(X, n_min, n_new, rng):
    picks = rng.integers(0, n_min, size=n_new)
    picks.sort()
    return Generated(X[picks], picks, picks, np.zeros(n_new), np.full(n_new, "copy", dtype=object), DUPLICATE)


def random_over(minority, majority, ratio, seed=0):
    """Duplicate random minority rows until it holds ceil(ratio * |majority|)."""
    _check_ratio(ratio)
    X, y, n_min, n_maj = _stack_binary(minority, majority)
    if n_min == 0:
        raise SamplerError("random oversampling needs at least one minority row")
    n_new = ceil_target(n_maj, ratio) - n_min
    if n_new <= 0:
        return _binary_result(X, y, Generated.empty(X.shape[1], DUPLICATE))
    return _binary_result(X, y, generate_random_over(X, n_min, n_new, np.random.default_rng(seed)))


# -- nearest-neighbour cleaning -----------------------------------------------


def enn_misclassified(X, y, k, index=None):
    """Rows whose leave-one-out k-NN vote does not strictly favour their label.

    Also returns the neighbour table so callers can reuse it.
    """
    index = index or DistanceIndex(X)
    n = len(index)
    if n < 2:
        return np.zeros(n, dtype=bool), np.full((n, k), -1, dtype=np.int64)
    nbrs = index.kneighbors(np.arange(n), k)
    bad = np.zeros(n, dtype=bool)
    for i in range(n):
        votes = y[nbrs[i][nbrs[i] >= 0]]
        if votes.size == 0:
            continue
        labels, counts = np.unique(votes, return_counts=True)
        own = counts[labels == y[i]]
        own = int(own[0]) if own.size else 0
        others = counts[labels != y[i]]
        bad[i] = own == 0 or (others.size > 0 and own <= others.max())
    return bad, nbrs


def edited_nn(ds, k=3, protect=()):
    """Wilson editing: drop rows misclassified by their k nearest neighbours.

    Rows of classes in ``protect`` are never removed.  A tied vote counts
    as a misclassification.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    bad, _ = enn_misclassified(ds.X, ds.y, k)
    removable = bad & ~np.isin(ds.y, list(protect))
    return _subset_result(ds, ~removable, {"misclassified": np.flatnonzero(bad)})


def repeated_edited_nn(ds, k=3, protect=()):
    """Repeat :func:`edited_nn` until a pass removes nothing.

    A pass that would empty a class is not applied; iteration stops there
    and ``info["stopped_on_empty"]`` is set.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    alive = np.arange(len(ds))
    passes = 0
    stopped = False
    while True:
        sub = ds.subset(alive)
        bad, _ = enn_misclassified(sub.X, sub.y, k)
        removable = bad & ~np.isin(sub.y, list(protect))
        if not removable.any():
            break
        before = np.unique(sub.y)
        after = np.unique(sub.y[~removable])
        if after.size < before.size:
            stopped = True
            break
        alive = alive[~removable]
        passes += 1
    keep = np.zeros(len(ds), dtype=bool)
    keep[alive] = True
    return _subset_result(ds, keep, {"passes": passes, "stopped_on_empty": stopped})


def _condense(ds, seed, seed_minority=True):
    """Hart's consistent store grown from a seed set.

    The seed set is every minority row plus one random row of each other
    class, or with ``seed_minority=False`` one random row of every class.
    """
    rng = np.random.default_rng(seed)
    n = len(ds)
    minority = minority_class(ds)
    index = DistanceIndex(ds.X)
    in_store = (ds.y == minority) if seed_minority else np.zeros(n, dtype=bool)
    for c in range(1, ds.n_classes + 1):
        rows = ds.rows_of(c)
        if (c != minority or not seed_minority) and rows.size:
            in_store[rng.choice(rows)] = True

    best_d = np.full(n, np.inf)
    best_i = np.full(n, n, dtype=np.int64)

    def absorb(rows):
        D = index.distance_matrix(rows)
        for r, d in zip(rows.tolist(), D):
            better = (d < best_d) | ((d == best_d) & (r < best_i))
            best_d[better] = d[better]
            best_i[better] = r

    absorb(np.flatnonzero(in_store))
    order = rng.permutation(np.flatnonzero(~in_store))
    passes = 0
    while True:
        passes += 1
        added = 0
        for i in order.tolist():
            if in_store[i]:
                continue
            if ds.y[best_i[i]] != ds.y[i]:
                in_store[i] = True
                absorb(np.array([i]))
                added += 1
        if added == 0:
            break
    return in_store, minority, passes


def condensed_nn(ds, seed=0):
    """Condensed nearest neighbour undersampling (Hart).

    The store starts with one random row per class; rows are scanned in a
    seeded order and any row the store's 1-NN rule misclassifies joins it.
    Scans repeat until one adds nothing.  The output is the store plus every
    minority row, so only the other classes shrink.  ``info["store"]`` holds
    the consistent store itself.
    """
    store, minority, passes = _condense(ds, seed, seed_minority=False)
    return _subset_result(ds, store | (ds.y == minority),
                          {"minority": minority, "passes": passes, "store": np.flatnonzero(store)})


def one_sided_selection(ds, seed=0):
    """Condensed store, then drop its non-minority rows that sit in Tomek links."""
    if np.count_nonzero(ds.class_counts()) < 2:
        raise SamplerError("one-sided selection needs at least two classes")
    store, minority, _ = _condense(ds, seed)
    rows = np.flatnonzero(store)
    links = tomek_links(DistanceIndex(ds.X[rows]), ds.y[rows])
    keep = store.copy()
    for a, b in links:
        for r in (rows[a], rows[b]):
            if ds.y[r] != minority:
                keep[r] = False
    return _subset_result(ds, keep, {"minority": minority, "store": rows,
                                     "links": [(int(rows[a]), int(rows[b])) for a, b in links]})


def neighborhood_cleaning(ds, k=3):
    """Wilson editing of the non-minority classes, plus removal of the
    non-minority neighbours of every misclassified minority row."""
    if k < 1:
        raise ValueError("k must be >= 1")
    minority = minority_class(ds)
    bad, nbrs = enn_misclassified(ds.X, ds.y, k)
    is_min = ds.y == minority
    remove = bad & ~is_min
    for i in np.flatnonzero(bad & is_min):
        nb = nbrs[i][nbrs[i] >= 0]
        remove[nb[ds.y[nb] != minority]] = True
    return _subset_result(ds, ~remove, {"minority": minority, "misclassified": np.flatnonzero(bad)})


def near_miss1(ds, ratio, k=3):
    """NearMiss-1: keep the rows closest on average to their k nearest minority rows.

    Every class larger than ceil(n_min / ratio) keeps that many rows, ranked
    by mean Euclidean distance to their ``k`` nearest minority rows; equal
    means keep the lower row index.
    """
    _check_ratio(ratio)
    minority = minority_class(ds)
    min_rows = ds.rows_of(minority)
    cap = ceil_cap(min_rows.size, ratio)
    index = DistanceIndex(ds.X)
    keep = np.ones(len(ds), dtype=bool)
    kk = min(k, min_rows.size)
    for c in range(1, ds.n_classes + 1):
        rows = ds.rows_of(c)
        if c == minority or rows.size <= cap:
            continue
        nb = index.kneighbors(rows, kk, restrict_to=min_rows)
        D = index.distance_matrix(rows, min_rows)
        pos = np.searchsorted(min_rows, nb)
        mean = np.sqrt(np.take_along_axis(D, pos, axis=1)).mean(axis=1)
        ranked = rows[np.lexsort((rows, mean))]
        keep[rows] = False
        keep[ranked[:cap]] = True
    return _subset_result(ds, keep, {"cap": cap, "minority": minority})


# -- synthetic oversampling ---------------------------------------------------


def _draw_delta(rng, size, mode, fixed_delta):
    if fixed_delta is not None:
        return np.full(size, float(fixed_delta))
    lo, hi = DELTA_RANGES[mode]
    return lo + (hi - lo) * rng.random(size)


def _neighbours(X, n_min, k):
    """Minority rows' k-NN among all rows, and their majority counts."""
    index = DistanceIndex(X)
    kk = min(k, X.shape[0] - 1)
    nb = index.kneighbors(np.arange(n_min), kk)
    n_major = (nb >= n_min).sum(axis=1)
    return index, nb, kk, n_major


def _minority_neighbours(index, bases, n_min, k):
    return index.kneighbors(bases, min(k, n_min - 1), restrict_to=np.arange(n_min))


def _generate_from(index, X, bases, counts, n_min, k, rng, mode, fixed_delta):
    """``counts[j]`` rows from ``bases[j]`` toward a random minority neighbour."""
    keep = counts > 0
    bases, counts = bases[keep], counts[keep]
    nb = _minority_neighbours(index, bases, n_min, k)
    base = np.repeat(bases, counts)
    row_nb = np.repeat(nb, counts, axis=0)
    pick = rng.integers(0, nb.shape[1], size=base.size)
    ref = row_nb[np.arange(base.size), pick]
    delta = _draw_delta(rng, base.size, mode, fixed_delta)
    return base, ref, delta


def _assemble(X, parts, info):
    base = np.concatenate([p[0] for p in parts]).astype(np.int64) if parts else np.empty(0, dtype=np.int64)
    ref = np.concatenate([p[1] for p in parts]).astype(np.int64) if parts else np.empty(0, dtype=np.int64)
    delta = np.concatenate([p[2] for p in parts]) if parts else np.empty(0)
    mode = np.concatenate([np.full(len(p[0]), p[3], dtype=object) for p in parts]) if parts else np.empty(0, dtype=object)
    return Generated(_interpolate(X, base, ref, delta), base, ref, delta, mode, SYNTHETIC, info)


def _smote_regular(X, n_min, n_new, k, rng, fixed_delta, info=None):
    if n_min < 2:
        raise SamplerError("SMOTE needs at least two minority rows")
    index = DistanceIndex(X)
    bases = np.arange(n_min)
    counts = _round_rows(n_new, n_min, rng)
    b, r, d = _generate_from(index, X, bases, counts, n_min, k, rng, "interpolate", fixed_delta)
    return _assemble(X, [(b, r, d, "interpolate")], info or {})


def _smote_borderline(X, n_min, n_new, k, rng, variant, fixed_delta):
    index, nb, kk, n_major = _neighbours(X, n_min, k)
    danger = np.flatnonzero((2 * n_major >= kk) & (n_major < kk))
    info = {"danger": danger, "noise": np.flatnonzero(n_major == kk)}
    if danger.size == 0:
        info["warning"] = "empty danger set; input returned unchanged"
        return Generated.empty(X.shape[1], **info)
    parts = []
    budget = n_new
    if variant == "b2":
        maj = np.arange(n_min, X.shape[0])
        near_maj = index.kneighbors(danger, 1, restrict_to=maj)[:, 0]
        n_extra = min(budget, danger.size)
        chosen = np.sort(rng.choice(danger.size, size=n_extra, replace=False)) if n_extra < danger.size \
            else np.arange(danger.size)
        delta = _draw_delta(rng, chosen.size, "toward_majority", fixed_delta)
        parts.append((danger[chosen], near_maj[chosen], delta, "toward_majority"))
        budget -= n_extra
    if budget > 0:
        if n_min < 2:
            info["warning"] = "single minority row; no minority neighbour to interpolate toward"
        else:
            counts = _round_rows(budget, danger.size, rng)
            b, r, d = _generate_from(index, X, danger, counts, n_min, k, rng, "interpolate", fixed_delta)
            parts.append((b, r, d, "interpolate"))
    return _assemble(X, parts, info)


def _smote_svm(X, n_min, n_new, k, rng, fixed_delta, svm):
    if n_min < 2:
        raise SamplerError("SMOTE needs at least two minority rows")
    seed = int(rng.integers(0, 2**31 - 1))
    _, support = train_binary_with_support(X[:n_min], X[n_min:], svm.get("reg", DEFAULT_REG),
                                           svm.get("epochs", DEFAULT_EPOCHS), seed,
                                           svm.get("margin_tol", DEFAULT_MARGIN_TOL))
    sv = support.indices[support.indices < n_min]
    index, nb, kk, n_major = _neighbours(X, n_min, k)
    if sv.size == 0:
        gen = _smote_regular(X, n_min, n_new, k, rng, fixed_delta)
        gen.info["fallback"] = "regular: no minority support vectors"
        return gen
    counts = _round_rows(n_new, sv.size, rng)
    safe = 2 * n_major[sv] < kk
    parts = []
    for mask, mode in ((safe, "extrapolate"), (~safe, "interpolate")):
        if np.any(mask & (counts > 0)):
            b, r, d = _generate_from(index, X, sv[mask], counts[mask], n_min, k, rng, mode, fixed_delta)
            parts.append((b, r, d, mode))
    return _assemble(X, parts, {"support": sv})


def generate_smote(X, n_min, n_new, k, variant, rng, fixed_delta=None, svm=None):
    """Synthetic minority rows for the stacked binary matrix ``X``."""
    if variant not in SMOTE_VARIANTS:
        raise ValueError(f"variant must be one of {SMOTE_VARIANTS}")
    if n_new <= 0:
        return Generated.empty(X.shape[1])
    if variant == "regular":
        return _smote_regular(X, n_min, n_new, k, rng, fixed_delta)
    if variant in ("b1", "b2"):
        return _smote_borderline(X, n_min, n_new, k, rng, variant, fixed_delta)
    return _smote_svm(X, n_min, n_new, k, rng, fixed_delta, svm or {})


def smote(minority, majority, ratio, k=5, variant="regular", seed=0, fixed_delta=None,
          round_synthetic=False, svm=None):
    """SMOTE family oversampling up to ceil(ratio * |majority|) minority rows.

    regular  interpolate each minority row toward one of its k nearest
             minority rows, delta in [0, 1]
    b1       only rows with K/2 <= (majority neighbours) < K generate
    b2       as b1, and each generating row also yields one row toward its
             nearest majority row, delta in [0, 0.5], within the same budget
    svm      minority support vectors of a linear SVM generate; those with
             fewer than K/2 majority neighbours extrapolate away from a
             minority neighbour (delta in [-0.5, 0]), the rest interpolate

    ``fixed_delta`` pins delta for inspection; ``round_synthetic`` snaps
    generated counts to integers.
    """
    _check_ratio(ratio)
    X, y, n_min, n_maj = _stack_binary(minority, majority)
    if n_min == 0:
        raise SamplerError("SMOTE needs minority rows")
    n_new = ceil_target(n_maj, ratio) - n_min
    gen = generate_smote(X, n_min, n_new, k, variant, np.random.default_rng(seed), fixed_delta, svm)
    return _binary_result(X, y, _snap(gen, round_synthetic))


def adasyn_weights(n_major):
    """Normalised difficulty weights, exact: k'_i / sum_j k'_j."""
    from fractions import Fraction
    total = int(np.sum(n_major))
    if total == 0:
        return None
    return [Fraction(int(v), total) for v in n_major]


def generate_adasyn(X, n_min, n_new, k, rng, fixed_delta=None):
    if n_new <= 0:
        return Generated.empty(X.shape[1])
    if n_min < 2:
        raise SamplerError("ADASYN needs at least two minority rows")
    index, nb, kk, n_major = _neighbours(X, n_min, k)
    weights = adasyn_weights(n_major)
    if weights is None:
        gen = _smote_regular(X, n_min, n_new, k, rng, fixed_delta)
        gen.info["fallback"] = "regular: no minority row has majority neighbours"
        return gen
    counts = np.array(largest_remainder([w * n_new for w in weights], n_new, rng), dtype=np.int64)
    b, r, d = _generate_from(index, X, np.arange(n_min), counts, n_min, k, rng, "interpolate", fixed_delta)
    return _assemble(X, [(b, r, d, "interpolate")],
                     {"weights": np.array([float(w) for w in weights]), "per_base": counts})


def adasyn(minority, majority, ratio, k=5, seed=0, fixed_delta=None, round_synthetic=False):
    """Adaptive synthetic sampling.

    Minority row i generates a share k'_i / sum(k') of the G new rows, where
    k'_i counts majority rows among its k nearest neighbours; shares are
    rounded by largest remainder (random among equal remainders) so they
    sum to G exactly.
    """
    _check_ratio(ratio)
    X, y, n_min, n_maj = _stack_binary(minority, majority)
    if n_min == 0:
        raise SamplerError("ADASYN needs minority rows")
    n_new = ceil_target(n_maj, ratio) - n_min
    gen = generate_adasyn(X, n_min, n_new, k, np.random.default_rng(seed), fixed_delta)
    return _binary_result(X, y, _snap(gen, round_synthetic))


# -- hybrid cleaning ----------------------------------------------------------


def tomek_clean(X, y):
    """Remove both members of every Tomek link until none remain; returns a keep mask."""
    keep = np.ones(X.shape[0], dtype=bool)
    rounds = 0
    while True:
        rows = np.flatnonzero(keep)
        links = tomek_links(DistanceIndex(X[rows]), y[rows])
        if not links:
            return keep, rounds
        for a, b in links:
            keep[rows[a]] = keep[rows[b]] = False
        rounds += 1


def enn_clean(X, y, k=3):
    bad, _ = enn_misclassified(X, y, k)
    return ~bad


def clean_result(res, stage, k=3):
    """Apply a hybrid cleaning stage to an oversampled result."""
    ds = res.dataset
    if stage == "tomek":
        keep, rounds = tomek_clean(ds.X, ds.y)
        extra = {"tomek_rounds": rounds}
    elif stage == "enn":
        keep = enn_clean(ds.X, ds.y, k)
        extra = {}
    else:
        raise ValueError(f"unknown cleaning stage {stage!r}")
    is_orig = res.provenance == ORIGINAL
    removed_orig = set(res.source[~keep & is_orig].tolist())
    info = dict(res.info)
    info.update(extra, cleaned=stage, synthetic_removed=int(np.count_nonzero(~keep & ~is_orig)),
                kept_rows=np.flatnonzero(keep))
    rows = np.flatnonzero(keep)
    return ResampleResult(ds.subset(rows), res.provenance[rows], res.source[rows],
                          frozenset(res.removed | removed_orig), info)


def smote_tomek(minority, majority, ratio, k=5, seed=0, round_synthetic=False):
    """Regular SMOTE, then Tomek-link removal (both members) until no link is left."""
    return clean_result(smote(minority, majority, ratio, k, "regular", seed,
                              round_synthetic=round_synthetic), "tomek")


def smote_enn(minority, majority, ratio, k=5, seed=0, round_synthetic=False):
    """Regular SMOTE, then one unprotected 3-NN Wilson editing pass."""
    return clean_result(smote(minority, majority, ratio, k, "regular", seed,
                              round_synthetic=round_synthetic), "enn", 3)


# -- dispatch -----------------------------------------------------------------


def undersample(ds, plan):
    """Run a multiclass-capable undersampler described by ``plan``."""
    m, k = plan.method, plan.k_neighbors
    if m == "random_under":
        return random_under(ds, plan.ratio, plan.seed)
    if m == "near_miss1":
        return near_miss1(ds, plan.ratio, k)
    if m == "cnn":
        return condensed_nn(ds, plan.seed)
    if m == "oss":
        return one_sided_selection(ds, plan.seed)
    if m == "ncr":
        return neighborhood_cleaning(ds, k)
    protect = (minority_class(ds),)
    if m == "enn":
        return edited_nn(ds, k, protect)
    if m == "renn":
        return repeated_edited_nn(ds, k, protect)
    raise ValueError(f"{m} is not an undersampler")


def generate_binary(X, n_min, n_new, plan, rng, fixed_delta=None, svm=None):
    """Generated rows for an oversampling plan on a stacked binary matrix."""
    m = plan.method
    if n_new <= 0:
        return Generated.empty(X.shape[1], DUPLICATE if m == "random_over" else SYNTHETIC)
    if m == "random_over":
        if n_min == 0:
            raise SamplerError("random oversampling needs at least one minority row")
        return generate_random_over(X, n_min, n_new, rng)
    if m == "adasyn":
        return generate_adasyn(X, n_min, n_new, plan.k_neighbors, rng, fixed_delta)
    variant = {"smote_regular": "regular", "smote_b1": "b1", "smote_b2": "b2",
               "smote_svm": "svm", "smote_tomek": "regular", "smote_enn": "regular"}[m]
    return generate_smote(X, n_min, n_new, plan.k_neighbors, variant, rng, fixed_delta, svm)
