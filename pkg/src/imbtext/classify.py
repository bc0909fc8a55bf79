"""Linear SVMs trained by Pegasos-style stochastic subgradient descent.

The multiclass model is one-vs-rest: one hinge-loss problem per class, all
sharing the same seeded row order.  Step size is 1/(reg * t); the bias is
an extra weight on a constant feature and is regularised like the rest.

The returned weights are an average of the per-epoch mean iterates.  Each
epoch folds its mean into the average with weight 1/(e + 1); if that would
raise the training objective, the weight is shrunk by a line search on the
(convex) objective, down to zero.  The objective recorded in ``history`` is
therefore non-increasing.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from . import _accel
from .kernels import as_csr, pegasos_epoch

DEFAULT_REG = 1e-4
DEFAULT_EPOCHS = 50
DEFAULT_MARGIN_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: np.ndarray
    reg: float
    epochs: int
    seed: int
    history: tuple = field(default=())

    @property
    def n_classes(self):
        return self.weights.shape[0]

    @property
    def dim(self):
        return self.weights.shape[1]

    def decision_function(self, X):
        X = as_csr(X)
        if X.shape[1] != self.dim:
            raise ValueError(f"rows have {X.shape[1]} features, model expects {self.dim}")
        return np.asarray(X @ self.weights.T) + self.bias[None, :]


@dataclass(frozen=True)
class SupportSet:
    indices: np.ndarray


def hinge_objective(W, b, X, Y, reg):
    """Mean hinge loss plus (reg / 2) * squared norm, summed over columns of ``Y``."""
    scores = np.asarray(as_csr(X) @ W.T) + b[None, :]
    hinge = np.maximum(0.0, 1.0 - Y * scores).mean(axis=0)
    norms = (W * W).sum(axis=1) + b * b
    return float((hinge + 0.5 * reg * norms).sum())


def _line_search(phi, hi, f0, iters=40):
    """Best step in [0, hi] for a convex ``phi``; 0 unless it beats ``f0``."""
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    lo, a, b = 0.0, hi - golden * hi, golden * hi
    fa, fb = phi(a), phi(b)
    for _ in range(iters):
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - golden * (hi - lo)
            fa = phi(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + golden * (hi - lo)
            fb = phi(b)
    best, fbest = (a, fa) if fa <= fb else (b, fb)
    return (best, fbest) if fbest <= f0 else (0.0, f0)


def _train(X, Y, reg, epochs, seed):
    if reg <= 0:
        raise ValueError("reg must be positive")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    X = as_csr(X)
    Xk = X if _accel.HAS_NUMBA else X.toarray()
    n, m = Y.shape
    rng = np.random.default_rng(seed)

    def objective(M):
        return hinge_objective(M[:, :-1], M[:, -1], X, Y, reg)

    W = np.zeros((m, X.shape[1] + 1))
    t = 0
    avg = None
    history = []
    for e in range(epochs):
        U, t = pegasos_epoch(Xk, Y, reg, rng.permutation(n), W, t)
        if avg is None:
            avg, f_avg = U, objective(U)
        else:
            delta = U - avg
            step = 1.0 / (e + 1)
            f_new = objective(avg + step * delta)
            if f_new > f_avg:
                step, f_new = _line_search(lambda a: objective(avg + a * delta), step, f_avg)
            if step > 0.0:
                avg = avg + step * delta
                f_avg = f_new
        history.append(f_avg)
    return LinearModel(avg[:, :-1].copy(), avg[:, -1].copy(), float(reg), int(epochs), int(seed),
                       tuple(history))


def train_multiclass(ds, reg=DEFAULT_REG, epochs=DEFAULT_EPOCHS, seed=0):
    """One-vs-rest linear SVM over classes 1..m of ``ds``."""
    if len(ds) == 0:
        raise ValueError("cannot train on an empty dataset")
    if np.count_nonzero(ds.class_counts()) < 2:
        raise ValueError("need rows from at least two classes")
    classes = np.arange(1, ds.n_classes + 1)
    Y = np.where(ds.y[:, None] == classes[None, :], 1.0, -1.0)
    return _train(ds.X, Y, reg, epochs, seed)


def predict(model, X):
    """Argmax of the class scores; ties go to the lower class id."""
    scores = model.decision_function(X)
    if model.n_classes == 1:
        return np.where(scores[:, 0] >= 0, 1, 2)
    return np.argmax(scores, axis=1) + 1


def train_binary_with_support(minority, majority, reg=DEFAULT_REG, epochs=DEFAULT_EPOCHS, seed=0,
                              margin_tol=DEFAULT_MARGIN_TOL):
    """Binary hinge-loss model, minority = +1, plus its margin support set.

    Support indices refer to the stacked rows ``[minority; majority]`` and
    are those on or inside the margin, ``y * f(x) <= 1 + margin_tol``.
    This includes margin violators, so overlapping groups always yield
    support rows; on separable data it equals ``|f(x)| <= 1 + margin_tol``.
    """
    A = as_csr(minority)
    B = as_csr(majority)
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ValueError("both groups need at least one row")
    X = sparse.vstack([A, B], format="csr")
    Y = np.concatenate([np.ones(A.shape[0]), -np.ones(B.shape[0])])[:, None]
    model = _train(X, Y, reg, epochs, seed)
    f = model.decision_function(X)[:, 0]
    return model, SupportSet(np.flatnonzero(Y[:, 0] * f <= 1.0 + margin_tol))


def save_model(path, model):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# linear-svm V={model.dim} m={model.n_classes} reg={float(model.reg)!r} "
                 f"epochs={model.epochs} seed={model.seed}\n")
        for c in range(model.n_classes):
            fh.write(" ".join(repr(float(v)) for v in [model.bias[c], *model.weights[c]]) + "\n")


def load_model(path):
    from .formats import FormatError
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# linear-svm"):
        raise FormatError(path, 1, 1, "missing '# linear-svm' header")
    meta = {}
    for part in lines[0].split()[2:]:
        key, _, val = part.partition("=")
        meta[key] = val
    try:
        V, m = int(meta["V"]), int(meta["m"])
    except (KeyError, ValueError):
        raise FormatError(path, 1, 1, "header needs integer V= and m=") from None
    rows = []
    for no, line in enumerate(lines[1:], 2):
        vals = line.split()
        if len(vals) != V + 1:
            raise FormatError(path, no, 1, f"expected {V + 1} numbers, got {len(vals)}")
        try:
            rows.append([float(v) for v in vals])
        except ValueError:
            raise FormatError(path, no, 1, "non-numeric weight") from None
    if len(rows) != m:
        raise FormatError(path, len(lines), 1, f"expected {m} weight lines, got {len(rows)}")
    arr = np.array(rows, dtype=np.float64).reshape(m, V + 1)
    return LinearModel(arr[:, 1:].copy(), arr[:, 0].copy(), float(meta.get("reg", DEFAULT_REG)),
                       int(meta.get("epochs", 0)), int(meta.get("seed", 0)))
