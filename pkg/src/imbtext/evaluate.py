"""Confusion matrices, per-class precision/recall, macro F1 and fold pooling."""

from dataclasses import dataclass, field

import numpy as np

DECIMALS = 6


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", c.astype(np.int64))

    @property
    def m(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())

    def __add__(self, other):
        if other.m != self.m:
            raise ValueError("matrices differ in size")
        return ConfusionMatrix(self.counts + other.counts)


@dataclass(frozen=True, eq=False)
class MetricsReport:
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    f_score: float
    pooled: ConfusionMatrix = None
    folds: tuple = field(default=())
    mean_fold_f_score: float = None

    def csv_row(self, name):
        return format_row(name, self)


def confusion(true_labels, predicted_labels, m):
    t = np.asarray(true_labels, dtype=np.int64).reshape(-1)
    p = np.asarray(predicted_labels, dtype=np.int64).reshape(-1)
    if t.shape != p.shape:
        raise ValueError(f"{t.size} true labels but {p.size} predictions")
    for name, arr in (("true", t), ("predicted", p)):
        if arr.size and (arr.min() < 1 or arr.max() > m):
            raise ValueError(f"{name} labels must lie in 1..{m}")
    grid = np.zeros((m, m), dtype=np.int64)
    np.add.at(grid, (t - 1, p - 1), 1)
    return ConfusionMatrix(grid)


def _ratio(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def metrics(cm):
    """Accuracy, per-class precision/recall/F1 and their unweighted mean F1.

    Any zero denominator yields 0.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    c = cm.counts
    tp = np.diag(c).astype(np.float64)
    precision = _ratio(tp, c.sum(axis=0))
    recall = _ratio(tp, c.sum(axis=1))
    f1 = _ratio(2 * precision * recall, precision + recall)
    return MetricsReport(float(tp.sum() / cm.total), precision, recall, f1, float(f1.mean()), cm)


def aggregate_folds(fold_matrices):
    """Metrics of the summed matrix; the mean per-fold F is kept for comparison."""
    folds = list(fold_matrices)
    if not folds:
        raise ValueError("no folds to aggregate")
    pooled = folds[0]
    for f in folds[1:]:
        pooled = pooled + f
    rep = metrics(pooled)
    per_fold = [metrics(f).f_score for f in folds if f.total]
    return MetricsReport(rep.accuracy, rep.precision, rep.recall, rep.f1, rep.f_score, pooled,
                         tuple(folds), float(np.mean(per_fold)) if per_fold else None)


def header(m):
    cols = ["name", "accuracy", "f-score"]
    for c in range(1, m + 1):
        cols += [f"prec_{c}", f"rec_{c}"]
    return ",".join(cols)


def _num(v):
    return f"{v:.{DECIMALS}f}"


def format_row(name, report):
    cells = [name, _num(report.accuracy), _num(report.f_score)]
    for p, r in zip(report.precision, report.recall):
        cells += [_num(p), _num(r)]
    return ",".join(cells)


def failed_row(name, reason, m):
    reason = " ".join(str(reason).split()).replace(",", ";")
    return ",".join([name, "FAILED", reason] + [""] * (2 * m))


def parse_row(line):
    """Inverse of :func:`format_row`: (name, accuracy, f_score, precision, recall)."""
    parts = line.rstrip("\n").split(",")
    vals = [float(v) for v in parts[1:]]
    return parts[0], vals[0], vals[1], np.array(vals[2::2]), np.array(vals[3::2])
