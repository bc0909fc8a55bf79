"""End-to-end experiment: corpus -> features -> resampling sweep -> tables.

Output tree under ``out_dir``::

    config.json                     normalised configuration
    results_fscore.csv              one row per sampler, best ratio by macro F1
    results_recall<k>.csv           same, best ratio by recall of class k
    selection.csv                   criterion, sampler, chosen ratio
    sweeps/<sampler>.csv            ratio,accuracy,f-score,rec_min,rec_maj
    predictions/<sampler>_<r>.tsv   per-row predictions behind every sweep point
    failures.tsv                    sweep points whose sampler raised
    intermediate/                   normalized.tsv, vocabulary.tsv, dataset.txt,
                                    train.txt, test.txt, ranking.tsv,
                                    selected_train.txt, selected_test.txt
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import formats
from .adapt import DEFAULT_RATIOS, SCHEME_SUFFIX, SCHEMES, run_plan
from .classify import DEFAULT_EPOCHS, DEFAULT_REG, predict, train_multiclass
from .evaluate import aggregate_folds, confusion, failed_row, format_row, header
from .igselect import MODES, rank_features, select_top
from .resample import METHODS, OVERSAMPLERS, HYBRIDS, RATIO_METHODS, ResamplePlan, SamplerError
from .synth import generate_synthetic, get_profile, scaled
from .textprep import normalize, tokenize
from .vectorize import build_dataset, build_vocabulary, stratified_kfold_indices, stratified_split_indices

log = logging.getLogger(__name__)

NONE = "none"
BASELINE_NAME = "No sampling"
PROTOCOLS = ("holdout", "kfold")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    corpus: str = None
    synthetic: dict = None
    preprocess: bool = True
    remove_leq: int = None
    ig_mode: str = "count"
    n_features: int = 500
    methods: tuple = (NONE,) + METHODS
    schemes: tuple = SCHEMES
    ratios: tuple = DEFAULT_RATIOS
    k_neighbors: int = None
    reg: float = DEFAULT_REG
    epochs: int = DEFAULT_EPOCHS
    protocol: str = "holdout"
    train_fraction: float = 2 / 3
    folds: int = 10
    criteria: tuple = ("f-score",)
    seed: int = 0

    def __post_init__(self):
        if (self.corpus is None) == (self.synthetic is None):
            raise ConfigError("give exactly one of 'corpus' and 'synthetic'")
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"protocol must be one of {PROTOCOLS}")
        if self.ig_mode not in MODES:
            raise ConfigError(f"ig mode must be one of {MODES}")
        for m in self.methods:
            if m != NONE and m not in METHODS:
                raise ConfigError(f"unknown sampler {m!r}")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}")
        if not self.ratios or any(not 0 < float(r) <= 1 for r in self.ratios):
            raise ConfigError("ratios must be a nonempty list within (0, 1]")
        for c in self.criteria:
            if c != "f-score" and not (c.startswith("rec_") and c[4:].isdigit()):
                raise ConfigError(f"criterion {c!r} must be 'f-score' or 'rec_<class>'")
        if self.n_features < 1:
            raise ConfigError("ig.k must be >= 1")


_SECTIONS = {
    "corpus": None, "synthetic": None, "preprocess": None, "seed": None, "criteria": None,
    "ngrams": {"remove_leq": "remove_leq"},
    "ig": {"mode": "ig_mode", "k": "n_features"},
    "sampling": {"methods": "methods", "schemes": "schemes", "ratios": "ratios", "k_neighbors": "k_neighbors"},
    "classifier": {"reg": "reg", "epochs": "epochs"},
    "evaluation": {"protocol": "protocol", "train_fraction": "train_fraction", "folds": "folds"},
}


def config_from_dict(doc):
    kw = {}
    for key, val in doc.items():
        if key not in _SECTIONS:
            raise ConfigError(f"unknown config key {key!r}")
        sub = _SECTIONS[key]
        if sub is None:
            kw[key] = tuple(val) if isinstance(val, list) else val
            continue
        if not isinstance(val, dict):
            raise ConfigError(f"{key!r} must be an object")
        for k2, v2 in val.items():
            if k2 not in sub:
                raise ConfigError(f"unknown key {key}.{k2}")
            kw[sub[k2]] = tuple(v2) if isinstance(v2, list) else v2
    return ExperimentConfig(**kw)


def config_to_dict(cfg):
    d = asdict(cfg)
    out = {"corpus": d["corpus"], "synthetic": d["synthetic"], "preprocess": d["preprocess"],
           "seed": d["seed"], "criteria": list(d["criteria"])}
    for sec, fields_ in _SECTIONS.items():
        if fields_:
            out[sec] = {k: (list(d[v]) if isinstance(d[v], tuple) else d[v]) for k, v in fields_.items()}
    return out


def load_config(path, **overrides):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise formats.FormatError(path, exc.lineno, exc.colno, exc.msg) from None
    cfg = config_from_dict(doc)
    if overrides:
        cfg = ExperimentConfig(**{**asdict(cfg), **overrides})
    return cfg


# -- pipeline pieces ----------------------------------------------------------


DEFAULT_REMOVE_LEQ = 4


def synthetic_profile(cfg):
    spec = dict(cfg.synthetic)
    name = spec.pop("profile")
    total = spec.pop("total", None)
    spec.setdefault("seed", cfg.seed)
    profile = get_profile(name, **spec)
    return scaled(profile, int(total)) if total is not None else profile


def load_documents(cfg):
    """Documents and the n-gram frequency threshold that goes with them."""
    if cfg.corpus is not None:
        docs, remove_leq = formats.read_corpus(cfg.corpus), DEFAULT_REMOVE_LEQ
    else:
        profile = synthetic_profile(cfg)
        docs, remove_leq = generate_synthetic(profile), profile.remove_leq
    return docs, remove_leq if cfg.remove_leq is None else cfg.remove_leq


def featurize(docs, preprocess=True, remove_leq=DEFAULT_REMOVE_LEQ):
    """Normalised documents, vocabulary and the full count dataset."""
    normed = [normalize(d) for d in docs] if preprocess else list(docs)
    tokens = [tokenize(d) for d in normed]
    vocab = build_vocabulary(tokens, remove_leq)
    labels = [d.label for d in normed]
    return normed, vocab, build_dataset(tokens, labels, vocab, max(labels))


def select_features(train, n_features, mode="count"):
    ranking = rank_features(train, mode)
    sel = select_top(ranking, min(n_features, len(ranking)))
    return ranking, np.sort(sel.features)


def row_name(method, scheme):
    if method == NONE:
        return BASELINE_NAME
    if method in OVERSAMPLERS + HYBRIDS:
        return f"{method}_{SCHEME_SUFFIX[scheme]}"
    return method


def slug(name):
    return "none" if name == BASELINE_NAME else name


def ratio_tag(ratio):
    return "na" if ratio is None else f"{ratio:g}"


@dataclass
class Point:
    name: str
    ratio: float
    index: int
    method: str
    scheme: str


@dataclass
class PointResult:
    point: Point
    report: object = None
    y_true: np.ndarray = None
    y_pred: np.ndarray = None
    rows: np.ndarray = None
    folds: np.ndarray = None
    achieved: float = None
    error: str = None


def plan_points(cfg):
    points = []
    for method in cfg.methods:
        schemes = cfg.schemes if method in OVERSAMPLERS + HYBRIDS else (None,)
        for scheme in schemes:
            name = row_name(method, scheme)
            if method in RATIO_METHODS:
                points += [Point(name, float(r), i, method, scheme) for i, r in enumerate(cfg.ratios)]
            else:
                points.append(Point(name, None, 0, method, scheme))
    return points


def evaluate_point(point, splits, n_classes, cfg):
    """Resample each training split, train, predict its test split, pool counts."""
    mats, yt, yp, rows, folds = [], [], [], [], []
    achieved = None
    svm = {"reg": cfg.reg, "epochs": cfg.epochs}
    try:
        for f, (train, test, test_rows) in enumerate(splits):
            if point.method == NONE:
                fit = train
            else:
                plan = ResamplePlan(point.method, point.ratio, cfg.k_neighbors, cfg.seed + point.index)
                fit = run_plan(train, plan, point.scheme or "one_vs_all", svm=svm).dataset
            if f == 0:
                c = fit.class_counts()
                achieved = float(c[c > 0].min() / c.max())
            model = train_multiclass(fit, cfg.reg, cfg.epochs, cfg.seed)
            pred = predict(model, test.X)
            mats.append(confusion(test.y, pred, n_classes))
            yt.append(test.y)
            yp.append(pred)
            rows.append(test_rows)
            folds.append(np.full(test_rows.size, f))
    except (SamplerError, ValueError) as exc:
        return PointResult(point, error=f"{type(exc).__name__}: {exc}")
    order = np.argsort(np.concatenate(rows), kind="stable")
    return PointResult(point, aggregate_folds(mats), np.concatenate(yt)[order], np.concatenate(yp)[order],
                       np.concatenate(rows)[order], np.concatenate(folds)[order], achieved)


_CTX = {}


def _init_worker(splits, n_classes, cfg):
    _CTX.update(splits=splits, n_classes=n_classes, cfg=cfg)


def _run_worker(point):
    return evaluate_point(point, _CTX["splits"], _CTX["n_classes"], _CTX["cfg"])


def run_points(points, splits, n_classes, cfg, jobs=1):
    if jobs <= 1:
        return [evaluate_point(p, splits, n_classes, cfg) for p in points]
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(splits, n_classes, cfg)) as ex:
        return list(ex.map(_run_worker, points))


def criterion_value(report, criterion):
    if criterion == "f-score":
        return report.f_score
    return float(report.recall[int(criterion[4:]) - 1])


def choose(results, criterion):
    """Best successful point by ``criterion``; equal values keep the smaller ratio."""
    ok = [r for r in results if r.error is None]
    if not ok:
        return None
    return min(ok, key=lambda r: (-criterion_value(r.report, criterion),
                                  -1.0 if r.point.ratio is None else r.point.ratio))


def results_filename(criterion):
    return "results_fscore.csv" if criterion == "f-score" else f"results_recall{criterion[4:]}.csv"


def write_table(path, chosen, failed, n_classes):
    """Rows sorted by descending f-score (name breaks ties), FAILED rows last."""
    lines = [header(n_classes)]
    ranked = sorted(chosen.items(), key=lambda kv: (-kv[1].report.f_score, kv[0]))
    lines += [format_row(name, r.report) for name, r in ranked]
    lines += [failed_row(name, reason, n_classes) for name, reason in sorted(failed.items())]
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_sweep(path, results, minority, majority):
    lines = ["ratio,accuracy,f-score,rec_min,rec_maj"]
    for r in results:
        if r.error is not None:
            continue
        ratio = r.point.ratio if r.point.ratio is not None else r.achieved
        rep = r.report
        lines.append(f"{ratio:.6f},{rep.accuracy:.6f},{rep.f_score:.6f},"
                     f"{rep.recall[minority - 1]:.6f},{rep.recall[majority - 1]:.6f}")
    _write_text(path, "\n".join(lines) + "\n")


def make_splits(ds, cfg):
    if cfg.protocol == "holdout":
        pairs = [stratified_split_indices(ds.y, ds.n_classes, cfg.train_fraction, cfg.seed)]
    else:
        pairs = stratified_kfold_indices(ds.y, ds.n_classes, cfg.folds, cfg.seed)
    return pairs


def prepare(cfg, out_dir=None):
    """Front half of the pipeline; writes ``intermediate/`` when ``out_dir`` is set."""
    docs, remove_leq = load_documents(cfg)
    normed, vocab, ds = featurize(docs, cfg.preprocess, remove_leq)
    inter = Path(out_dir) / "intermediate" if out_dir is not None else None
    if inter is not None:
        formats.write_corpus(inter / "normalized.tsv", normed)
        formats.write_vocabulary(inter / "vocabulary.tsv", vocab)
        formats.write_dataset(inter / "dataset.txt", ds)
    splits = []
    grams = vocab.ngram_list()
    for f, (tr, te) in enumerate(make_splits(ds, cfg)):
        train, test = ds.subset(tr), ds.subset(te)
        ranking, cols = select_features(train, cfg.n_features, cfg.ig_mode)
        splits.append((train.with_columns(cols), test.with_columns(cols), te))
        if inter is not None and f == 0:
            formats.write_dataset(inter / "train.txt", train)
            formats.write_dataset(inter / "test.txt", test)
            formats.write_ranking(inter / "ranking.tsv", ranking, grams)
            formats.write_dataset(inter / "selected_train.txt", splits[0][0])
            formats.write_dataset(inter / "selected_test.txt", splits[0][1])
    return ds, splits


def run_experiment(cfg, out_dir, jobs=1):
    """Run every sampler over the ratio grid and write the output tree.

    Returns ``{criterion: {row name: PointResult}}`` for the chosen points.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_text(out / "config.json", json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")
    ds, splits = prepare(cfg, out)
    m = ds.n_classes
    counts = ds.class_counts()
    present = np.flatnonzero(counts > 0)
    minority = int(present[np.argmin(counts[present])]) + 1
    majority = int(np.argmax(counts)) + 1
    for c in cfg.criteria:
        if c != "f-score" and not 1 <= int(c[4:]) <= m:
            raise ConfigError(f"criterion {c!r} names a class outside 1..{m}")

    points = plan_points(cfg)
    log.info("evaluating %d sweep points on %d split(s)", len(points), len(splits))
    results = run_points(points, splits, m, cfg, jobs)

    by_row = {}
    for r in results:
        by_row.setdefault(r.point.name, []).append(r)
    failures = ["name\tratio\treason"]
    for name, rs in by_row.items():
        write_sweep(out / "sweeps" / f"{slug(name)}.csv", rs, minority, majority)
        for r in rs:
            if r.error is None:
                formats.write_predictions(out / "predictions" / f"{slug(name)}_{ratio_tag(r.point.ratio)}.tsv",
                                          r.y_true, r.y_pred, r.folds if len(splits) > 1 else None,
                                          rows=r.rows)
            else:
                failures.append(f"{name}\t{ratio_tag(r.point.ratio)}\t{r.error}")
    _write_text(out / "failures.tsv", "\n".join(failures) + "\n")

    chosen_all = {}
    selection = ["criterion,name,ratio"]
    for crit in cfg.criteria:
        chosen, failed = {}, {}
        for name, rs in by_row.items():
            best = choose(rs, crit)
            if best is None:
                failed[name] = rs[0].error
            else:
                chosen[name] = best
                selection.append(f"{crit},{name},{ratio_tag(best.point.ratio)}")
        write_table(out / results_filename(crit), chosen, failed, m)
        chosen_all[crit] = chosen
    _write_text(out / "selection.csv", "\n".join(selection) + "\n")
    return chosen_all


def sweep(train, test, method, scheme, ratios, cfg):
    """Evaluate one sampler over ``ratios`` on a fixed train/test pair."""
    name = row_name(method, scheme)
    test_rows = np.arange(len(test))
    splits = [(train, test, test_rows)]
    if method in RATIO_METHODS:
        points = [Point(name, float(r), i, method, scheme) for i, r in enumerate(ratios)]
    else:
        points = [Point(name, None, 0, method, scheme)]
    return [evaluate_point(p, splits, train.n_classes, cfg) for p in points]
