"""Command-line entry point: ``imbtext <subcommand> ...``."""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import formats
from .adapt import DEFAULT_RATIOS, SCHEMES, run_plan
from .classify import DEFAULT_EPOCHS, DEFAULT_REG, load_model, predict, save_model, train_multiclass
from .evaluate import confusion, format_row, header, metrics
from .experiment import ConfigError, ExperimentConfig, load_config, run_experiment, sweep, write_sweep
from .igselect import MODES, rank_features, select_top
from .resample import METHODS, ResamplePlan
from .synth import PROFILES, generate_synthetic, get_profile, scaled
from .textprep import normalize, tokenize
from .vectorize import build_dataset, build_vocabulary

log = logging.getLogger("imbtext")


def _out(args, path, default):
    if path:
        return path
    return str(Path(args.out_dir) / default)


def _write_docs(path, docs):
    if path == "-":
        for d in docs:
            sys.stdout.write(f"{d.label}\t{' '.join(d.text.split())}\n")
    else:
        formats.write_corpus(path, docs)


def _config_value(args, key, default):
    if getattr(args, key, None) is not None:
        return getattr(args, key)
    if args.config:
        cfg = load_config(args.config)
        return getattr(cfg, key)
    return default


def cmd_preprocess(args):
    _write_docs(args.output, [normalize(d) for d in formats.read_corpus(args.input)])


def cmd_vectorize(args):
    docs = formats.read_corpus(args.input)
    tokens = [tokenize(d) for d in docs]
    vocab = build_vocabulary(tokens, args.remove_leq)
    labels = [d.label for d in docs]
    ds = build_dataset(tokens, labels, vocab, max(labels) if labels else 1)
    formats.write_dataset(_out(args, args.output, "dataset.txt"), ds)
    formats.write_vocabulary(_out(args, args.vocab, "vocabulary.tsv"), vocab)


def cmd_select(args):
    ds = formats.read_dataset(args.dataset)
    ranking = rank_features(ds, args.mode)
    sel = select_top(ranking, min(args.k, len(ranking)))
    if sel.overshoot:
        log.warning("first tie group alone holds %d features, above k=%d", sel.features.size, args.k)
    cols = np.sort(sel.features)
    grams = formats.read_vocabulary(args.vocab).ngram_list() if args.vocab else None
    formats.write_ranking(_out(args, args.ranking, "ranking.tsv"), ranking, grams)
    formats.write_dataset(_out(args, args.output, "selected.txt"), ds.with_columns(cols))
    if args.apply:
        other = formats.read_dataset(args.apply)
        formats.write_dataset(_out(args, args.apply_output, "selected_apply.txt"), other.with_columns(cols))


def cmd_resample(args):
    ds = formats.read_dataset(args.dataset)
    k = _config_value(args, "k_neighbors", None)
    plan = ResamplePlan(args.method, args.ratio, k, args.seed)
    res = run_plan(ds, plan, args.scheme, round_synthetic=args.round_synthetic)
    formats.write_dataset(_out(args, args.output, "resampled.txt"), res.dataset)
    formats.write_provenance(_out(args, args.provenance, "provenance.tsv"), res.provenance)
    for key in ("warning", "fallback", "stopped_on_empty"):
        if res.info.get(key):
            log.warning("%s: %s", key, res.info[key])


def cmd_train(args):
    ds = formats.read_dataset(args.dataset)
    model = train_multiclass(ds, _config_value(args, "reg", DEFAULT_REG),
                             _config_value(args, "epochs", DEFAULT_EPOCHS), args.seed)
    save_model(_out(args, args.model, "model.txt"), model)


def cmd_evaluate(args):
    if args.from_predictions:
        y_true, y_pred, _ = formats.read_predictions(args.from_predictions)
        m = args.classes or int(max(y_true.max(initial=1), y_pred.max(initial=1)))
    else:
        if not (args.model and args.dataset):
            raise ConfigError("evaluate needs --model and --dataset, or --from-predictions")
        model = load_model(args.model)
        ds = formats.read_dataset(args.dataset)
        y_true, y_pred = ds.y, predict(model, ds.X)
        m = max(ds.n_classes, model.n_classes)
        if args.predictions:
            formats.write_predictions(args.predictions, y_true, y_pred)
    rep = metrics(confusion(y_true, y_pred, m))
    text = header(m) + "\n" + format_row(args.name, rep) + "\n"
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_ratios(text):
    if not text:
        return DEFAULT_RATIOS
    return tuple(float(r) for r in text.split(","))


def cmd_sweep(args):
    train = formats.read_dataset(args.train)
    test = formats.read_dataset(args.test)
    cfg = ExperimentConfig(synthetic={"profile": "epicurious"}, reg=_config_value(args, "reg", DEFAULT_REG),
                           epochs=_config_value(args, "epochs", DEFAULT_EPOCHS),
                           k_neighbors=_config_value(args, "k_neighbors", None), seed=args.seed)
    results = sweep(train, test, args.method, args.scheme, _parse_ratios(args.ratios), cfg)
    for r in results:
        if r.error:
            log.warning("ratio %s failed: %s", r.point.ratio, r.error)
    counts = train.class_counts()
    present = np.flatnonzero(counts > 0)
    minority = int(present[np.argmin(counts[present])]) + 1
    write_sweep(_out(args, args.output, f"sweep_{args.method}.csv"), results, minority, int(np.argmax(counts)) + 1)


def cmd_experiment(args):
    if not args.config:
        raise ConfigError("experiment needs --config")
    overrides = {"seed": args.seed} if args.seed_given else {}
    cfg = load_config(args.config, **overrides)
    run_experiment(cfg, args.out_dir, args.jobs)


def cmd_synth(args):
    overrides = {}
    for key in ("separability", "spread", "leak", "vocab_size", "class_vocab", "mean_length"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            overrides = {**json.load(fh), **overrides}
    profile = get_profile(args.profile, seed=args.seed, **overrides)
    if args.total:
        profile = scaled(profile, args.total)
    _write_docs(_out(args, args.output, f"{args.profile}.tsv"), generate_synthetic(profile))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--out-dir", default=".", help="directory for default output paths")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="imbtext", description="Imbalanced text classification toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("preprocess", parents=[common], help="normalise a label<TAB>text corpus")
    s.add_argument("--input", required=True, help="corpus TSV, or - for stdin")
    s.add_argument("--output", default="-", help="normalised TSV, or - for stdout")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("vectorize", parents=[common], help="n-gram counts and vocabulary")
    s.add_argument("--input", required=True, help="normalised corpus TSV, or - for stdin")
    s.add_argument("--output")
    s.add_argument("--vocab")
    s.add_argument("--remove-leq", type=int, default=4, help="drop n-grams seen at most this often")
    s.set_defaults(func=cmd_vectorize)

    s = sub.add_parser("select", parents=[common], help="information-gain ranking and reduction")
    s.add_argument("--dataset", required=True)
    s.add_argument("--k", type=int, default=500)
    s.add_argument("--mode", choices=MODES, default="count")
    s.add_argument("--vocab", help="vocabulary TSV for n-gram names in the ranking")
    s.add_argument("--ranking")
    s.add_argument("--output")
    s.add_argument("--apply", help="second dataset reduced to the same columns")
    s.add_argument("--apply-output")
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("resample", parents=[common], help="apply one resampling plan")
    s.add_argument("--dataset", required=True)
    s.add_argument("--method", choices=METHODS, required=True)
    s.add_argument("--ratio", type=float)
    s.add_argument("--scheme", choices=SCHEMES, default="one_vs_all")
    s.add_argument("--k-neighbors", dest="k_neighbors", type=int)
    s.add_argument("--round-synthetic", action="store_true", help="snap synthetic counts to integers")
    s.add_argument("--output")
    s.add_argument("--provenance")
    s.set_defaults(func=cmd_resample)

    s = sub.add_parser("train", parents=[common], help="train the one-vs-rest linear SVM")
    s.add_argument("--dataset", required=True)
    s.add_argument("--model")
    s.add_argument("--reg", type=float)
    s.add_argument("--epochs", type=int)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", parents=[common], help="metrics as one CSV row")
    s.add_argument("--model")
    s.add_argument("--dataset")
    s.add_argument("--predictions", help="write row<TAB>true<TAB>predicted here")
    s.add_argument("--from-predictions", help="score an existing predictions file instead")
    s.add_argument("--classes", type=int, help="number of classes for --from-predictions")
    s.add_argument("--name", default="model")
    s.add_argument("--output")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep", parents=[common], help="evaluate one sampler over a ratio grid")
    s.add_argument("--train", required=True)
    s.add_argument("--test", required=True)
    s.add_argument("--method", choices=("none",) + METHODS, required=True)
    s.add_argument("--scheme", choices=SCHEMES, default="one_vs_all")
    s.add_argument("--ratios", help="comma-separated, default 0.1,...,1.0")
    s.add_argument("--k-neighbors", dest="k_neighbors", type=int)
    s.add_argument("--reg", type=float)
    s.add_argument("--epochs", type=int)
    s.add_argument("--output")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("experiment", parents=[common], help="full pipeline from a JSON config")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    s.add_argument("--profile", choices=sorted(PROFILES), required=True)
    s.add_argument("--total", type=int, help="rescale to about this many documents")
    s.add_argument("--separability", type=float)
    s.add_argument("--spread", type=float)
    s.add_argument("--leak", type=float)
    s.add_argument("--vocab-size", dest="vocab_size", type=int)
    s.add_argument("--class-vocab", dest="class_vocab", type=int)
    s.add_argument("--mean-length", dest="mean_length", type=float)
    s.add_argument("--output")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    try:
        args.func(args)
    except formats.FormatError as exc:
        print(f"{exc.path}:{exc.line}:{exc.column}: {exc.message}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"imbtext {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
