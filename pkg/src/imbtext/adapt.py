"""Multiclass use of binary oversamplers, and the ratio sweep.

Each class in turn is the minority of a binary problem against either all
other classes (``one_vs_all``) or its ordinal neighbours c-1 and c+1
(``one_vs_neighbor``).  Both groups always hold original rows only, so runs
are independent of each other and of their order.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .resample import (HYBRIDS, ORIGINAL, OVERSAMPLERS, UNDERSAMPLERS, ResamplePlan, ResampleResult,
                       SamplerError, _stack_binary, ceil_target, clean_result, generate_binary, undersample)
from .vectorize import Dataset

SCHEMES = ("one_vs_all", "one_vs_neighbor")
SCHEME_SUFFIX = {"one_vs_all": "1vsall", "one_vs_neighbor": "1vsneighbor"}
DEFAULT_RATIOS = tuple(round(0.1 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class DecompositionRun:
    scheme: str
    focus_class: int
    group_a: np.ndarray
    group_b: np.ndarray


def decompose(ds, scheme):
    m = ds.n_classes
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    if m < 2:
        raise ValueError("decomposition needs at least two classes")
    runs = []
    for c in range(1, m + 1):
        if scheme == "one_vs_all":
            others = [d for d in range(1, m + 1) if d != c]
        else:
            others = [d for d in (c - 1, c + 1) if 1 <= d <= m]
        runs.append(DecompositionRun(scheme, c, ds.rows_of(c), np.flatnonzero(np.isin(ds.y, others))))
    return runs


def run_seed(seed, focus):
    return np.random.default_rng([int(seed), int(focus)])


def apply_oversampler(ds, plan, scheme, fixed_delta=None, svm=None, round_synthetic=False):
    """Oversample every class below the plan's ratio against its second group.

    Generated rows are appended after all original rows, grouped by focus
    class in ascending order.  Hybrid methods clean the assembled dataset
    once at the end.
    """
    if plan.method not in OVERSAMPLERS + HYBRIDS:
        raise ValueError(f"{plan.method} is not an oversampler")
    n = len(ds)
    blocks, labels, tags, sources, runs_info = [], [], [], [], {}
    for run in decompose(ds, scheme):
        n_a, n_b = run.group_a.size, run.group_b.size
        target = ceil_target(n_b, plan.ratio)
        if n_a >= target:
            continue
        if n_a == 0:
            raise SamplerError("no rows to oversample", run.focus_class)
        X, _, _, _ = _stack_binary(ds.X[run.group_a], ds.X[run.group_b])
        try:
            gen = generate_binary(X, n_a, target - n_a, plan, run_seed(plan.seed, run.focus_class),
                                  fixed_delta, svm)
        except SamplerError as exc:
            raise SamplerError(str(exc), run.focus_class) from exc
        rows = gen.rows
        if round_synthetic and rows.shape[0]:
            rows = rows.copy()
            rows.data = np.round(rows.data)
            rows.eliminate_zeros()
        stacked = np.concatenate([run.group_a, run.group_b])
        blocks.append(rows)
        labels.append(np.full(len(gen), run.focus_class, dtype=np.int64))
        tags += [gen.tag] * len(gen)
        sources.append(stacked[gen.base] if gen.tag != "synthetic" else np.full(len(gen), -1))
        runs_info[run.focus_class] = {
            "target": target, "generated": len(gen),
            "parents": np.stack([stacked[gen.base], stacked[gen.ref]], axis=1) if len(gen) else
            np.empty((0, 2), dtype=np.int64),
            "delta": gen.delta, "mode": gen.mode,
            **{k: v for k, v in gen.info.items() if k in ("warning", "fallback")},
        }
    X = sparse.vstack([ds.X, *blocks], format="csr") if blocks else ds.X
    y = np.concatenate([ds.y, *labels]) if labels else ds.y
    prov = np.array([ORIGINAL] * n + tags, dtype=object)
    source = np.concatenate([np.arange(n), *sources]).astype(np.int64)
    res = ResampleResult(Dataset(X, y, ds.n_classes), prov, source, frozenset(),
                         {"scheme": scheme, "runs": runs_info})
    if plan.method == "smote_tomek":
        res = clean_result(res, "tomek")
    elif plan.method == "smote_enn":
        res = clean_result(res, "enn", 3)
    return res


def run_plan(ds, plan, scheme="one_vs_all", **kw):
    """Apply any plan: undersamplers work on the multiclass set directly."""
    if plan.method in UNDERSAMPLERS:
        return undersample(ds, plan)
    return apply_oversampler(ds, plan, scheme, **kw)


def ratio_sweep(ds, plan_template, scheme, ratios=DEFAULT_RATIOS, **kw):
    """One independent result per ratio; ratio i runs with seed + i."""
    ratios = list(ratios)
    if not ratios:
        raise ValueError("ratios must be nonempty")
    out = []
    for i, r in enumerate(ratios):
        plan = ResamplePlan(plan_template.method, r, plan_template.k_neighbors, plan_template.seed + i)
        out.append((r, run_plan(ds, plan, scheme, **kw)))
    return out
