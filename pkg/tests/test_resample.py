import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import sparse

from conftest import line_dataset
from imbtext.neighbors import DistanceIndex, tomek_links
from imbtext.resample import (DELTA_RANGES, DUPLICATE, ORIGINAL, SYNTHETIC, ResamplePlan, SamplerError,
                              adasyn, adasyn_weights, condensed_nn, edited_nn, near_miss1, neighborhood_cleaning,
                              one_sided_selection, random_over, random_under, repeated_edited_nn, smote,
                              smote_enn, smote_tomek, undersample)
from imbtext.vectorize import Dataset
from oracles import (decompose, enn_oracle, geometry_violations, near_miss_oracle, one_nn_consistent,
                     tomek_oracle)


def counts_ds(counts, dim=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(sum(counts), dim))
    return Dataset.from_dense(X, np.repeat(np.arange(1, len(counts) + 1), counts), len(counts))


def gaussian_ds(seed, n_max=200, d_max=20):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    m = int(rng.integers(2, 4))
    y = rng.integers(1, m + 1, n)
    y[:m] = np.arange(1, m + 1)
    X = rng.normal(size=(n, d)) + y[:, None] * 0.7
    return Dataset.from_dense(X, y, m)


# -- plan validation ----------------------------------------------------------


def test_plan_defaults_and_validation():
    assert ResamplePlan("smote_regular").ratio == 1.0
    assert ResamplePlan("enn").k_neighbors == 3 and ResamplePlan("adasyn").k_neighbors == 5
    with pytest.raises(ValueError):
        ResamplePlan("cnn", ratio=0.5)
    with pytest.raises(ValueError):
        ResamplePlan("smote_regular", ratio=1.5)
    with pytest.raises(ValueError):
        ResamplePlan("magic")


# -- random samplers ----------------------------------------------------------


@pytest.mark.parametrize("counts, ratio, expected", [
    ((100, 10), 1.0, [10, 10]),
    ((100, 10), 0.5, [20, 10]),
    ((100, 50, 10), 0.5, [20, 20, 10]),
])
def test_random_under_counts(counts, ratio, expected):
    res = random_under(counts_ds(counts), ratio, seed=3)
    assert res.counts().tolist() == expected
    assert set(res.removed).isdisjoint(res.source.tolist())


def test_random_over_counts():
    rng = np.random.default_rng(0)
    res = random_over(rng.normal(size=(10, 2)), rng.normal(size=(100, 2)), 0.5)
    assert res.counts().tolist() == [50, 100]
    assert (res.provenance == DUPLICATE).sum() == 40
    dup = np.flatnonzero(res.provenance == DUPLICATE)
    X = res.dataset.dense()
    assert all(np.array_equal(X[i], X[res.source[i]]) and res.source[i] < 10 for i in dup)


def test_random_over_target_met_and_empty():
    rng = np.random.default_rng(0)
    res = random_over(rng.normal(size=(10, 2)), rng.normal(size=(100, 2)), 0.1)
    assert res.counts().tolist() == [10, 100]
    with pytest.raises(SamplerError):
        random_over(np.empty((0, 2)), rng.normal(size=(100, 2)), 0.5)


# -- editing and condensing ---------------------------------------------------


def test_enn_line_example(abline):
    assert sorted(edited_nn(abline, 3).removed) == [3, 4, 5]
    assert sorted(edited_nn(abline, 3, protect={1}).removed) == [4, 5]


def test_enn_clean_clusters_identity():
    ds = line_dataset([0.0, 0.1, 0.2, 0.3], [10.0, 10.1, 10.2, 10.3])
    assert edited_nn(ds, 3).removed == frozenset()


def test_enn_matches_vote_oracle():
    for seed in range(200):
        ds = gaussian_ds(seed, n_max=60)
        k = 1 + seed % 5
        assert sorted(edited_nn(ds, k).removed) == enn_oracle(ds.X, ds.y, k)


def test_renn_fixpoint(abline):
    res = repeated_edited_nn(abline, 3)
    again = edited_nn(res.dataset, 3)
    assert res.info["stopped_on_empty"] or again.removed == frozenset()


def test_renn_alternating_grid_terminates():
    ds = line_dataset([0, 2, 4, 6, 8], [1, 3, 5, 7, 9])
    res = repeated_edited_nn(ds, 1)
    assert (res.counts() > 0).all()


def test_renn_fixpoint_random():
    for seed in range(200):
        ds = gaussian_ds(seed, n_max=60)
        res = repeated_edited_nn(ds, 3, protect=(1,))
        if not res.info["stopped_on_empty"]:
            assert enn_oracle(res.dataset.X, res.dataset.y, 3, protect=(1,)) == []


def test_cnn_line_example_consistent(abline):
    for seed in range(10):
        res = condensed_nn(abline, seed)
        assert one_nn_consistent(abline.X, abline.y, res.info["store"])
        assert set(abline.rows_of(2).tolist()) <= set(res.source.tolist())


def test_cnn_clusters_and_duplicates():
    ds = line_dataset([0.0, 0.1, 0.2], [50.0, 50.1, 50.3, 50.4])
    res = condensed_nn(ds, 1)
    assert set(res.dataset.y.tolist()) == {1, 2}
    assert one_nn_consistent(ds.X, ds.y, res.info["store"])
    dup = line_dataset([1.0] * 4, [7.0] * 6)
    res = condensed_nn(dup, 0)
    assert len(res.info["store"]) <= 2
    assert res.counts().tolist() == [4, 1]


def test_cnn_oss_consistency_random():
    for seed in range(200):
        ds = gaussian_ds(seed, n_max=80)
        cnn = condensed_nn(ds, seed)
        assert one_nn_consistent(ds.X, ds.y, cnn.info["store"])
        assert set(ds.rows_of(cnn.info["minority"]).tolist()) <= set(cnn.source.tolist())
        oss = one_sided_selection(ds, seed)
        store = oss.info["store"]
        assert one_nn_consistent(ds.X, ds.y, store)
        minority = oss.info["minority"]
        assert set(ds.rows_of(minority).tolist()) <= set(oss.source.tolist())
        kept = set(oss.source.tolist())
        for a, b in tomek_oracle(ds.X[store], ds.y[store]):
            for r in (store[a], store[b]):
                assert ds.y[r] == minority or r not in kept


def test_oss_pure_clusters():
    ds = line_dataset([0.0, 0.1], [20.0, 20.1, 20.2, 20.3, 20.4])
    res = one_sided_selection(ds, 0)
    assert res.counts()[0] == 2 and res.counts()[1] < 5


def test_ncr_line_example(abline):
    # k=3: 0.9 is voted B (majority, removed); 1.0 and 1.3 are misvoted minority
    # rows whose majority neighbours are 0.9 and 0.2
    res = neighborhood_cleaning(abline, 3)
    assert res.info["minority"] == 2
    assert sorted(res.removed) == [2, 3]


def test_ncr_clean_and_protective():
    ds = line_dataset([0.0, 0.1, 0.2, 0.3], [10.0, 10.1, 10.2])
    assert neighborhood_cleaning(ds, 3).removed == frozenset()
    for seed in range(30):
        ds = gaussian_ds(seed, n_max=60)
        res = neighborhood_cleaning(ds, 3)
        m = res.info["minority"]
        assert set(ds.rows_of(m).tolist()) <= set(res.source.tolist())


def test_near_miss_line_example():
    ds = line_dataset(list(range(10)), [10, 11, 12])
    res = near_miss1(ds, 1.0)
    assert sorted(res.source.tolist()) == [7, 8, 9, 10, 11, 12]


def test_near_miss_counts_and_identity():
    assert near_miss1(counts_ds((100, 10)), 1.0).counts().tolist() == [10, 10]
    ds = counts_ds((40, 10))
    assert near_miss1(ds, 0.25).removed == frozenset()


def test_near_miss_matches_oracle():
    for seed in range(200):
        ds = gaussian_ds(seed)
        ratio = [0.3, 0.5, 0.8, 1.0][seed % 4]
        res = near_miss1(ds, ratio)
        expected = near_miss_oracle(ds.X, ds.y, res.info["minority"], res.info["cap"])
        assert sorted(res.source.tolist()) == expected


def test_undersample_dispatch_protects_minority(abline):
    res = undersample(abline, ResamplePlan("enn"))
    assert set(abline.rows_of(2).tolist()) <= set(res.source.tolist())


# -- SMOTE family -------------------------------------------------------------


def _check_geometry(res, n_min, k, variant):
    produced, problems = geometry_violations(res, n_min, k, variant, DELTA_RANGES)
    assert problems == []
    return produced


@pytest.mark.parametrize("variant", ["regular", "b1", "b2", "svm"])
def test_smote_geometry(variant, overlap_pair):
    minority, majority = overlap_pair
    res = smote(minority, majority, 1.0, 5, variant, seed=4)
    produced = _check_geometry(res, len(minority), 5, variant)
    assert produced > 0
    if variant in ("regular", "svm"):
        assert res.counts()[0] == len(majority)


@pytest.mark.parametrize("variant", ["regular", "b1", "b2", "svm"])
def test_smote_deterministic(variant, overlap_pair):
    a = smote(*overlap_pair, 0.8, 5, variant, seed=9)
    b = smote(*overlap_pair, 0.8, 5, variant, seed=9)
    assert (a.dataset.X != b.dataset.X).nnz == 0


def test_fixed_delta_limits(overlap_pair):
    minority, majority = overlap_pair
    zero = smote(minority, majority, 1.0, seed=1, fixed_delta=0.0)
    X = zero.dataset.dense()
    n = len(minority) + len(majority)
    assert all(np.array_equal(X[n + i], X[b]) for i, (b, _) in enumerate(zero.info["parents"]))
    one = smote(minority, majority, 1.0, seed=1, fixed_delta=1.0)
    X = one.dataset.dense()
    assert all(any(np.array_equal(row, m) for m in minority) for row in X[n:])


def test_smote_triangle_on_segments():
    minority = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    majority = np.array([[5.0, 5.0]] * 6)
    res = smote(minority, majority, 1.0, k=2, seed=2)
    new = res.dataset.dense()[len(minority) + len(majority):]
    assert len(new) == 3
    for s in new:
        on_some = False
        for i in range(3):
            for j in range(3):
                if i != j:
                    d, resid = decompose(s, minority[i], minority[j])
                    on_some |= resid < 1e-12 and -1e-12 <= d <= 1 + 1e-12
        assert on_some


def test_smote_provenance(overlap_pair):
    res = smote(*overlap_pair, 1.0)
    n = sum(len(p) for p in overlap_pair)
    assert (res.provenance[:n] == ORIGINAL).all() and (res.provenance[n:] == SYNTHETIC).all()
    assert (res.source[n:] == -1).all()


def test_b1_skips_noise_and_safe():
    # row 0 is buried in majority rows (noise), rows 1-3 sit far away (safe),
    # rows 4-5 straddle a majority pair (danger)
    minority = np.array([[0, 0], [50, 50], [50, 51], [51, 50], [20, 0], [20, 2]], dtype=float)
    majority = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [0, 1.5], [21, 1], [19, 1]], dtype=float)
    res = smote(minority, majority, 1.0, k=3, variant="b1", seed=0)
    bases = set(res.info["parents"][:, 0].tolist())
    assert 0 not in bases and bases <= {4, 5}
    assert res.info["noise"].tolist() == [0]


def test_b1_empty_danger_warns():
    minority = np.array([[0.0], [0.1], [0.2]])
    majority = np.array([[9.0], [9.1], [9.2], [9.3]])
    res = smote(minority, majority, 1.0, k=2, variant="b1")
    assert "warning" in res.info and len(res.dataset) == 7


def test_svm_without_support_falls_back(overlap_pair):
    res = smote(*overlap_pair, 1.0, variant="svm", svm={"margin_tol": -100.0})
    assert "fallback" in res.info
    assert set(res.info["mode"].tolist()) == {"interpolate"}


def test_smote_target_met_is_noop(overlap_pair):
    minority, majority = overlap_pair
    res = smote(minority, majority, 0.2)
    assert len(res.dataset) == len(minority) + len(majority)


def test_round_synthetic(overlap_pair):
    minority, majority = (np.abs(np.round(p * 3)) for p in overlap_pair)
    res = smote(minority, majority, 1.0, round_synthetic=True)
    assert np.array_equal(res.dataset.X.data, np.round(res.dataset.X.data))


@given(st.integers(0, 10_000), st.sampled_from(["regular", "b1", "b2", "svm"]))
def test_smote_geometry_random(seed, variant):
    rng = np.random.default_rng(seed)
    minority = rng.poisson(1.5, (int(rng.integers(3, 12)), 4)).astype(float)
    majority = rng.poisson(2.0, (int(rng.integers(12, 30)), 4)).astype(float)
    k = int(rng.integers(1, 6))
    res = smote(minority, majority, 1.0, k, variant, seed)
    _check_geometry(res, len(minority), k, variant)


# -- ADASYN -------------------------------------------------------------------


def test_adasyn_weights_example():
    assert [float(w) for w in adasyn_weights([2, 1])] == pytest.approx([2 / 3, 1 / 3])
    assert adasyn_weights([0, 0]) is None


def test_adasyn_counts_sum_to_g(overlap_pair):
    minority, majority = overlap_pair
    res = adasyn(minority, majority, 0.9, seed=2)
    G = int(np.ceil(0.9 * len(majority))) - len(minority)
    assert res.info["per_base"].sum() == G == len(res.info["parents"])
    assert sum(res.info["weights"]) == pytest.approx(1.0, abs=1e-12)
    _check_geometry(res, len(minority), 5, "regular")


def test_adasyn_favours_hard_rows():
    minority = np.array([[0.0], [0.2], [0.4], [5.0]])
    majority = np.array([[5.1], [5.2], [5.3], [5.4], [5.5], [5.6], [5.7], [5.8]])
    res = adasyn(minority, majority, 1.0, k=3)
    per = res.info["per_base"]
    assert per[3] == per.max() and per[0] == 0


def test_adasyn_no_majority_neighbours_falls_back():
    minority = np.array([[0.0], [0.1], [0.2]])
    majority = np.array([[9.0], [9.1], [9.2], [9.3]])
    res = adasyn(minority, majority, 1.0, k=2)
    assert "fallback" in res.info and len(res.info["parents"]) == 1


# -- hybrids ------------------------------------------------------------------


def test_smote_tomek_leaves_no_links(overlap_pair):
    res = smote_tomek(*overlap_pair, 1.0, seed=0)
    assert tomek_oracle(res.dataset.X, res.dataset.y) == []
    plain = smote(*overlap_pair, 1.0, seed=0)
    assert len(tomek_links(DistanceIndex(plain.dataset.X), plain.dataset.y)) > 0


def test_smote_tomek_identity_when_clean():
    minority = np.array([[0.0], [0.1], [0.2], [0.3]])
    majority = np.array([[9.0], [9.1], [9.2], [9.3]])
    res = smote_tomek(minority, majority, 1.0)
    assert len(res.dataset) == 8 and res.removed == frozenset()


def test_smote_enn_composed_oracle(overlap_pair):
    plain = smote(*overlap_pair, 1.0, seed=5)
    hybrid = smote_enn(*overlap_pair, 1.0, seed=5)
    dropped = enn_oracle(plain.dataset.X, plain.dataset.y, 3)
    expected = np.delete(plain.dataset.dense(), dropped, axis=0)
    assert np.array_equal(hybrid.dataset.dense(), expected)


def test_smote_enn_equals_smote_on_clean_clusters():
    minority = np.array([[0.0], [0.1], [0.2], [0.3]])
    majority = np.array([[9.0], [9.1], [9.2], [9.3], [9.4]])
    plain = smote(minority, majority, 1.0, seed=1)
    hybrid = smote_enn(minority, majority, 1.0, seed=1)
    assert np.array_equal(plain.dataset.dense(), hybrid.dataset.dense())


def test_enn_cleans_more_than_tomek(overlap_pair):
    base = len(smote(*overlap_pair, 1.0, seed=0).dataset)
    tomek = base - len(smote_tomek(*overlap_pair, 1.0, seed=0).dataset)
    enn = base - len(smote_enn(*overlap_pair, 1.0, seed=0).dataset)
    assert enn >= tomek > 0


def test_sparse_inputs_accepted():
    rng = np.random.default_rng(0)
    minority = sparse.csr_matrix(rng.poisson(1.0, (6, 5)).astype(float))
    majority = sparse.csr_matrix(rng.poisson(2.0, (20, 5)).astype(float))
    assert smote(minority, majority, 1.0).counts().tolist() == [20, 20]
