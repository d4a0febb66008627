"""Tests for the from-scratch classifiers and CV selection."""

import numpy as np
import pytest

from cadaug.dataset import Dataset, make_dataset
from cadaug.features import FeatureSchema, all_shapes
from cadaug.ml import (
    CVPlan,
    DEFAULT_GRIDS,
    DecisionTreeClassifier,
    DegenerateDataError,
    KNNClassifier,
    RandomBaseline,
    RandomForestClassifier,
    Standardizer,
    TrainedModel,
    accuracy,
    standardize_apply,
    standardize_fit,
    train,
)

SCHEMA_12 = FeatureSchema(tuple(all_shapes()[:4]))  # 12 columns


def blobs(n_per_class=100, n_features=12, seed=0, spread=1.0, sep=50.0):
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, sep, size=(6, n_features))
    X = np.vstack(
        [centers[c] + rng.normal(0.0, spread, size=(n_per_class, n_features)) for c in range(6)]
    )
    y = np.repeat(np.arange(6), n_per_class)
    perm = rng.permutation(len(y))
    return X[perm], y[perm]


def blob_dataset(X, y, role="all"):
    ids = [f"b{i:04d}" for i in range(len(y))]
    return make_dataset(ids, X, [int(v) for v in y], SCHEMA_12, "unbalanced", role)


# -- standardization ------------------------------------------------------


def test_standardize_constant_column_maps_to_zero():
    X = np.array([[1.0, 7.0], [2.0, 7.0], [3.0, 7.0]])
    stats = standardize_fit(X)
    Z = standardize_apply(stats, X)
    assert np.all(Z[:, 1] == 0.0)
    assert abs(Z[:, 0].mean()) < 1e-12


def test_standardize_train_stats_applied_to_test():
    train_X = np.array([[0.0], [2.0]])
    stats = standardize_fit(train_X)
    test_Z = standardize_apply(stats, np.array([[10.0]]))
    assert test_Z[0, 0] == pytest.approx(9.0)  # mean 1, std 1 — no refit


def test_standardize_requires_two_rows():
    with pytest.raises(ValueError):
        standardize_fit(np.array([[1.0, 2.0]]))


def test_standardizer_json_roundtrip():
    stats = standardize_fit(np.array([[0.0, 5.0], [4.0, 5.0]]))
    again = Standardizer.from_json(stats.to_json())
    assert again == stats


# -- knn ------------------------------------------------------------------


def test_knn_memorizes_training_rows():
    X, y = blobs(n_per_class=10)
    model = KNNClassifier(k=1).fit(X, y)
    assert (model.predict(X) == y).all()


def test_knn_vote_tie_goes_to_lowest_label():
    X = np.array([[0.0], [2.0]])
    model = KNNClassifier(k=2).fit(X, np.array([1, 0]))
    assert model.predict(np.array([[1.0]]))[0] == 0


def test_knn_distance_tie_prefers_earlier_row():
    X = np.array([[5.0], [5.0]])
    model = KNNClassifier(k=1).fit(X, np.array([4, 2]))
    assert model.predict(np.array([[5.0]]))[0] == 4


def test_knn_k_clamped_to_training_size():
    X = np.array([[0.0], [1.0], [2.0]])
    model = KNNClassifier(k=21).fit(X, np.array([0, 0, 1]))
    assert model.predict(np.array([[0.5]]))[0] == 0


# -- decision tree --------------------------------------------------------


def test_tree_simple_threshold():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    model = DecisionTreeClassifier().fit(X, y)
    assert model.tree["threshold"] == pytest.approx(1.5)
    assert list(model.predict(np.array([[-4.0], [9.0]]))) == [0, 1]
    assert model.depth() == 1


def test_tree_respects_depth_bound():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(300, 5))
    y = rng.integers(0, 6, size=300)
    for bound in (1, 3, 7):
        model = DecisionTreeClassifier(max_depth=bound).fit(X, y)
        assert model.depth() <= bound


def test_tree_min_leaf_blocks_small_splits():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 1, 1, 1])
    model = DecisionTreeClassifier(min_leaf=2).fit(X, y)
    # the only impurity-reducing split (0 | 1 1 1) leaves one row on the left
    assert model.depth() <= 1
    if model.depth() == 1:
        mask = X[:, 0] <= model.tree["threshold"]
        assert mask.sum() >= 2 and (~mask).sum() >= 2


def test_tree_pure_node_is_leaf():
    X = np.array([[0.0], [100.0]])
    y = np.array([3, 3])
    model = DecisionTreeClassifier().fit(X, y)
    assert model.tree == {"label": 3}


def test_tree_deterministic():
    X, y = blobs(n_per_class=20, seed=5)
    a = DecisionTreeClassifier(max_depth=8).fit(X, y)
    b = DecisionTreeClassifier(max_depth=8).fit(X, y)
    assert a.tree == b.tree


# -- random forest --------------------------------------------------------


def test_forest_single_tree_degenerates_to_dt():
    X, y = blobs(n_per_class=20, seed=9)
    forest = RandomForestClassifier(
        n_trees=1, max_depth=6, max_features=None, bootstrap=False, seed=123
    ).fit(X, y)
    plain = DecisionTreeClassifier(max_depth=6).fit(X, y)
    assert forest.trees[0].tree == plain.tree
    queries = np.random.default_rng(1).normal(size=(40, X.shape[1]))
    assert (forest.predict(queries) == plain.predict(queries)).all()


def test_forest_deterministic_per_seed():
    X, y = blobs(n_per_class=15, seed=2)
    a = RandomForestClassifier(n_trees=10, max_depth=6, seed=7).fit(X, y)
    b = RandomForestClassifier(n_trees=10, max_depth=6, seed=7).fit(X, y)
    assert a.to_payload() == b.to_payload()
    c = RandomForestClassifier(n_trees=10, max_depth=6, seed=8).fit(X, y)
    assert c.to_payload() != a.to_payload()


def test_forest_feature_subset_specs():
    from cadaug.ml.forest import resolve_max_features

    assert resolve_max_features("sqrt", 144) == 12
    assert resolve_max_features("third", 12) == 4
    assert resolve_max_features(None, 9) is None
    assert resolve_max_features(5, 3) == 3
    with pytest.raises(ValueError):
        resolve_max_features("log2", 10)


# -- baseline -------------------------------------------------------------


def test_baseline_near_one_sixth_on_balanced_data():
    n = 6114
    rng = np.random.default_rng(0)
    X = rng.normal(size=(n, 3))
    y = np.repeat(np.arange(6), n // 6)
    model = RandomBaseline(seed=11).fit(X, y)
    acc = float((model.predict(X) == y).mean())
    assert abs(acc - 1 / 6) <= 0.03
    assert (model.predict(X) == model.predict(X)).all()


# -- CV selection ---------------------------------------------------------


def test_train_rejects_single_class():
    X = np.random.default_rng(0).normal(size=(30, 12))
    ds = blob_dataset(X, np.zeros(30, dtype=int))
    with pytest.raises(DegenerateDataError):
        train("knn", ds, CVPlan(seed=1))


def test_train_rejects_too_few_rows():
    X = np.random.default_rng(0).normal(size=(3, 12))
    ds = blob_dataset(X, np.array([0, 1, 2]))
    with pytest.raises(DegenerateDataError):
        train("knn", ds, CVPlan(folds=5, seed=1))


def test_train_unknown_kind_and_bad_plan():
    X, y = blobs(n_per_class=5)
    ds = blob_dataset(X, y)
    with pytest.raises(ValueError):
        train("svc", ds, CVPlan(seed=0))
    with pytest.raises(ValueError):
        CVPlan(folds=1)
    with pytest.raises(ValueError):
        CVPlan(grids={"knn": []})


def test_single_point_grid_still_reports_folds():
    X, y = blobs(n_per_class=10, seed=4)
    ds = blob_dataset(X, y)
    plan = CVPlan(folds=3, grids={"knn": [{"k": 3}]}, seed=5)
    model = train("knn", ds, plan)
    assert model.hyperparameters == {"k": 3}
    assert len(model.cv_results) == 1
    assert len(model.cv_results[0]["fold_accuracies"]) == 3


def test_blobs_holdout_above_ninety_percent():
    X, y = blobs(n_per_class=100, seed=0)
    cut = 480
    train_ds = blob_dataset(X[:cut], y[:cut], role="train")
    test_ds = blob_dataset(X[cut:], y[cut:], role="test")
    for kind in ("knn", "dt", "rf"):
        model = train(kind, train_ds, CVPlan(seed=0))
        assert accuracy(model, test_ds) >= 0.9, kind


def test_train_is_deterministic():
    X, y = blobs(n_per_class=12, seed=6)
    ds = blob_dataset(X, y)
    plan = CVPlan(folds=4, grids={"rf": [{"n_trees": 5, "max_depth": 4}]}, seed=3)
    a = train("rf", ds, plan)
    b = train("rf", ds, plan)
    assert a.to_json() == b.to_json()


def test_trained_model_json_roundtrip(tmp_path):
    X, y = blobs(n_per_class=8, seed=8)
    ds = blob_dataset(X, y)
    queries = np.random.default_rng(4).normal(size=(25, 12))
    for kind, grid in (
        ("knn", [{"k": 3}]),
        ("dt", [{"max_depth": 4, "min_leaf": 1}]),
        ("rf", [{"n_trees": 4, "max_depth": 4}]),
    ):
        model = train(kind, ds, CVPlan(folds=3, grids={kind: grid}, seed=2))
        path = tmp_path / f"{kind}.json"
        model.save(path)
        again = TrainedModel.load(path)
        assert again.kind == model.kind
        assert again.hyperparameters == model.hyperparameters
        assert (again.predict(queries) == model.predict(queries)).all()


def test_model_rejects_wrong_width_and_empty_dataset():
    X, y = blobs(n_per_class=8, seed=1)
    ds = blob_dataset(X, y)
    model = train("dt", ds, CVPlan(folds=3, grids={"dt": [{"max_depth": 4}]}, seed=0))
    with pytest.raises(ValueError):
        model.predict(np.zeros((2, 5)))
    empty = Dataset((), SCHEMA_12, "unbalanced", "test")
    with pytest.raises(ValueError):
        accuracy(model, empty)


def test_default_grids_shape():
    assert [g["k"] for g in DEFAULT_GRIDS["knn"]] == [1, 3, 5, 11, 21]
    assert len(DEFAULT_GRIDS["dt"]) == 8
    assert len(DEFAULT_GRIDS["rf"]) == 6
    assert all(g["n_trees"] == 100 for g in DEFAULT_GRIDS["rf"])
