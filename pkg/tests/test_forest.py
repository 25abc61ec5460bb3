import json

import numpy as np
import pytest

from netclass.errors import ConfigError
from netclass.forest import (
    _tree_records,
    default_mtry,
    forest_from_json,
    forest_to_json,
    load_forest,
    predict_forest,
    save_forest,
    train_forest,
)
from netclass.matrix import FeatureMatrix
from netclass.tree import grow_tree, tree_to_record


def labeled_matrix(rng, n=60, p=5, n_classes=3):
    x = rng.normal(size=(n, p))
    y = rng.integers(1, n_classes + 1, size=n)
    # force every class to appear so n_classes is stable
    y[:n_classes] = np.arange(1, n_classes + 1)
    return FeatureMatrix(
        x=x,
        feature_names=tuple(f"f{i}" for i in range(p)),
        row_ids=tuple(f"r{i}" for i in range(n)),
        labels=y,
    )


def test_default_mtry_sqrt_rounding():
    assert default_mtry(1) == 1
    assert default_mtry(4) == 2
    assert default_mtry(6) == 2
    assert default_mtry(14) == 4
    assert default_mtry(18) == 4
    assert default_mtry(25) == 5


def test_kernel_reproduces_reference_tree(rng):
    """At m = p (no feature sampling, no bootstrap) the compiled kernel
    must produce the exact tree of the pure-Python implementation,
    including thresholds bit for bit."""
    for trial in range(25):
        n = int(rng.integers(4, 40))
        p = int(rng.integers(1, 5))
        c = int(rng.integers(2, 4))
        x = rng.integers(0, 5, size=(n, p)).astype(np.float64)
        y = rng.integers(1, c + 1, size=n)
        y[: c] = np.arange(1, c + 1)
        data = FeatureMatrix(
            x=x,
            feature_names=tuple(f"f{i}" for i in range(p)),
            row_ids=tuple(str(i) for i in range(n)),
            labels=y,
        )
        model = train_forest(data, n_trees=1, m=p, seed=trial, bootstrap=False)
        reference = grow_tree(x, y, m=p, rng=0, n_classes=c)
        assert _tree_records(model, 0) == tree_to_record(reference)


def test_forest_deterministic_across_threads(rng):
    data = labeled_matrix(rng)
    a = train_forest(data, n_trees=40, seed=3, n_threads=1)
    b = train_forest(data, n_trees=40, seed=3, n_threads=4)
    for attr in ("offsets", "feat", "thr", "left", "right", "pred", "counts"):
        np.testing.assert_array_equal(getattr(a, attr), getattr(b, attr))
    np.testing.assert_array_equal(a.importances, b.importances)


def test_forest_seed_changes_trees(rng):
    data = labeled_matrix(rng)
    a = train_forest(data, n_trees=10, seed=0)
    b = train_forest(data, n_trees=10, seed=1)
    assert not (
        len(a.feat) == len(b.feat) and np.array_equal(a.feat, b.feat)
    )


def test_vote_fractions_sum_to_one(rng):
    data = labeled_matrix(rng)
    model = train_forest(data, n_trees=30, seed=2)
    classes, probs = predict_forest(model, data.x)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    assert classes.shape == (data.n,)
    assert set(np.unique(classes)) <= {1, 2, 3}


def test_predict_single_row_matches_batch(rng):
    data = labeled_matrix(rng)
    model = train_forest(data, n_trees=20, seed=5)
    batch_classes, batch_probs = predict_forest(model, data.x)
    for i in range(10):
        c, pr = predict_forest(model, data.x[i])
        assert c == batch_classes[i]
        np.testing.assert_array_equal(pr, batch_probs[i])


def test_unbootstrapped_single_tree_fits_training(rng):
    # distinct values in one feature guarantee a perfect fit
    n = 30
    x = np.column_stack([rng.permutation(n).astype(np.float64)])
    y = rng.integers(1, 3, size=n)
    y[:2] = [1, 2]
    data = FeatureMatrix(
        x=x,
        feature_names=("f0",),
        row_ids=tuple(str(i) for i in range(n)),
        labels=y,
    )
    model = train_forest(data, n_trees=1, m=1, seed=0, bootstrap=False)
    classes, _ = predict_forest(model, x)
    np.testing.assert_array_equal(classes, y)


def test_importances_sum_to_100(rng):
    data = labeled_matrix(rng)
    model = train_forest(data, n_trees=25, seed=1)
    assert model.importances.sum() == pytest.approx(100.0)
    assert (model.importances >= 0).all()


def test_importance_concentrates_on_signal_feature(rng):
    n = 200
    signal = rng.normal(size=n)
    x = np.column_stack([rng.normal(size=n), signal, rng.normal(size=n)])
    y = (signal > 0).astype(np.int64) + 1
    data = FeatureMatrix(
        x=x,
        feature_names=("noise1", "signal", "noise2"),
        row_ids=tuple(str(i) for i in range(n)),
        labels=y,
    )
    model = train_forest(data, n_trees=100, seed=0)
    assert model.feature_names[int(np.argmax(model.importances))] == "signal"
    assert model.importances[1] > 50


def test_json_round_trip(rng, tmp_path):
    data = labeled_matrix(rng)
    model = train_forest(data, n_trees=15, seed=4)
    path = tmp_path / "forest.json"
    save_forest(path, model)
    back = load_forest(path)
    assert back.n_trees == model.n_trees
    assert back.feature_names == model.feature_names
    probe = rng.normal(size=(25, data.p))
    c1, p1 = predict_forest(model, probe)
    c2, p2 = predict_forest(back, probe)
    np.testing.assert_array_equal(c1, c2)
    np.testing.assert_array_equal(p1, p2)
    doc = json.loads(path.read_text())
    assert doc["format"] == "netclass-forest/1"


def test_json_round_trip_deep_tree(rng, tmp_path):
    # steadily increasing feature + alternating labels grow a long chain
    n = 600
    x = np.arange(n, dtype=np.float64).reshape(-1, 1)
    y = np.tile([1, 2], n // 2)
    data = FeatureMatrix(
        x=x,
        feature_names=("f0",),
        row_ids=tuple(str(i) for i in range(n)),
        labels=y,
    )
    model = train_forest(data, n_trees=1, m=1, seed=0, bootstrap=False)
    path = tmp_path / "deep.json"
    save_forest(path, model)
    back = load_forest(path)
    classes, _ = predict_forest(back, x)
    np.testing.assert_array_equal(classes, y)


def test_load_rejects_other_formats(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format": "something-else/9"}))
    with pytest.raises(Exception):
        load_forest(path)


def test_forest_from_json_matches_to_json(rng):
    data = labeled_matrix(rng, n=30)
    model = train_forest(data, n_trees=5, seed=9)
    doc = forest_to_json(model)
    back = forest_from_json(doc)
    probe = rng.normal(size=(10, data.p))
    np.testing.assert_array_equal(
        predict_forest(model, probe)[0], predict_forest(back, probe)[0]
    )


def test_train_validation(rng):
    data = labeled_matrix(rng, n=10, p=3)
    with pytest.raises(ConfigError):
        train_forest(data, n_trees=0)
    with pytest.raises(ConfigError):
        train_forest(data, m=7)
    nan_data = FeatureMatrix(
        x=np.array([[np.nan, 1.0], [0.0, 2.0]]),
        feature_names=("a", "b"),
        row_ids=("r1", "r2"),
        labels=np.array([1, 2]),
    )
    with pytest.raises(ConfigError):
        train_forest(nan_data, n_trees=2)
    unlabeled = FeatureMatrix(
        x=np.zeros((4, 2)),
        feature_names=("a", "b"),
        row_ids=tuple("abcd"),
        labels=None,
    )
    with pytest.raises(ConfigError):
        train_forest(unlabeled, n_trees=2)


def test_bootstrap_uses_resampled_rows(rng):
    # with one tree and bootstrap on, some training rows are usually absent;
    # an absent isolated outlier row cannot be predicted from its own label
    x = np.vstack([np.zeros((20, 1)), [[100.0]]])
    y = np.array([1] * 20 + [2])
    data = FeatureMatrix(
        x=x,
        feature_names=("f0",),
        row_ids=tuple(str(i) for i in range(21)),
        labels=y,
    )
    missed = 0
    for seed in range(30):
        model = train_forest(data, n_trees=1, m=1, seed=seed, bootstrap=True)
        c, _ = predict_forest(model, np.array([100.0]))
        missed += c != 2
    # P(outlier not in bootstrap) = (20/21)^21 ~ 0.36: both outcomes occur
    assert 0 < missed < 30
