import numpy as np
import pytest

from netclass.errors import ConfigError
from netclass.kmeans import kmeans, kmeans_assign


def blobs(rng, centers, per=20, spread=0.05):
    xs = [c + spread * rng.normal(size=(per, len(c))) for c in np.asarray(centers, float)]
    return np.vstack(xs)


def test_objective_history_strictly_decreasing(rng):
    for seed in range(30):
        x = rng.normal(size=(50, 3))
        model = kmeans(x, k=4, seed=seed, n_restarts=1)
        hist = np.array(model.objective_history)
        assert np.all(np.diff(hist) <= 1e-9 * np.maximum(hist[:-1], 1.0))


def test_recovers_separated_blobs(rng):
    centers = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]]
    x = blobs(rng, centers)
    model = kmeans(x, k=3, seed=1)
    got = sorted(model.centroids.tolist())
    for g, w in zip(got, sorted(np.asarray(centers).tolist())):
        np.testing.assert_allclose(g, w, atol=0.2)
    # each blob lands in exactly one cluster
    assign = kmeans_assign(model, x)
    for i in range(3):
        assert len(set(assign[20 * i : 20 * (i + 1)])) == 1


def test_objective_is_within_cluster_ss(rng):
    x = rng.normal(size=(40, 2))
    model = kmeans(x, k=3, seed=0)
    assign = kmeans_assign(model, x)
    want = sum(
        ((x[assign == c] - model.centroids[c]) ** 2).sum()
        for c in range(3)
    )
    assert model.objective == pytest.approx(want, rel=1e-9)


def test_assign_is_nearest_centroid(rng):
    x = rng.normal(size=(30, 4))
    model = kmeans(x, k=5, seed=2)
    probe = rng.normal(size=(20, 4))
    assign = kmeans_assign(model, probe)
    d = ((probe[:, None, :] - model.centroids[None]) ** 2).sum(axis=2)
    np.testing.assert_array_equal(assign, d.argmin(axis=1))


def test_deterministic_given_seed(rng):
    x = rng.normal(size=(60, 3))
    a = kmeans(x, k=4, seed=7)
    b = kmeans(x, k=4, seed=7)
    np.testing.assert_array_equal(a.centroids, b.centroids)


def test_restarts_never_hurt(rng):
    x = rng.normal(size=(80, 2))
    one = kmeans(x, k=5, seed=3, n_restarts=1)
    many = kmeans(x, k=5, seed=3, n_restarts=10)
    assert many.objective <= one.objective + 1e-12


def test_k_larger_than_n_rejected(rng):
    with pytest.raises(ConfigError):
        kmeans(rng.normal(size=(3, 2)), k=4, seed=0)


def test_k_equals_n_zero_objective(rng):
    x = rng.normal(size=(5, 2))
    model = kmeans(x, k=5, seed=0)
    assert model.objective == pytest.approx(0.0, abs=1e-20)


def test_duplicate_points_handled(rng):
    # k-means++ with mass on one point must not crash; clusters may rescue
    x = np.vstack([np.zeros((10, 2)), np.ones((2, 2))])
    model = kmeans(x, k=2, seed=0)
    assert model.centroids.shape == (2, 2)
    assert model.objective == pytest.approx(0.0, abs=1e-20)
