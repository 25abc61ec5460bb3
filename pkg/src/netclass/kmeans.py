"""Lloyd's k-means with k-means++ seeding and restarts.

Operates on the coordinates it is given; callers that want scale-free
clustering standardize first (see evaluate). The within-cluster squared
distance objective is checked to be nonincreasing at every Lloyd step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class KMeansModel:
    centroids: np.ndarray       # (k, p)
    assignments: np.ndarray     # (n,) cluster ids 0..k-1
    objective: float            # sum of squared distances to assigned centroids
    objective_history: tuple    # objective after every Lloyd iteration
    seed: int


def _squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # (n, k) squared Euclidean distances, numerically clipped at 0
    d = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * x @ centroids.T
        + (centroids * centroids).sum(axis=1)[None, :]
    )
    return np.maximum(d, 0.0)


def _seed_centroids(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(n)
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total > 0:
            probs = d2 / total
            chosen[i] = rng.choice(n, p=probs)
        else:  # all remaining points coincide with chosen centroids
            remaining = np.setdiff1d(np.arange(n), chosen[:i])
            chosen[i] = remaining[rng.integers(len(remaining))] if len(remaining) else chosen[0]
        d2 = np.minimum(d2, ((x - x[chosen[i]]) ** 2).sum(axis=1))
    return x[chosen].astype(np.float64).copy()


def _lloyd(x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int):
    n = x.shape[0]
    centroids = _seed_centroids(x, k, rng)
    assign = np.full(n, -1, dtype=np.int64)
    history = []
    prev_obj = np.inf
    for _ in range(max_iter):
        d2 = _squared_distances(x, centroids)
        new_assign = np.argmin(d2, axis=1)
        obj = float(d2[np.arange(n), new_assign].sum())
        if obj > prev_obj + 1e-9 * max(1.0, abs(prev_obj)):
            raise RuntimeError("k-means objective increased; update step is broken")
        history.append(obj)
        prev_obj = obj
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = assign == c
            if members.any():
                centroids[c] = x[members].mean(axis=0)
        # re-seed empty clusters to the points farthest from their centroid
        point_d2 = d2[np.arange(n), assign].copy()
        for c in range(k):
            if not (assign == c).any():
                far = int(np.argmax(point_d2))
                centroids[c] = x[far]
                point_d2[far] = -np.inf
    return centroids, assign, prev_obj, tuple(history)


def kmeans(
    x,
    k: int,
    n_restarts: int = 10,
    seed: int = 0,
    max_iter: int = 300,
) -> KMeansModel:
    """Best of n_restarts Lloyd runs (lowest objective; ties keep the first)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ConfigError("x must be 2-dimensional")
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k must be in [1, {n}], got {k}")
    if n_restarts < 1:
        raise ConfigError("n_restarts must be >= 1")
    best = None
    for r, child in enumerate(np.random.SeedSequence(seed).spawn(n_restarts)):
        rng = np.random.default_rng(child)
        centroids, assign, obj, history = _lloyd(x, k, rng, max_iter)
        if best is None or obj < best.objective:
            best = KMeansModel(
                centroids=centroids,
                assignments=assign,
                objective=obj,
                objective_history=history,
                seed=seed,
            )
    return best


def kmeans_assign(model: KMeansModel, x) -> np.ndarray:
    """Nearest-centroid cluster ids for new points (ties to lowest id)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    return np.argmin(_squared_distances(x, model.centroids), axis=1)
