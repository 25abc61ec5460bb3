"""k-nearest-neighbor classification by Euclidean distance.

Distances are computed on the coordinates as given; the evaluation layer
standardizes features with training-set statistics first, so no single
large-scale feature dominates. Distance ties resolve by training index
and vote ties by the smallest class index, keeping predictions
deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def knn_predict_batch(train_x, train_y, x, k: int) -> np.ndarray:
    """Majority class among the k nearest training rows, per query row."""
    train_x = np.asarray(train_x, dtype=np.float64)
    train_y = np.asarray(train_y, dtype=np.int64)
    x = np.asarray(x, dtype=np.float64)
    if train_x.ndim != 2 or len(train_x) == 0:
        raise ConfigError("training set must be a nonempty matrix")
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.shape[1] != train_x.shape[1]:
        raise ConfigError("query feature count does not match training set")
    n = len(train_x)
    if not 1 <= k <= n:
        raise ConfigError(f"k must be in [1, {n}], got {k}")
    n_classes = int(train_y.max())
    d2 = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * x @ train_x.T
        + (train_x * train_x).sum(axis=1)[None, :]
    )
    # stable sort so equal distances defer to the lower training index
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    out = np.empty(len(x), dtype=np.int64)
    for i in range(len(x)):
        votes = np.bincount(train_y[nearest[i]], minlength=n_classes + 1)[1:]
        out[i] = int(np.argmax(votes)) + 1
    return out


def knn_predict(train_x, train_y, x, k: int) -> int:
    """Single-query convenience wrapper around knn_predict_batch."""
    return int(knn_predict_batch(train_x, train_y, np.asarray(x), k)[0])
