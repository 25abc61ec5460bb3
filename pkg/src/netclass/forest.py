"""Random forests: bootstrap-resampled trees with Gini feature importance.

Each tree is grown on a size-N bootstrap resample with a fresh random
m-subset of features at every split. Per-tree randomness comes from
seeds spawned off one root seed, and every tree writes into its own
slot, so a given seed produces a byte-identical model and predictions
regardless of the number of worker threads.
"""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._forest_fast import forest_votes, grow_tree_flat
from .errors import ConfigError, FormatError
from .matrix import FeatureMatrix

DEFAULT_TREES = 10_000
CI_TREES = 500  # accuracy plateaus well before this; used by fast profiles
FOREST_FORMAT = "netclass-forest/1"


def default_mtry(p: int) -> int:
    """Features per split: round(sqrt(p)), at least 1 (4 for p of 14-18)."""
    return max(1, round(math.sqrt(p)))


@dataclass
class ForestModel:
    """Trained forest stored as concatenated flat tree arrays."""

    n_classes: int
    n_trees: int
    m: int
    seed: int
    feature_names: tuple[str, ...]
    offsets: np.ndarray      # (n_trees + 1,) tree t owns nodes [offsets[t], offsets[t+1])
    feat: np.ndarray         # (total_nodes,) split feature, -1 for leaves
    thr: np.ndarray          # (total_nodes,) split threshold
    left: np.ndarray         # tree-local child ids
    right: np.ndarray
    pred: np.ndarray         # leaf majority class (1..c)
    counts: np.ndarray       # (total_nodes, n_classes) training counts
    importances: np.ndarray  # (p,) nonnegative, sums to 100 when any split exists

    @property
    def p(self) -> int:
        return len(self.feature_names)


def train_forest(
    data: FeatureMatrix,
    n_trees: int = DEFAULT_TREES,
    m: int | None = None,
    seed: int = 0,
    bootstrap: bool = True,
    n_threads: int | None = None,
) -> ForestModel:
    """Train a forest of n_trees CART trees on the labeled matrix."""
    if data.labels is None:
        raise ConfigError("training data has no labels")
    if n_trees < 1:
        raise ConfigError("n_trees must be >= 1")
    n, p = data.n, data.p
    if n_trees * n > 2**40:
        raise ConfigError(f"n_trees * n = {n_trees * n} exceeds the size guard")
    if m is None:
        m = default_mtry(p)
    if not 1 <= m <= p:
        raise ConfigError(f"m must be in [1, {p}], got {m}")
    if not np.all(np.isfinite(data.x)):
        raise ConfigError("training matrix must be finite (impute first)")

    x = np.ascontiguousarray(data.x)
    y = data.labels.astype(np.int64)
    n_classes = int(y.max())
    children = np.random.SeedSequence(seed).spawn(n_trees)

    def build(b: int):
        boot_ss, kern_ss = children[b].spawn(2)
        if bootstrap:
            sample = np.random.default_rng(boot_ss).integers(
                0, n, size=n, dtype=np.int64
            )
        else:
            sample = np.arange(n, dtype=np.int64)
        cap = 2 * n
        feat = np.empty(cap, dtype=np.int64)
        thr = np.empty(cap, dtype=np.float64)
        left = np.empty(cap, dtype=np.int64)
        right = np.empty(cap, dtype=np.int64)
        pred = np.empty(cap, dtype=np.int64)
        cts = np.empty((cap, n_classes), dtype=np.int64)
        imp = np.zeros(p, dtype=np.float64)
        kseed = kern_ss.generate_state(1, np.uint64)[0]
        n_nodes = grow_tree_flat(
            x, y, sample, n_classes, m, kseed,
            feat, thr, left, right, pred, cts, imp,
        )
        return (
            feat[:n_nodes].copy(),
            thr[:n_nodes].copy(),
            left[:n_nodes].copy(),
            right[:n_nodes].copy(),
            pred[:n_nodes].copy(),
            cts[:n_nodes].copy(),
            imp,
        )

    if n_threads is None:
        n_threads = min(32, os.cpu_count() or 1)
    if n_threads > 1 and n_trees > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(build, range(n_trees)))
    else:
        results = [build(b) for b in range(n_trees)]

    sizes = np.array([len(r[0]) for r in results], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    imp_mean = np.mean([r[6] for r in results], axis=0)
    total = imp_mean.sum()
    importances = imp_mean * (100.0 / total) if total > 0 else imp_mean

    return ForestModel(
        n_classes=n_classes,
        n_trees=n_trees,
        m=m,
        seed=seed,
        feature_names=data.feature_names,
        offsets=offsets,
        feat=np.concatenate([r[0] for r in results]),
        thr=np.concatenate([r[1] for r in results]),
        left=np.concatenate([r[2] for r in results]),
        right=np.concatenate([r[3] for r in results]),
        pred=np.concatenate([r[4] for r in results]),
        counts=np.vstack([r[5] for r in results]),
        importances=importances,
    )


def predict_forest(model: ForestModel, x):
    """Majority vote over trees.

    1-D input: (class, per-class vote fractions). 2-D input: (classes,
    fractions matrix). Vote ties go to the lowest class index.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != model.p:
        raise ConfigError(
            f"input has {x.shape[-1]} features, model expects {model.p}"
        )
    votes = forest_votes(
        np.ascontiguousarray(x),
        model.feat, model.thr, model.left, model.right, model.pred,
        model.offsets, model.n_classes,
    )
    probs = votes / model.n_trees
    classes = np.argmax(votes, axis=1) + 1
    if single:
        return int(classes[0]), probs[0]
    return classes, probs


def importance_ranking(model: ForestModel):
    """(name, importance) pairs sorted by decreasing importance."""
    order = np.argsort(model.importances)[::-1]
    return [(model.feature_names[i], float(model.importances[i])) for i in order]


def _tree_records(model: ForestModel, t: int) -> dict:
    lo, hi = model.offsets[t], model.offsets[t + 1]
    recs = []
    for i in range(lo, hi):
        rec = {"counts": [int(c) for c in model.counts[i]]}
        if model.feat[i] >= 0:
            rec["feature"] = int(model.feat[i])
            rec["threshold"] = float(model.thr[i])
        recs.append(rec)
    for i in range(lo, hi):
        if model.feat[i] >= 0:
            recs[i - lo]["left"] = recs[model.left[i]]
            recs[i - lo]["right"] = recs[model.right[i]]
    return recs[0]


def forest_to_json(model: ForestModel) -> dict:
    return {
        "format": FOREST_FORMAT,
        "n_classes": model.n_classes,
        "n_trees": model.n_trees,
        "m": model.m,
        "seed": model.seed,
        "feature_names": list(model.feature_names),
        "importances": [float(v) for v in model.importances],
        "trees": [_tree_records(model, t) for t in range(model.n_trees)],
    }


def _flatten_tree(root: dict, n_classes: int):
    feat, thr, left, right, pred, counts = [], [], [], [], [], []
    stack = [(root, 0)]
    feat.append(-1)
    thr.append(0.0)
    left.append(-1)
    right.append(-1)
    pred.append(0)
    counts.append(None)
    while stack:
        rec, i = stack.pop()
        c = np.asarray(rec["counts"], dtype=np.int64)
        if len(c) != n_classes:
            raise FormatError("tree record counts length mismatch")
        counts[i] = c
        pred[i] = int(np.argmax(c)) + 1
        if "feature" in rec:
            li, ri = len(feat), len(feat) + 1
            feat[i] = int(rec["feature"])
            thr[i] = float(rec["threshold"])
            left[i] = li
            right[i] = ri
            for _ in range(2):
                feat.append(-1)
                thr.append(0.0)
                left.append(-1)
                right.append(-1)
                pred.append(0)
                counts.append(None)
            stack.append((rec["right"], ri))
            stack.append((rec["left"], li))
    return (
        np.asarray(feat, dtype=np.int64),
        np.asarray(thr, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(pred, dtype=np.int64),
        np.vstack(counts),
    )


def forest_from_json(doc: dict) -> ForestModel:
    if doc.get("format") != FOREST_FORMAT:
        raise FormatError(f"unsupported forest format {doc.get('format')!r}")
    n_classes = int(doc["n_classes"])
    parts = [_flatten_tree(t, n_classes) for t in doc["trees"]]
    sizes = np.array([len(p_[0]) for p_ in parts], dtype=np.int64)
    return ForestModel(
        n_classes=n_classes,
        n_trees=int(doc["n_trees"]),
        m=int(doc["m"]),
        seed=int(doc["seed"]),
        feature_names=tuple(doc["feature_names"]),
        offsets=np.concatenate([[0], np.cumsum(sizes)]),
        feat=np.concatenate([p_[0] for p_ in parts]),
        thr=np.concatenate([p_[1] for p_ in parts]),
        left=np.concatenate([p_[2] for p_ in parts]),
        right=np.concatenate([p_[3] for p_ in parts]),
        pred=np.concatenate([p_[4] for p_ in parts]),
        counts=np.vstack([p_[5] for p_ in parts]),
        importances=np.asarray(doc["importances"], dtype=np.float64),
    )


def save_forest(path, model: ForestModel) -> None:
    doc = forest_to_json(model)
    limit = sys.getrecursionlimit()
    try:
        # deep trees nest deeply; json.dump recurses per level
        sys.setrecursionlimit(max(limit, int(model.offsets[-1]) * 2 + 1000))
        with open(path, "w") as fh:
            json.dump(doc, fh)
    finally:
        sys.setrecursionlimit(limit)


def load_forest(path) -> ForestModel:
    with open(path) as fh:
        return forest_from_json(json.load(fh))
