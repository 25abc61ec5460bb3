"""Classification trees (CART with multiclass Gini impurity).

This is the readable reference implementation; forests train through a
compiled kernel that reproduces the exact same split arithmetic (see
_forest_fast). Split semantics:

* region x_ij < s goes left, x_ij >= s goes right;
* candidate thresholds are midpoints of consecutive distinct sorted values;
* the chosen split minimizes the size-weighted sum of per-child Gini
  impurities, requiring a strict decrease below the parent impurity;
* ties break to the lowest feature index, then the lowest threshold;
* leaves store class counts; their vote is the majority class, ties to
  the lowest class index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class TreeNode:
    """Split node (feature >= 0) or leaf (feature == -1)."""

    counts: np.ndarray  # training class counts in this region, index 0 = class 1
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    @property
    def prediction(self) -> int:
        # first argmax = lowest class index on vote ties
        return int(np.argmax(self.counts)) + 1


def _class_counts(y: np.ndarray, n_classes: int) -> np.ndarray:
    return np.bincount(y, minlength=n_classes + 1)[1:]


def _region_score(counts: np.ndarray) -> float:
    """n * Gini impurity, written as n - (sum of squared counts) / n."""
    n = int(counts.sum())
    if n == 0:
        return 0.0
    ss = int((counts.astype(np.int64) ** 2).sum())
    return n - ss / n


def gini_split(x, y, candidate_features, n_classes: int):
    """Best (feature, threshold) over the candidates, or None.

    None when the region is pure, has fewer than 2 points, or no threshold
    strictly reduces the size-weighted impurity.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = len(y)
    if n < 2:
        return None
    parent = _region_score(_class_counts(y, n_classes))
    best_score = parent
    best = None
    for j in sorted(candidate_features):
        vals = x[:, j]
        distinct = np.unique(vals)
        if len(distinct) < 2:
            continue
        for a, b in zip(distinct[:-1], distinct[1:]):
            s = (a + b) / 2.0
            if not a < s:  # midpoint of adjacent floats can round down
                continue
            mask = vals < s
            nl = int(mask.sum())
            nr = n - nl
            ssl = int((_class_counts(y[mask], n_classes).astype(np.int64) ** 2).sum())
            ssr = int((_class_counts(y[~mask], n_classes).astype(np.int64) ** 2).sum())
            score = (nl - ssl / nl) + (nr - ssr / nr)
            if score < best_score:
                best_score = score
                best = (int(j), float(s))
    return best


def grow_tree(x, y, m: int, rng, n_classes: int | None = None) -> TreeNode:
    """Grow a tree, drawing a fresh random m-subset of features per split.

    A branch stops when pure, down to one point, or when no candidate
    split reduces impurity. With m = p every feature is always a
    candidate and growth is fully deterministic.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or len(y) != x.shape[0]:
        raise ConfigError("x and y shapes do not match")
    if len(y) < 1:
        raise ConfigError("need at least one training point")
    p = x.shape[1]
    if not 1 <= m <= p:
        raise ConfigError(f"m must be in [1, {p}], got {m}")
    if n_classes is None:
        n_classes = int(y.max())
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)

    def build(idx: np.ndarray) -> TreeNode:
        yy = y[idx]
        counts = _class_counts(yy, n_classes)
        if len(idx) == 1 or np.count_nonzero(counts) <= 1:
            return TreeNode(counts=counts)
        cand = np.arange(p) if m >= p else rng.choice(p, size=m, replace=False)
        split = gini_split(x[idx], yy, cand, n_classes)
        if split is None:
            return TreeNode(counts=counts)
        j, s = split
        mask = x[idx, j] < s
        return TreeNode(
            counts=counts,
            feature=j,
            threshold=s,
            left=build(idx[mask]),
            right=build(idx[~mask]),
        )

    return build(np.arange(len(y)))


def predict_tree(node: TreeNode, row) -> int:
    row = np.asarray(row, dtype=np.float64)
    while not node.is_leaf:
        node = node.left if row[node.feature] < node.threshold else node.right
    return node.prediction


def tree_to_record(node: TreeNode) -> dict:
    """Nested split/leaf dictionaries for JSON serialization."""
    rec = {"counts": [int(c) for c in node.counts]}
    if not node.is_leaf:
        rec["feature"] = int(node.feature)
        rec["threshold"] = float(node.threshold)
        rec["left"] = tree_to_record(node.left)
        rec["right"] = tree_to_record(node.right)
    return rec


def tree_from_record(rec: dict) -> TreeNode:
    counts = np.asarray(rec["counts"], dtype=np.int64)
    if "feature" not in rec:
        return TreeNode(counts=counts)
    return TreeNode(
        counts=counts,
        feature=int(rec["feature"]),
        threshold=float(rec["threshold"]),
        left=tree_from_record(rec["left"]),
        right=tree_from_record(rec["right"]),
    )
