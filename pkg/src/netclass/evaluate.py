"""Training/evaluation protocols shared by the CLI and the studies.

Classifiers are driven through one config type: random forests on raw
features, KNN and k-means on features z-scored with training-set
statistics. Evaluation is either stratified k-fold cross-validation or
an odd/even positional split (train on the 1st, 3rd, ... items). Median
imputation always uses training-set medians only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .forest import DEFAULT_TREES, ForestModel, predict_forest, train_forest
from .kmeans import KMeansModel, kmeans, kmeans_assign
from .matrix import (
    FeatureMatrix,
    column_medians,
    impute,
    standardize_apply,
    standardize_fit,
)
from .neighbors import knn_predict_batch

CLASSIFIER_KINDS = ("rf", "knn", "kmeans")


@dataclass
class ClassifierConfig:
    kind: str = "rf"
    n_trees: int = DEFAULT_TREES
    m: int | None = None          # features per split; default round(sqrt(p))
    bootstrap: bool = True
    k: int = 5                    # neighbors for knn
    n_clusters: int | None = None  # kmeans; defaults to the class count
    n_restarts: int = 10
    n_threads: int | None = None

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise ConfigError(
                f"classifier must be one of {CLASSIFIER_KINDS}, got {self.kind!r}"
            )


@dataclass
class FittedClassifier:
    config: ClassifierConfig
    n_classes: int
    forest: ForestModel | None = None
    scaler: tuple | None = None           # (mean, sd) for knn/kmeans
    train_x: np.ndarray | None = None     # standardized training rows (knn)
    train_y: np.ndarray | None = None
    km: KMeansModel | None = None
    cluster_labels: np.ndarray | None = None  # cluster id -> class


def fit_classifier(
    config: ClassifierConfig, train: FeatureMatrix, seed: int = 0
) -> FittedClassifier:
    if train.labels is None:
        raise ConfigError("training data has no labels")
    n_classes = train.n_classes
    if config.kind == "rf":
        model = train_forest(
            train,
            n_trees=config.n_trees,
            m=config.m,
            seed=seed,
            bootstrap=config.bootstrap,
            n_threads=config.n_threads,
        )
        return FittedClassifier(config=config, n_classes=n_classes, forest=model)

    mean, sd = standardize_fit(train.x)
    z = standardize_apply(train.x, mean, sd)
    if config.kind == "knn":
        if not 1 <= config.k <= train.n:
            raise ConfigError(f"k must be in [1, {train.n}], got {config.k}")
        return FittedClassifier(
            config=config,
            n_classes=n_classes,
            scaler=(mean, sd),
            train_x=z,
            train_y=train.labels.copy(),
        )

    # k-means used as a classifier: clusters take their majority training label
    n_clusters = config.n_clusters or n_classes
    km = kmeans(z, k=n_clusters, n_restarts=config.n_restarts, seed=seed)
    cluster_labels = np.empty(n_clusters, dtype=np.int64)
    global_majority = int(np.argmax(np.bincount(train.labels)[1:])) + 1
    for c in range(n_clusters):
        members = train.labels[km.assignments == c]
        if len(members):
            cluster_labels[c] = int(np.argmax(np.bincount(members)[1:])) + 1
        else:
            cluster_labels[c] = global_majority
    return FittedClassifier(
        config=config,
        n_classes=n_classes,
        scaler=(mean, sd),
        km=km,
        cluster_labels=cluster_labels,
    )


def classifier_predict(fitted: FittedClassifier, x) -> tuple[np.ndarray, np.ndarray]:
    """Predicted classes and per-class probability rows (rows sum to 1)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    cfg = fitted.config
    if cfg.kind == "rf":
        return predict_forest(fitted.forest, x)
    mean, sd = fitted.scaler
    z = standardize_apply(x, mean, sd)
    c = fitted.n_classes
    if cfg.kind == "knn":
        preds = knn_predict_batch(fitted.train_x, fitted.train_y, z, cfg.k)
        # vote fractions among the k nearest, for reporting
        d2 = (
            (z * z).sum(axis=1)[:, None]
            - 2.0 * z @ fitted.train_x.T
            + (fitted.train_x * fitted.train_x).sum(axis=1)[None, :]
        )
        nearest = np.argsort(d2, axis=1, kind="stable")[:, : cfg.k]
        probs = np.zeros((len(z), c))
        for i in range(len(z)):
            votes = np.bincount(fitted.train_y[nearest[i]], minlength=c + 1)[1:]
            probs[i] = votes / cfg.k
        return preds, probs
    clusters = kmeans_assign(fitted.km, z)
    preds = fitted.cluster_labels[clusters]
    probs = np.zeros((len(z), c))
    probs[np.arange(len(z)), preds - 1] = 1.0
    return preds, probs


# -- protocols ----------------------------------------------------------------


def stratified_folds(labels, n_folds: int, seed: int = 0) -> list[np.ndarray]:
    """Shuffle each class and deal its members round-robin across folds."""
    labels = np.asarray(labels, dtype=np.int64)
    if n_folds < 2:
        raise ConfigError("need at least 2 folds")
    if n_folds > len(labels):
        raise ConfigError("more folds than observations")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    dealt = 0
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < n_folds:
            warnings.warn(
                f"class {cls} has {len(idx)} members for {n_folds} folds; "
                "some folds will lack it",
                stacklevel=2,
            )
        rng.shuffle(idx)
        for i, row in enumerate(idx):
            folds[(dealt + i) % n_folds].append(int(row))
        dealt += len(idx)
    return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """Counts with true classes as rows, predicted as columns (1..c)."""
    out = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p_ in zip(np.asarray(y_true), np.asarray(y_pred)):
        out[t - 1, p_ - 1] += 1
    return out


@dataclass
class CVResult:
    mean_accuracy: float
    sd: float                      # std deviation across folds (ddof=1)
    se: float                      # sd / sqrt(folds)
    fold_accuracies: list[float]
    predictions: np.ndarray        # held-out prediction for every row
    probabilities: np.ndarray
    confusion: np.ndarray


def cross_validate(
    data: FeatureMatrix,
    config: ClassifierConfig,
    n_folds: int = 10,
    seed: int = 0,
) -> CVResult:
    if data.labels is None:
        raise ConfigError("cross-validation needs labels")
    folds = stratified_folds(data.labels, n_folds, seed)
    for i, f in enumerate(folds):
        if len(f) == 0:
            raise ConfigError(f"fold {i} has no test items")
    fold_seeds = [
        int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n_folds)
    ]
    n_classes = data.n_classes
    predictions = np.zeros(data.n, dtype=np.int64)
    probabilities = np.zeros((data.n, n_classes))
    accs = []
    for i, test_idx in enumerate(folds):
        train_idx = np.setdiff1d(np.arange(data.n), test_idx)
        train = data.take(train_idx)
        test = data.take(test_idx)
        med = column_medians(train)
        train = impute(train, med)
        test = impute(test, med)
        fitted = fit_classifier(config, train, seed=fold_seeds[i])
        preds, probs = classifier_predict(fitted, test.x)
        predictions[test_idx] = preds
        probabilities[test_idx] = probs
        accs.append(float(np.mean(preds == test.labels)))
    accs_arr = np.asarray(accs)
    sd = float(accs_arr.std(ddof=1)) if n_folds > 1 else 0.0
    return CVResult(
        mean_accuracy=float(accs_arr.mean()),
        sd=sd,
        se=sd / np.sqrt(n_folds),
        fold_accuracies=accs,
        predictions=predictions,
        probabilities=probabilities,
        confusion=confusion_matrix(data.labels, predictions, n_classes),
    )


@dataclass
class SplitResult:
    accuracy: float
    misclassification_rate: float
    predictions: np.ndarray
    probabilities: np.ndarray
    confusion: np.ndarray
    test_ids: tuple[str, ...]


def split_by_parity(data: FeatureMatrix, exclude_ids=()) -> tuple[np.ndarray, np.ndarray]:
    """Train rows = odd 1-based positions after exclusions; test = even."""
    excluded = set(exclude_ids)
    kept = [i for i, rid in enumerate(data.row_ids) if rid not in excluded]
    train = np.asarray(kept[0::2], dtype=np.int64)
    test = np.asarray(kept[1::2], dtype=np.int64)
    if len(test) == 0:
        raise ConfigError("parity split produced an empty test set")
    return train, test


def evaluate_split(
    data: FeatureMatrix,
    config: ClassifierConfig,
    train_idx,
    test_idx,
    seed: int = 0,
) -> SplitResult:
    train = data.take(train_idx)
    test = data.take(test_idx)
    if train.labels is None or test.labels is None:
        raise ConfigError("evaluation needs labels")
    med = column_medians(train)
    train = impute(train, med)
    test = impute(test, med)
    if len(np.unique(train.labels)) == 1:
        warnings.warn("training set has a single class", stacklevel=2)
    fitted = fit_classifier(config, train, seed=seed)
    preds, probs = classifier_predict(fitted, test.x)
    acc = float(np.mean(preds == test.labels))
    return SplitResult(
        accuracy=acc,
        misclassification_rate=1.0 - acc,
        predictions=preds,
        probabilities=probs,
        confusion=confusion_matrix(test.labels, preds, data.n_classes),
        test_ids=test.row_ids,
    )


def majority_rate(labels) -> float:
    labels = np.asarray(labels, dtype=np.int64)
    return float(np.bincount(labels)[1:].max() / len(labels))


def redundant_features(data: FeatureMatrix, threshold: float = 0.9):
    """(feature, earlier feature, correlation) for |Pearson rho| > threshold."""
    x = data.x
    out = []
    with np.errstate(invalid="ignore"):
        corr = np.corrcoef(x, rowvar=False)
    for j in range(data.p):
        for i in range(j):
            rho = corr[i, j]
            if np.isfinite(rho) and abs(rho) > threshold:
                out.append((data.feature_names[j], data.feature_names[i], float(rho)))
                break
    return out
