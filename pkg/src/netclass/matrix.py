"""Feature matrices: assembly from per-graph vectors, imputation, IO."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from .errors import ConfigError, FormatError
from .features import FeatureVector


@dataclass
class FeatureMatrix:
    """N observations by p named features, with optional 1..c labels."""

    x: np.ndarray
    feature_names: tuple[str, ...]
    row_ids: tuple[str, ...]
    labels: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 2:
            raise ConfigError("x must be 2-dimensional")
        if x.shape[0] < 1:
            raise ConfigError("need at least one row")
        if x.shape[1] != len(self.feature_names):
            raise ConfigError("feature_names length does not match columns")
        if len(self.row_ids) != x.shape[0]:
            raise ConfigError("row_ids length does not match rows")
        self.x = x
        self.feature_names = tuple(self.feature_names)
        self.row_ids = tuple(str(r) for r in self.row_ids)
        if self.labels is not None:
            y = np.asarray(self.labels, dtype=np.int64)
            if y.shape != (x.shape[0],):
                raise ConfigError("labels length does not match rows")
            if y.min(initial=1) < 1:
                raise ConfigError("labels must be positive integers")
            self.labels = y

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def n_classes(self) -> int:
        if self.labels is None:
            return 0
        return int(self.labels.max())

    def take(self, rows) -> "FeatureMatrix":
        rows = np.asarray(rows)
        return FeatureMatrix(
            x=self.x[rows],
            feature_names=self.feature_names,
            row_ids=tuple(self.row_ids[i] for i in rows),
            labels=None if self.labels is None else self.labels[rows],
        )

    def select_features(self, names) -> "FeatureMatrix":
        idx = []
        for name in names:
            if name not in self.feature_names:
                raise ConfigError(f"unknown feature {name!r}")
            idx.append(self.feature_names.index(name))
        return replace(
            self, x=self.x[:, idx].copy(), feature_names=tuple(names)
        )


def from_vectors(vectors: list[FeatureVector], labels=None) -> FeatureMatrix:
    """Stack per-graph FeatureVectors (identical name tuples) into a matrix."""
    if not vectors:
        raise ConfigError("need at least one feature vector")
    names = vectors[0].names
    for v in vectors[1:]:
        if v.names != names:
            raise FormatError(
                f"feature names of {v.graph_id!r} do not match the first vector"
            )
    x = np.vstack([v.values for v in vectors])
    return FeatureMatrix(
        x=x,
        feature_names=names,
        row_ids=tuple(v.graph_id for v in vectors),
        labels=labels,
    )


def column_medians(m: FeatureMatrix) -> np.ndarray:
    """Per-feature median ignoring NaN; all-NaN columns give 0."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN columns
        med = np.nanmedian(m.x, axis=0)
    return np.where(np.isnan(med), 0.0, med)


def impute(m: FeatureMatrix, medians=None) -> FeatureMatrix:
    """Replace NaN cells by per-feature medians.

    Pass training-set medians when imputing held-out data so no test
    information leaks into the fill values.
    """
    medians = column_medians(m) if medians is None else np.asarray(medians)
    if medians.shape != (m.p,):
        raise ConfigError("medians length does not match feature count")
    x = m.x.copy()
    nan_r, nan_c = np.nonzero(np.isnan(x))
    x[nan_r, nan_c] = medians[nan_c]
    if not np.all(np.isfinite(x)):
        raise ConfigError("matrix still non-finite after imputation")
    return replace(m, x=x)


def standardize_fit(x: np.ndarray):
    """Column means and standard deviations; zero spread maps to sd=1."""
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    sd = np.where(sd == 0, 1.0, sd)
    return mean, sd


def standardize_apply(x: np.ndarray, mean, sd) -> np.ndarray:
    return (np.asarray(x, dtype=np.float64) - mean) / sd


def write_features_csv(path, m: FeatureMatrix) -> None:
    """Write graph_id, optional label, then one column per feature."""
    frame = pd.DataFrame(m.x, columns=list(m.feature_names))
    frame.insert(0, "graph_id", list(m.row_ids))
    if m.labels is not None:
        frame.insert(1, "label", m.labels)
    frame.to_csv(path, index=False)


def read_features_csv(path) -> FeatureMatrix:
    """Inverse of write_features_csv."""
    frame = pd.read_csv(path, dtype={"graph_id": str})
    if "graph_id" not in frame.columns:
        raise FormatError(f"{path}: missing graph_id column")
    labels = None
    feature_cols = [c for c in frame.columns if c != "graph_id"]
    if "label" in frame.columns:
        labels = frame["label"].to_numpy(dtype=np.int64)
        feature_cols.remove("label")
    if not feature_cols:
        raise FormatError(f"{path}: no feature columns")
    return FeatureMatrix(
        x=frame[feature_cols].to_numpy(dtype=np.float64),
        feature_names=tuple(feature_cols),
        row_ids=tuple(frame["graph_id"].astype(str)),
        labels=labels,
    )
