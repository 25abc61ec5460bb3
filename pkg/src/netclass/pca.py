"""Principal component analysis via the sample covariance eigendecomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass
class PCAModel:
    mean: np.ndarray            # (p,) column means of the training data
    components: np.ndarray      # (n_components, p) rows are unit loadings
    explained_variance: np.ndarray  # (n_components,) eigenvalues, descending


def pca_fit(x, n_components: int) -> PCAModel:
    """Fit principal axes of ``x`` (n_samples, p).

    Components are eigenvectors of the sample covariance (ddof=1) sorted by
    descending eigenvalue. Sign convention: the largest-magnitude loading of
    each component is positive, so fits are reproducible across platforms.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ConfigError("x must be 2-dimensional")
    n, p = x.shape
    if not 1 <= n_components <= p:
        raise ConfigError(f"n_components must be in [1, {p}], got {n_components}")
    mean = x.mean(axis=0)
    xc = x - mean
    if n > 1:
        cov = (xc.T @ xc) / (n - 1)
    else:
        cov = np.zeros((p, p))
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.maximum(evals[order], 0.0)  # clip eigh round-off below zero
    evecs = evecs[:, order]
    comps = evecs[:, :n_components].T.copy()
    for row in comps:
        j = np.argmax(np.abs(row))
        if row[j] < 0:
            row *= -1.0
    return PCAModel(
        mean=mean,
        components=comps,
        explained_variance=evals[:n_components],
    )


def pca_transform(model: PCAModel, x) -> np.ndarray:
    """Project rows of ``x`` onto the fitted components."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.mean.shape[0]:
        raise ConfigError("x has wrong shape for this model")
    return (x - model.mean) @ model.components.T
