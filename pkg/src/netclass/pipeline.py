"""Feature-set builders: graph collections in, labeled matrices out.

Three named feature sets with fixed column orders:

* benchmark6 - six structural features for collection benchmarks;
* cdr        - the 18 daily-network features (10 scalar/attribute
               features plus 4 degree-distribution and 4
               clustering-distribution principal components);
* bio        - the 14 bipartite/projection features per tumor sample.

Distribution principal components are collection-level coordinates:
histogram bins are pooled over the whole collection and the PCA is fit
on all rows before any train/test split, mirroring how the daily-network
study treats them (they describe the collection, not the classifier).
"""

from __future__ import annotations

import numpy as np

from .bipartite import ThresholdedBipartite, bio_feature_vector
from .errors import ConfigError
from .features import (
    CDR_BASE_FEATURES,
    benchmark6_vector,
    cdr_vector,
    distribution_pca_features,
)
from .graph import GraphCollection
from .matrix import FeatureMatrix, from_vectors

FEATURE_SETS = ("benchmark6", "cdr", "bio")

CDR_FEATURES = CDR_BASE_FEATURES + tuple(
    f"{prefix}{i}" for prefix in ("DegPC", "ClusPC") for i in (1, 2, 3, 4)
)


def build_benchmark6_matrix(collection: GraphCollection) -> FeatureMatrix:
    vectors = [
        benchmark6_vector(g, graph_id=gid)
        for g, gid in zip(collection.graphs, collection.ids)
    ]
    return from_vectors(vectors, labels=collection.labels)


def build_cdr_matrix(
    collection: GraphCollection,
    n_bins: int = 50,
    n_components: int = 4,
    warn_missing: bool = True,
) -> FeatureMatrix:
    vectors = [
        cdr_vector(g, graph_id=gid, warn_missing=warn_missing)
        for g, gid in zip(collection.graphs, collection.ids)
    ]
    base = from_vectors(vectors, labels=collection.labels)
    deg_names, deg_scores = distribution_pca_features(
        collection, "degree", n_components=n_components, n_bins=n_bins
    )
    clus_names, clus_scores = distribution_pca_features(
        collection, "local_clustering", n_components=n_components, n_bins=n_bins
    )
    return FeatureMatrix(
        x=np.hstack([base.x, deg_scores, clus_scores]),
        feature_names=base.feature_names + deg_names + clus_names,
        row_ids=base.row_ids,
        labels=base.labels,
    )


def build_bio_matrix(
    samples: list[ThresholdedBipartite], labels=None
) -> FeatureMatrix:
    vectors = [
        bio_feature_vector(tb, graph_id=tb.source or f"sample{i}")
        for i, tb in enumerate(samples)
    ]
    return from_vectors(vectors, labels=labels)


def build_feature_matrix(feature_set: str, data, **kw) -> FeatureMatrix:
    """Dispatch by feature-set name; bio expects thresholded bipartite input."""
    if feature_set == "benchmark6":
        return build_benchmark6_matrix(data, **kw)
    if feature_set == "cdr":
        return build_cdr_matrix(data, **kw)
    if feature_set == "bio":
        if isinstance(data, GraphCollection):
            raise ConfigError(
                "bio features need thresholded bipartite samples, "
                "not a unipartite collection"
            )
        return build_bio_matrix(data, **kw)
    raise ConfigError(f"feature set must be one of {FEATURE_SETS}, got {feature_set!r}")
