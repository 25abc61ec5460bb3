"""Classify network collections from small vectors of structural features.

The package covers the full path from raw graphs to evaluated
classifiers: feature extraction for unipartite and thresholded bipartite
networks, from-scratch random forests / k-nearest-neighbors / k-means,
cross-validation and parity-split evaluation, degree-distribution
fitting, snowball and attribute subsampling with a permutation test for
the sampling-design effect, and a synthetic daily-network generator for
end-to-end runs without external data.
"""

__version__ = "0.1.0"

from .bipartite import (
    MomentPair,
    ThresholdedBipartite,
    bio_feature_vector,
    bipartite_avg_degree,
    bipartite_clustering,
    closeness_stats,
    closeness_values,
    node_redundancy_stats,
    project,
    threshold_collection,
)
from .errors import ConfigError, DataError, FormatError, ParseError
from .evaluate import (
    ClassifierConfig,
    CVResult,
    SplitResult,
    classifier_predict,
    confusion_matrix,
    cross_validate,
    evaluate_split,
    fit_classifier,
    majority_rate,
    redundant_features,
    split_by_parity,
    stratified_folds,
)
from .features import (
    DistributionSummary,
    FeatureVector,
    attribute_features,
    avg_degree,
    avg_local_clustering,
    benchmark6_vector,
    cdr_vector,
    degree_assortativity,
    distribution_pca_features,
    distribution_summary,
    global_clustering,
    local_clustering_values,
    num_edges,
    num_nodes,
    num_triangles,
)
from .forest import (
    ForestModel,
    default_mtry,
    forest_from_json,
    forest_to_json,
    importance_ranking,
    load_forest,
    predict_forest,
    save_forest,
    train_forest,
)
from .graph import (
    BipartiteWeightedGraph,
    Graph,
    GraphCollection,
    NodeAttr,
    load_bipartite_matrix,
    load_edge_list,
    load_node_attributes,
    load_tu_benchmark,
    write_edge_list,
    write_node_attributes,
)
from .kmeans import KMeansModel, kmeans, kmeans_assign
from .matrix import (
    FeatureMatrix,
    column_medians,
    from_vectors,
    impute,
    read_features_csv,
    standardize_apply,
    standardize_fit,
    write_features_csv,
)
from .neighbors import knn_predict, knn_predict_batch
from .pca import PCAModel, pca_fit, pca_transform
from .pipeline import (
    build_benchmark6_matrix,
    build_bio_matrix,
    build_cdr_matrix,
    build_feature_matrix,
)
from .sampling import Subsample, attribute_subsample, induce, qualifying_zips, snowball
from .stats import (
    LadFit,
    LognormalFit,
    fit_lad,
    fit_lognormal,
    kolmogorov_sf,
    ks_two_sample,
    lognormal_pdf,
    permutation_test_beta2,
    permute_binned,
)
from .study import StudyConfig, StudyResult, run_subsampling_study
from .synth import RegimeParams, SynthConfig, SyntheticCdr, generate_synthetic_cdr
from .tree import TreeNode, gini_split, grow_tree, predict_tree

__all__ = [name for name in dir() if not name.startswith("_")]
