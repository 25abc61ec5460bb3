"""Structural and attribute features of unipartite graphs.

Feature conventions used throughout:

* node counts exclude degree-0 nodes (they are kept in storage only);
* degenerate degree assortativity (zero endpoint-degree variance)
  evaluates to 0 and is reported through a flag so matrices stay finite;
* average local clustering runs over nodes of degree >= 1, with
  degree-1 nodes contributing 0;
* attribute fractions count only pairs where both endpoints are known,
  an empty denominator yields NaN (imputed later at matrix assembly).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .graph import Graph, GraphCollection

BENCHMARK6_FEATURES = (
    "NumNodes",
    "NumEdges",
    "AvgDeg",
    "DegAssort",
    "NumTri",
    "ClustCoef",
)

CDR_BASE_FEATURES = (
    "NumNodes",
    "NumEdges",
    "NumTri",
    "ClustCoef",
    "DegAssort",
    "AvgDeg",
    "FracF",
    "FracMF",
    "AvgAgeDif",
    "FracSameZip",
)


@dataclass
class FeatureVector:
    """Named feature values for one graph; NaN marks a missing value."""

    graph_id: str
    names: tuple[str, ...]
    values: np.ndarray
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.names) != len(self.values):
            raise ConfigError("names and values length mismatch")
        if len(set(self.names)) != len(self.names):
            raise ConfigError("feature names must be unique")


@dataclass
class DistributionSummary:
    """Normalized histogram of a per-node quantity."""

    bin_edges: np.ndarray
    bin_probabilities: np.ndarray

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=np.float64)
        self.bin_probabilities = np.asarray(self.bin_probabilities, dtype=np.float64)
        if len(self.bin_probabilities) != len(self.bin_edges) - 1:
            raise ConfigError("need exactly one probability per bin")
        total = self.bin_probabilities.sum()
        if total > 0 and abs(total - 1.0) > 1e-9:
            raise ConfigError("bin probabilities must sum to 1")


class Assortativity(NamedTuple):
    value: float
    degenerate: bool


# -- scalar features ---------------------------------------------------------


def num_nodes(g: Graph) -> float:
    """Node count excluding degree-0 nodes."""
    return float(np.count_nonzero(g.degrees()))


def num_edges(g: Graph) -> float:
    return float(g.n_edges)


def avg_degree(g: Graph) -> float:
    """2|E| / |nodes with degree >= 1|; 0 for an edgeless graph."""
    n = num_nodes(g)
    return 2.0 * g.n_edges / n if n else 0.0


def _triangles_per_node(g: Graph) -> np.ndarray:
    if g.n_edges == 0:
        return np.zeros(g.n_stored, dtype=np.float64)
    a = g.adjacency_sparse()
    paths2 = (a @ a).multiply(a)
    return np.asarray(paths2.sum(axis=1)).ravel() / 2.0


def num_triangles(g: Graph) -> float:
    """Triangle count, each counted once per node triple."""
    return float(round(_triangles_per_node(g).sum() / 3.0))


def wedge_count(g: Graph) -> float:
    """Number of length-2 paths: sum over nodes of C(deg, 2)."""
    d = g.degrees().astype(np.float64)
    return float((d * (d - 1.0)).sum() / 2.0)


def global_clustering(g: Graph) -> float:
    """Transitivity: 3 * triangles / wedges; 0 when there are no wedges."""
    w = wedge_count(g)
    if w == 0:
        return 0.0
    return 3.0 * num_triangles(g) / w


def local_clustering_values(g: Graph, include_isolated=False) -> np.ndarray:
    """Per-node local clustering; nodes of degree < 2 score 0.

    By default restricted to nodes of degree >= 1 (matching the node-count
    convention); pass ``include_isolated=True`` for all stored nodes.
    """
    d = g.degrees().astype(np.float64)
    tri = _triangles_per_node(g)
    pairs = d * (d - 1.0) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(pairs > 0, tri / np.where(pairs > 0, pairs, 1.0), 0.0)
    if include_isolated:
        return c
    return c[d > 0]


def avg_local_clustering(g: Graph) -> float:
    """Mean local clustering over degree >= 1 nodes; 0 for empty graphs."""
    vals = local_clustering_values(g)
    return float(vals.mean()) if len(vals) else 0.0


def degree_assortativity(g: Graph) -> Assortativity:
    """Pearson correlation of degrees across edge endpoints (both
    orientations). Returns 0 with ``degenerate=True`` when the endpoint
    degrees have zero variance (e.g. regular graphs) or the graph has no
    edges.
    """
    if g.n_edges == 0:
        return Assortativity(0.0, True)
    d = g.degrees().astype(np.float64)
    du = d[g.edges[:, 0]]
    dv = d[g.edges[:, 1]]
    x = np.concatenate([du, dv])
    y = np.concatenate([dv, du])
    if np.all(x == x[0]):
        return Assortativity(0.0, True)
    mx = x.mean()
    my = y.mean()
    cov = np.mean(x * y) - mx * my
    sx = np.sqrt(np.mean(x * x) - mx * mx)
    sy = np.sqrt(np.mean(y * y) - my * my)
    return Assortativity(float(cov / (sx * sy)), False)


# -- attribute features ------------------------------------------------------

ATTRIBUTE_FEATURES = ("FracF", "FracMF", "AvgAgeDif", "FracSameZip")


def attribute_features(g: Graph) -> dict[str, float]:
    """Sex/age/zip features of Table-style CDR vectors.

    Unknown values never contribute; a feature whose denominator is empty
    comes back as NaN.
    """
    degrees = g.degrees()
    n_female = 0
    n_sex_known = 0
    for nid, a in g.attributes.items():
        i = g.index.get(nid)
        if i is None or degrees[i] == 0 or a.sex == "unknown":
            continue
        n_sex_known += 1
        if a.sex == "female":
            n_female += 1

    mf = both_sex = 0
    age_sum = 0.0
    both_age = 0
    same_zip = both_zip = 0
    ids = g.node_ids
    for u, v in g.edges:
        au = g.attributes.get(ids[u])
        av = g.attributes.get(ids[v])
        if au is None or av is None:
            continue
        if au.sex != "unknown" and av.sex != "unknown":
            both_sex += 1
            if au.sex != av.sex:
                mf += 1
        if au.age is not None and av.age is not None:
            both_age += 1
            age_sum += abs(au.age - av.age)
        if au.zip is not None and av.zip is not None:
            both_zip += 1
            if au.zip == av.zip:
                same_zip += 1

    nan = float("nan")
    return {
        "FracF": n_female / n_sex_known if n_sex_known else nan,
        "FracMF": mf / both_sex if both_sex else nan,
        "AvgAgeDif": age_sum / both_age if both_age else nan,
        "FracSameZip": same_zip / both_zip if both_zip else nan,
    }


# -- distribution features ---------------------------------------------------


def pooled_bin_edges(samples, n_bins: int) -> np.ndarray:
    """Equal-width bins spanning the pooled min-max of all samples."""
    if n_bins < 2:
        raise ConfigError("n_bins must be >= 2")
    pooled = np.concatenate([np.asarray(s, dtype=np.float64) for s in samples])
    pooled = pooled[np.isfinite(pooled)]
    if len(pooled) == 0:
        lo, hi = 0.0, 1.0
    else:
        lo, hi = float(pooled.min()), float(pooled.max())
    if lo == hi:  # all values identical: widen so the histogram is defined
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, n_bins + 1)


def distribution_summary(values, bin_edges) -> DistributionSummary:
    """Histogram of ``values`` normalized to bin probabilities."""
    values = np.asarray(values, dtype=np.float64)
    counts, _ = np.histogram(values, bins=bin_edges)
    total = counts.sum()
    probs = counts / total if total else counts.astype(np.float64)
    return DistributionSummary(bin_edges=bin_edges, bin_probabilities=probs)


def _node_quantity(g: Graph, quantity: str) -> np.ndarray:
    if quantity == "degree":
        d = g.degrees()
        return d[d > 0].astype(np.float64)
    if quantity == "local_clustering":
        return local_clustering_values(g)
    raise ConfigError(f"unknown distribution quantity {quantity!r}")


def distribution_histogram_matrix(graphs, quantity: str, n_bins: int = 50):
    """Per-graph histogram rows over shared pooled bin edges."""
    samples = [_node_quantity(g, quantity) for g in graphs]
    edges = pooled_bin_edges(samples, n_bins)
    rows = np.vstack(
        [distribution_summary(s, edges).bin_probabilities for s in samples]
    )
    return edges, rows


def distribution_pca_features(
    collection: GraphCollection,
    quantity: str,
    n_components: int = 4,
    n_bins: int = 50,
):
    """Principal-component scores of per-graph histograms.

    Returns ``(names, scores)`` where scores is (n_graphs, n_components).
    Bins are shared across the collection so the scores live in a common
    coordinate system.
    """
    from .pca import pca_fit, pca_transform

    if not len(collection.graphs):
        raise ConfigError("collection is empty")
    if n_components > n_bins:
        raise ConfigError("n_components must be <= n_bins")
    _, rows = distribution_histogram_matrix(collection.graphs, quantity, n_bins)
    model = pca_fit(rows, n_components)
    scores = pca_transform(model, rows)
    prefix = "DegPC" if quantity == "degree" else "ClusPC"
    names = tuple(f"{prefix}{i + 1}" for i in range(n_components))
    return names, scores


def heatmap_intensity(counts) -> np.ndarray:
    """Rescale a nonnegative count matrix to (x / max)^4 intensities."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size and counts.min() < 0:
        raise ConfigError("counts must be nonnegative")
    m = counts.max() if counts.size else 0.0
    if m == 0:
        return np.zeros_like(counts)
    return (counts / m) ** 4


def edge_age_counts(g: Graph, max_age: int = 100) -> np.ndarray:
    """Symmetric (age x age) edge count matrix over edges with known ages."""
    out = np.zeros((max_age + 1, max_age + 1), dtype=np.float64)
    ids = g.node_ids
    for u, v in g.edges:
        au = g.attributes.get(ids[u])
        av = g.attributes.get(ids[v])
        if au is None or av is None or au.age is None or av.age is None:
            continue
        i = min(au.age, max_age)
        j = min(av.age, max_age)
        out[i, j] += 1
        if i != j:
            out[j, i] += 1
    return out


# -- feature vectors ---------------------------------------------------------


def benchmark6_vector(g: Graph, graph_id: str = "") -> FeatureVector:
    """The six structural features used for collection benchmarks."""
    assort = degree_assortativity(g)
    values = [
        num_nodes(g),
        num_edges(g),
        avg_degree(g),
        assort.value,
        num_triangles(g),
        global_clustering(g),
    ]
    flags = ("DegAssort:degenerate",) if assort.degenerate else ()
    return FeatureVector(
        graph_id=graph_id, names=BENCHMARK6_FEATURES, values=values, flags=flags
    )


def cdr_vector(g: Graph, graph_id: str = "", warn_missing=True) -> FeatureVector:
    """The ten non-PCA features of the daily-network feature table."""
    assort = degree_assortativity(g)
    attr = attribute_features(g)
    flags = []
    if assort.degenerate:
        flags.append("DegAssort:degenerate")
    missing = [k for k in ATTRIBUTE_FEATURES if np.isnan(attr[k])]
    if missing:
        flags.extend(f"{k}:missing" for k in missing)
        if warn_missing:
            warnings.warn(
                f"graph {graph_id or '<unnamed>'}: attribute features "
                f"{missing} missing (no known attribute pairs)",
                stacklevel=2,
            )
    values = [
        num_nodes(g),
        num_edges(g),
        num_triangles(g),
        global_clustering(g),
        assort.value,
        avg_degree(g),
        attr["FracF"],
        attr["FracMF"],
        attr["AvgAgeDif"],
        attr["FracSameZip"],
    ]
    return FeatureVector(
        graph_id=graph_id,
        names=CDR_BASE_FEATURES,
        values=values,
        flags=tuple(flags),
    )
