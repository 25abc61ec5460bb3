"""Bipartite-network thresholding, projections, and the tumor feature set.

A collection of weighted bipartite graphs over the same two partitions
(left, e.g. transcription factors; right, e.g. regulated genes) is turned
into binary networks by a per-edge cross-sample rank rule: a sample keeps
an edge iff its weight for that (left, right) pair is in the top
(1 - q/100) fraction across samples. Each binary network then yields a
14-value feature vector combining bipartite statistics with structural
features of its two unipartite projections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from numba import njit, prange

from .errors import ConfigError, FormatError
from .features import (
    FeatureVector,
    avg_degree,
    avg_local_clustering,
    degree_assortativity,
    num_triangles,
)
from .graph import BipartiteWeightedGraph, Graph

BIO_FEATURES = (
    "AvgDeg",
    "Bclus",
    "nrcM",
    "nrcV",
    "cctM",
    "cctV",
    "Gavgdeg",
    "Gtri",
    "Gclus",
    "Gassor",
    "Tavgdeg",
    "Ttri",
    "Tclus",
    "Tassor",
)

DEFAULT_THRESHOLD_PERCENTILE = 95.0


@dataclass
class ThresholdedBipartite:
    """Binary bipartite network produced by cross-sample thresholding."""

    left_ids: tuple[str, ...]
    right_ids: tuple[str, ...]
    edges: np.ndarray  # bool, |left| x |right|
    q: float = DEFAULT_THRESHOLD_PERCENTILE
    source: str = ""
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.left_ids = tuple(str(x) for x in self.left_ids)
        self.right_ids = tuple(str(x) for x in self.right_ids)
        e = np.asarray(self.edges, dtype=bool)
        if e.shape != (len(self.left_ids), len(self.right_ids)):
            raise FormatError(
                f"edge matrix shape {e.shape} does not match partitions "
                f"({len(self.left_ids)}, {len(self.right_ids)})"
            )
        e.setflags(write=False)
        self.edges = e

    @property
    def n_edges(self) -> int:
        return int(self.edges.sum())

    def left_degrees(self) -> np.ndarray:
        return self.edges.sum(axis=1)

    def right_degrees(self) -> np.ndarray:
        return self.edges.sum(axis=0)


class MomentPair(NamedTuple):
    mean: float
    variance: float
    degenerate: bool = False


def threshold_collection(
    samples: list[BipartiteWeightedGraph],
    q: float = DEFAULT_THRESHOLD_PERCENTILE,
) -> list[ThresholdedBipartite]:
    """Binarize each sample by the per-edge cross-sample rank rule.

    For every (left, right) pair the weights of all samples are ranked;
    a sample keeps the edge iff its weight is among the top
    ceil((1 - q/100) * n_samples) values for that pair (ties at the cutoff
    all kept) and is strictly positive. q=100 removes every edge; q=0
    keeps every positive-weight edge.
    """
    if not 0 <= q <= 100:
        raise ConfigError(f"q must be in [0, 100], got {q}")
    if not samples:
        return []
    left = samples[0].left_ids
    right = samples[0].right_ids
    for s in samples[1:]:
        if s.left_ids != left or s.right_ids != right:
            raise FormatError(
                f"sample {s.graph_id!r} partitions do not match the first sample"
            )
    n = len(samples)
    k = math.ceil((1.0 - q / 100.0) * n)
    stack = np.stack([s.weights for s in samples])  # (n, L, R)
    if k <= 0:
        keep = np.zeros_like(stack, dtype=bool)
    else:
        # cutoff = k-th largest weight per pair; >= keeps ties at the cutoff
        cutoff = np.sort(stack, axis=0)[n - k]
        keep = (stack >= cutoff) & (stack > 0)
    return [
        ThresholdedBipartite(
            left_ids=left,
            right_ids=right,
            edges=keep[i],
            q=q,
            source=samples[i].graph_id,
        )
        for i in range(n)
    ]


def project(tb: ThresholdedBipartite, side: str) -> Graph:
    """Unipartite shared-neighbor projection onto one partition.

    Two nodes of the chosen side are adjacent iff they have at least one
    common neighbor on the other side. All partition nodes are kept, so
    nodes with no shared neighbors appear isolated.
    """
    if side == "left":
        ids = tb.left_ids
        b = sp.csr_matrix(tb.edges.astype(np.float64))
    elif side == "right":
        ids = tb.right_ids
        b = sp.csr_matrix(tb.edges.T.astype(np.float64))
    else:
        raise ConfigError(f"side must be 'left' or 'right', got {side!r}")
    gram = (b @ b.T).tocoo()
    mask = (gram.row < gram.col) & (gram.data > 0)
    pairs = [(ids[i], ids[j]) for i, j in zip(gram.row[mask], gram.col[mask])]
    return Graph.from_edge_pairs(pairs, extra_nodes=ids)


def _same_side_overlap(b: sp.csr_matrix) -> sp.csr_matrix:
    """Counts of shared neighbors for every same-side node pair."""
    gram = (b @ b.T).tocsr()
    gram.eliminate_zeros()
    return gram


def _pairwise_cc_per_node(gram: sp.csr_matrix, degrees: np.ndarray) -> np.ndarray:
    """Mean neighborhood Jaccard overlap with second neighbors, per node."""
    n = gram.shape[0]
    out = np.zeros(n, dtype=np.float64)
    indptr, indices, data = gram.indptr, gram.indices, gram.data
    for v in range(n):
        idx = indices[indptr[v] : indptr[v + 1]]
        cnt = data[indptr[v] : indptr[v + 1]]
        keep = idx != v
        idx, cnt = idx[keep], cnt[keep]
        if len(idx) == 0:
            continue
        union = degrees[v] + degrees[idx] - cnt
        out[v] = float(np.mean(cnt / union))
    return out


def bipartite_clustering(tb: ThresholdedBipartite) -> float:
    """Mean pairwise clustering coefficient over all nodes of both sides.

    For node v, c(v) averages |N(u) & N(v)| / |N(u) | N(v)| over the
    second neighbors u != v (same side, sharing at least one neighbor);
    nodes without second neighbors contribute 0.
    """
    n_total = len(tb.left_ids) + len(tb.right_ids)
    if n_total == 0:
        return 0.0
    b = sp.csr_matrix(tb.edges.astype(np.float64))
    degl = tb.left_degrees().astype(np.float64)
    degr = tb.right_degrees().astype(np.float64)
    cc_left = _pairwise_cc_per_node(_same_side_overlap(b), degl)
    cc_right = _pairwise_cc_per_node(_same_side_overlap(b.T.tocsr()), degr)
    return float((cc_left.sum() + cc_right.sum()) / n_total)


def _redundancy_values(b: sp.csr_matrix, opp_gram: sp.csr_matrix) -> list[float]:
    vals = []
    indptr, indices = b.indptr, b.indices
    for v in range(b.shape[0]):
        ns = indices[indptr[v] : indptr[v + 1]]
        if len(ns) < 2:
            continue
        sub = opp_gram[ns][:, ns].toarray()
        iu = np.triu_indices(len(ns), k=1)
        # neighbors u,w of v always share v itself; redundancy needs one more
        vals.append(float(np.mean(sub[iu] >= 2)))
    return vals


def node_redundancy_stats(tb: ThresholdedBipartite) -> MomentPair:
    """Mean and population variance of node redundancy.

    Redundancy of a node v (degree >= 2) is the fraction of its neighbor
    pairs that share a common neighbor other than v. Degenerate when no
    node qualifies.
    """
    b = sp.csr_matrix(tb.edges.astype(np.float64))
    bt = b.T.tocsr()
    gram_right = _same_side_overlap(bt)  # shared-left counts, right pairs
    gram_left = _same_side_overlap(b)
    vals = _redundancy_values(b, gram_right) + _redundancy_values(bt, gram_left)
    if not vals:
        return MomentPair(0.0, 0.0, degenerate=True)
    arr = np.asarray(vals)
    return MomentPair(float(arr.mean()), float(arr.var()), False)


@njit(cache=True, parallel=True)
def _bfs_closeness(indptr, indices, n):  # pragma: no cover - exercised via wrapper
    out = np.zeros(n, dtype=np.float64)
    for s in prange(n):
        dist = np.full(n, -1, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        total = 0
        reached = 1
        while head < tail:
            u = queue[head]
            head += 1
            for p in range(indptr[u], indptr[u + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    total += dist[w]
                    reached += 1
                    queue[tail] = w
                    tail += 1
        if reached > 1:
            r1 = reached - 1.0
            out[s] = (r1 / (n - 1.0)) * (r1 / total)
    return out


def closeness_values(tb: ThresholdedBipartite) -> np.ndarray:
    """Closeness centrality of every node (left block first, then right).

    Component-normalized: ((r-1)/(n-1)) * ((r-1)/sum of BFS distances),
    where r counts the node's reachable set including itself and n is the
    total number of stored nodes. Isolated nodes score 0.
    """
    nl, nr = len(tb.left_ids), len(tb.right_ids)
    n = nl + nr
    if n == 0:
        return np.zeros(0, dtype=np.float64)
    li, ri = np.nonzero(tb.edges)
    rows = np.concatenate([li, ri + nl])
    cols = np.concatenate([ri + nl, li])
    adj = sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(n, n), dtype=np.float64
    )
    return _bfs_closeness(
        adj.indptr.astype(np.int64), adj.indices.astype(np.int64), n
    )


def closeness_stats(tb: ThresholdedBipartite) -> MomentPair:
    """Mean and population variance of closeness over all stored nodes."""
    vals = closeness_values(tb)
    if len(vals) == 0:
        return MomentPair(0.0, 0.0, True)
    return MomentPair(float(vals.mean()), float(vals.var()), False)


def bipartite_avg_degree(tb: ThresholdedBipartite) -> float:
    """2|E| / number of degree >= 1 nodes across both partitions."""
    degl = tb.left_degrees()
    degr = tb.right_degrees()
    n = int(np.count_nonzero(degl) + np.count_nonzero(degr))
    return 2.0 * tb.n_edges / n if n else 0.0


def bio_feature_vector(tb: ThresholdedBipartite, graph_id: str = "") -> FeatureVector:
    """The 14 tumor-classification features of one thresholded network.

    Six bipartite statistics followed by four structural features on the
    gene (right) projection and the same four on the TF (left) projection.
    """
    nrc = node_redundancy_stats(tb)
    cct = closeness_stats(tb)
    gene = project(tb, "right")
    tf = project(tb, "left")
    g_assort = degree_assortativity(gene)
    t_assort = degree_assortativity(tf)
    flags = []
    if nrc.degenerate:
        flags.append("nrc:degenerate")
    if g_assort.degenerate:
        flags.append("Gassor:degenerate")
    if t_assort.degenerate:
        flags.append("Tassor:degenerate")
    values = [
        bipartite_avg_degree(tb),
        bipartite_clustering(tb),
        nrc.mean,
        nrc.variance,
        cct.mean,
        cct.variance,
        avg_degree(gene),
        num_triangles(gene),
        avg_local_clustering(gene),
        g_assort.value,
        avg_degree(tf),
        num_triangles(tf),
        avg_local_clustering(tf),
        t_assort.value,
    ]
    return FeatureVector(
        graph_id=graph_id or tb.source,
        names=BIO_FEATURES,
        values=values,
        flags=tuple(flags),
    )
