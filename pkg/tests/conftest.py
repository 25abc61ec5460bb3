"""Shared helpers: random graph generation and brute-force oracles.

The oracles here are deliberately naive (triple loops, dense matrices)
so they cannot share a bug with the fast implementations they check.
"""

import itertools

import numpy as np
import pytest

from netclass.graph import Graph


def random_graph(rng, max_nodes=30, p=None, isolated=True) -> Graph:
    """Erdos-Renyi-ish graph on string ids, possibly with isolated nodes."""
    n = int(rng.integers(2, max_nodes + 1))
    if p is None:
        p = rng.uniform(0.05, 0.6)
    pairs = [
        (f"n{i}", f"n{j}")
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    extra = [f"n{i}" for i in range(n)] if isolated else []
    return Graph.from_edge_pairs(pairs, extra_nodes=extra)


def adjacency_dense(g: Graph) -> np.ndarray:
    a = np.zeros((g.n_stored, g.n_stored), dtype=np.int64)
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1
    return a


def brute_triangles(g: Graph) -> int:
    a = adjacency_dense(g)
    n = len(a)
    count = 0
    for i, j, k in itertools.combinations(range(n), 3):
        if a[i, j] and a[j, k] and a[i, k]:
            count += 1
    return count


def brute_wedges(g: Graph) -> int:
    """Unordered paths of length two: sum over centers of C(deg, 2)."""
    deg = adjacency_dense(g).sum(axis=1)
    return int(sum(d * (d - 1) // 2 for d in deg))


def brute_local_clustering(g: Graph) -> np.ndarray:
    a = adjacency_dense(g)
    n = len(a)
    out = np.zeros(n)
    for v in range(n):
        nb = np.flatnonzero(a[v])
        if len(nb) < 2:
            continue
        links = sum(
            a[x, y] for x, y in itertools.combinations(nb, 2)
        )
        out[v] = links / (len(nb) * (len(nb) - 1) / 2)
    return out


def brute_assortativity(g: Graph):
    """Pearson correlation of endpoint degrees over both edge orientations."""
    deg = adjacency_dense(g).sum(axis=1)
    xs, ys = [], []
    for u, v in g.edges:
        xs += [deg[u], deg[v]]
        ys += [deg[v], deg[u]]
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if len(xs) == 0 or xs.std() == 0 or ys.std() == 0:
        return None
    return float(np.corrcoef(xs, ys)[0, 1])


def brute_best_split(x, y, n_classes):
    """Exhaustive scan: weighted Gini from the definition, all midpoints.

    Same tie-breaking contract: lowest feature, then lowest threshold,
    and only strictly-improving splits count.
    """
    n, p = x.shape

    def region(yy):
        nn = len(yy)
        if nn == 0:
            return 0.0
        props = np.array([(yy == c).sum() / nn for c in range(1, n_classes + 1)])
        return nn * float((props * (1 - props)).sum())

    parent = region(y)
    best = None
    best_score = parent
    for j in range(p):
        distinct = np.unique(x[:, j])
        for a, b in zip(distinct[:-1], distinct[1:]):
            s = (a + b) / 2.0
            if not a < s:
                continue
            mask = x[:, j] < s
            score = region(y[mask]) + region(y[~mask])
            if score < best_score - 1e-12:
                best_score = score
                best = (j, s)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
