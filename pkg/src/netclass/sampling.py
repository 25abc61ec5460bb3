"""Subsampling procedures: snowball balls and shared-attribute groups.

Snowball samples are BFS balls of a fixed radius around a random seed
node, re-drawn until they reach a minimum size; attribute groups take
every node sharing a zip value. Induced daily networks on a subsample
keep degree-0 nodes in storage (node-count features exclude them).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .errors import ConfigError, DataError
from .graph import Graph

SNOWBALL_ATTEMPT_CAP = 10_000
DEFAULT_MIN_SIZE = 50


@dataclass
class Subsample:
    kind: str                      # "snowball" or "zip"
    node_ids: tuple[str, ...]
    seed_node: str | None = None   # snowball only
    radius: int | None = None      # snowball only
    zip_value: str | None = None   # zip only

    def __post_init__(self):
        if self.kind not in ("snowball", "zip"):
            raise ConfigError(f"unknown subsample kind {self.kind!r}")
        self.node_ids = tuple(str(n) for n in self.node_ids)


def snowball(
    g: Graph,
    radius: int,
    min_size: int = DEFAULT_MIN_SIZE,
    rng=None,
) -> Subsample:
    """BFS ball of the given radius around a random degree >= 1 seed.

    Seeds are redrawn until the ball has at least min_size nodes; after
    10000 failed attempts no qualifying seed exists and the sampling
    aborts.
    """
    if radius < 1:
        raise ConfigError("radius must be >= 1")
    if isinstance(rng, (int, np.integer)) or rng is None:
        rng = np.random.default_rng(rng)
    degrees = g.degrees()
    active = np.flatnonzero(degrees > 0)
    if len(active) == 0:
        raise DataError("graph has no nodes of degree >= 1")
    adj = g.adjacency_sparse()
    for _ in range(SNOWBALL_ATTEMPT_CAP):
        seed_idx = int(active[rng.integers(len(active))])
        dist = dijkstra(
            adj, unweighted=True, indices=seed_idx, limit=float(radius)
        )
        members = np.flatnonzero(dist <= radius)
        if len(members) >= min_size:
            return Subsample(
                kind="snowball",
                node_ids=tuple(g.node_ids[i] for i in members),
                seed_node=g.node_ids[seed_idx],
                radius=radius,
            )
    raise DataError(
        f"no radius-{radius} ball reached {min_size} nodes "
        f"after {SNOWBALL_ATTEMPT_CAP} seeds"
    )


def attribute_subsample(
    g: Graph, zip_value, min_size: int = DEFAULT_MIN_SIZE
) -> Subsample | None:
    """All nodes sharing the zip value; None when the group is too small."""
    zip_value = str(zip_value)
    if not any(a.zip is not None for a in g.attributes.values()):
        raise DataError("no node carries a zip attribute")
    members = tuple(
        nid
        for nid in g.node_ids
        if (a := g.attributes.get(nid)) is not None and a.zip == zip_value
    )
    if len(members) < min_size:
        return None
    return Subsample(kind="zip", node_ids=members, zip_value=zip_value)


def qualifying_zips(g: Graph, min_size: int = DEFAULT_MIN_SIZE) -> list[str]:
    """Zip values held by at least min_size nodes, sorted."""
    counts: dict[str, int] = {}
    for a in g.attributes.values():
        if a.zip is not None:
            counts[a.zip] = counts.get(a.zip, 0) + 1
    return sorted(z for z, c in counts.items() if c >= min_size)


def induce(g: Graph, s: Subsample) -> Graph:
    """Subgraph on the subsample's nodes with all internal edges."""
    return g.subgraph(s.node_ids)
