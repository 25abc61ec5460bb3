"""Graph containers and file loaders.

All graphs are simple and undirected: self-loops and duplicate edges are
dropped at construction and the drop counts are kept in ``diagnostics``.
Node identifiers are opaque strings; each graph re-indexes its own nodes
densely for computation. Instances are treated as immutable after
construction and are safe to share across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import FormatError, ParseError

UNKNOWN_TOKENS = ("", "NA")

_SEX_VALUES = {"male": "male", "m": "male", "female": "female", "f": "female"}


@dataclass(frozen=True)
class NodeAttr:
    """Per-node attributes; ``None`` / ``"unknown"`` mark missing values."""

    sex: str = "unknown"  # "male" | "female" | "unknown"
    age: int | None = None  # nonnegative years
    zip: str | None = None  # opaque code


@dataclass
class LoadDiagnostics:
    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0


class Graph:
    """Undirected simple graph with optional node attributes.

    ``node_ids`` fixes the dense index of every stored node (isolated
    nodes permitted); ``edges`` is an ``(E, 2)`` int array of index pairs
    with ``u < v``, sorted lexicographically.
    """

    def __init__(self, node_ids, edges, attributes=None, diagnostics=None):
        self.node_ids = tuple(node_ids)
        self.index = {nid: i for i, nid in enumerate(self.node_ids)}
        if len(self.index) != len(self.node_ids):
            raise FormatError("duplicate node ids")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.edges = edges
        self.edges.setflags(write=False)
        self.attributes = dict(attributes) if attributes else {}
        self.diagnostics = diagnostics or LoadDiagnostics()
        self._degrees = None
        self._adj = None
        self._csr = None

    @classmethod
    def from_edge_pairs(cls, pairs, extra_nodes=(), attributes=None):
        """Build a graph from (u, v) id pairs, canonicalizing as it goes.

        Self-loops and duplicate undirected edges are dropped and counted.
        ``extra_nodes`` adds ids with no incident edges (stored at degree 0).
        """
        ids: list[str] = []
        index: dict[str, int] = {}

        def idx(token: str) -> int:
            i = index.get(token)
            if i is None:
                i = len(ids)
                index[token] = i
                ids.append(token)
            return i

        raw = []
        diag = LoadDiagnostics()
        for u, v in pairs:
            ui, vi = idx(str(u)), idx(str(v))
            if ui == vi:
                diag.self_loops_dropped += 1
                continue
            raw.append((ui, vi) if ui < vi else (vi, ui))
        for nid in extra_nodes:
            idx(str(nid))
        if raw:
            arr = np.array(raw, dtype=np.int64)
            arr = np.unique(arr, axis=0)
            diag.duplicate_edges_dropped = len(raw) - len(arr)
        else:
            arr = np.empty((0, 2), dtype=np.int64)
        attrs = None
        if attributes:
            attrs = {nid: a for nid, a in attributes.items() if nid in index}
        return cls(ids, arr, attributes=attrs, diagnostics=diag)

    @classmethod
    def from_indexed_edges(cls, node_ids, edges, attributes=None):
        """Fast path: edges already as index pairs into ``node_ids``."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        diag = LoadDiagnostics()
        loops = edges[:, 0] == edges[:, 1]
        diag.self_loops_dropped = int(loops.sum())
        edges = edges[~loops]
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        canon = np.column_stack([lo, hi])
        if len(canon):
            canon = np.unique(canon, axis=0)
        diag.duplicate_edges_dropped = len(edges) - len(canon)
        return cls(node_ids, canon, attributes=attributes, diagnostics=diag)

    # -- basic accessors -------------------------------------------------

    @property
    def n_stored(self) -> int:
        """Stored node count, isolated nodes included."""
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            d = np.bincount(self.edges.ravel(), minlength=self.n_stored)
            d.setflags(write=False)
            self._degrees = d
        return self._degrees

    def adjacency(self):
        """CSR neighbor lists: (indptr, indices), neighbors sorted."""
        if self._adj is None:
            n = self.n_stored
            src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
            dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
            order = np.lexsort((dst, src))
            src, dst = src[order], dst[order]
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.add.at(indptr, src + 1, 1)
            indptr = np.cumsum(indptr)
            for a in (indptr, dst):
                a.setflags(write=False)
            self._adj = (indptr, dst)
        return self._adj

    def adjacency_sparse(self):
        """Boolean scipy CSR adjacency matrix."""
        if self._csr is None:
            from scipy import sparse

            n = self.n_stored
            src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
            dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
            data = np.ones(len(src), dtype=np.float64)
            self._csr = sparse.csr_matrix((data, (src, dst)), shape=(n, n))
        return self._csr

    def attr(self, node_id: str) -> NodeAttr | None:
        return self.attributes.get(node_id)

    def edge_id_pairs(self) -> set[tuple[str, str]]:
        """Edge set at the id level, each pair sorted; order-insensitive."""
        out = set()
        for u, v in self.edges:
            a, b = self.node_ids[u], self.node_ids[v]
            out.add((a, b) if a <= b else (b, a))
        return out

    def subgraph(self, node_ids) -> Graph:
        """Induced subgraph on ``node_ids``; induced degree-0 nodes kept."""
        node_ids = [str(n) for n in node_ids]
        missing = [n for n in node_ids if n not in self.index]
        if missing:
            raise FormatError(f"nodes not in graph: {missing[:5]}")
        keep = np.zeros(self.n_stored, dtype=bool)
        local = np.full(self.n_stored, -1, dtype=np.int64)
        for j, nid in enumerate(node_ids):
            i = self.index[nid]
            keep[i] = True
            local[i] = j
        mask = keep[self.edges[:, 0]] & keep[self.edges[:, 1]]
        sub_edges = local[self.edges[mask]]
        attrs = {n: self.attributes[n] for n in node_ids if n in self.attributes}
        return Graph(node_ids, sub_edges, attributes=attrs)

    def __repr__(self):
        return f"Graph(nodes={self.n_stored}, edges={self.n_edges})"


@dataclass
class BipartiteWeightedGraph:
    """Two node partitions with a dense real weight matrix (|left| x |right|)."""

    left_ids: tuple[str, ...]
    right_ids: tuple[str, ...]
    weights: np.ndarray
    graph_id: str = ""

    def __post_init__(self):
        self.left_ids = tuple(str(x) for x in self.left_ids)
        self.right_ids = tuple(str(x) for x in self.right_ids)
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (len(self.left_ids), len(self.right_ids)):
            raise FormatError(
                f"weight matrix shape {w.shape} does not match partitions "
                f"({len(self.left_ids)}, {len(self.right_ids)})"
            )
        w.setflags(write=False)
        self.weights = w


@dataclass
class GraphCollection:
    """Ordered collection of graphs with optional 1..c class labels."""

    graphs: list
    ids: list[str]
    labels: np.ndarray | None = None

    def __post_init__(self):
        if len(self.ids) != len(self.graphs):
            raise FormatError("ids and graphs length mismatch")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if len(self.labels) != len(self.graphs):
                raise FormatError("labels and graphs length mismatch")
            if len(self.labels) and (
                self.labels.min() < 1 or self.labels.max() > len(self.labels)
            ):
                raise FormatError("labels must lie in 1..c")

    def __len__(self):
        return len(self.graphs)

    @property
    def n_classes(self) -> int:
        if self.labels is None or not len(self.labels):
            return 0
        return int(self.labels.max())


# -- loaders ---------------------------------------------------------------


def _parse_attr_row(row, line_no, path):
    nid = row[0].strip()
    sex_tok = row[1].strip() if len(row) > 1 else ""
    age_tok = row[2].strip() if len(row) > 2 else ""
    zip_tok = row[3].strip() if len(row) > 3 else ""
    if sex_tok in UNKNOWN_TOKENS:
        sex = "unknown"
    else:
        sex = _SEX_VALUES.get(sex_tok.lower())
        if sex is None:
            raise ParseError(f"bad sex value {sex_tok!r}", path=path, line=line_no)
    if age_tok in UNKNOWN_TOKENS:
        age = None
    else:
        try:
            age = int(age_tok)
        except ValueError:
            raise ParseError(f"bad age value {age_tok!r}", path=path, line=line_no)
        if age < 0:
            raise ParseError(f"negative age {age}", path=path, line=line_no)
    zip_code = None if zip_tok in UNKNOWN_TOKENS else zip_tok
    return nid, NodeAttr(sex=sex, age=age, zip=zip_code)


def load_node_attributes(path) -> dict[str, NodeAttr]:
    """Read a node-attribute CSV with header ``id,sex,age,zip``.

    Empty fields and the literal ``NA`` mean unknown.
    """
    attrs: dict[str, NodeAttr] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty attribute file")
        expected = ["id", "sex", "age", "zip"]
        if [h.strip().lower() for h in header] != expected:
            raise FormatError(f"{path}: expected header {','.join(expected)}")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            nid, attr = _parse_attr_row(row, line_no, path)
            attrs[nid] = attr
    return attrs


def load_edge_list(path, attr_path=None) -> Graph:
    """Load a whitespace- or comma-separated ``u v`` edge list.

    Self-loops and duplicate edges are dropped (counts in
    ``Graph.diagnostics``). Attribute ids absent from the edge list are
    attached as degree-0 nodes.
    """
    pairs = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            tokens = stripped.replace(",", " ").split()
            if len(tokens) != 2:
                raise ParseError(
                    f"expected two node ids, got {len(tokens)} tokens",
                    path=path,
                    line=line_no,
                )
            pairs.append((tokens[0], tokens[1]))
    attrs = load_node_attributes(attr_path) if attr_path else None
    extra = [nid for nid in attrs] if attrs else ()
    return Graph.from_edge_pairs(pairs, extra_nodes=extra, attributes=attrs)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        for u, v in g.edges:
            fh.write(f"{g.node_ids[u]} {g.node_ids[v]}\n")


def write_node_attributes(attrs: dict[str, NodeAttr], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "sex", "age", "zip"])
        for nid in attrs:
            a = attrs[nid]
            writer.writerow(
                [
                    nid,
                    "" if a.sex == "unknown" else a.sex,
                    "" if a.age is None else a.age,
                    "" if a.zip is None else a.zip,
                ]
            )


def _read_int_column(path, what):
    try:
        frame = pd.read_csv(path, header=None, comment="#")
    except Exception as exc:
        raise ParseError(f"cannot parse {what}: {exc}", path=str(path))
    arr = frame.to_numpy()
    if arr.shape[1] != 1:
        raise FormatError(f"{path}: expected one column for {what}")
    return arr[:, 0].astype(np.int64)


def load_tu_benchmark(directory, name) -> GraphCollection:
    """Load a benchmark collection stored as the standard triple of files.

    ``NAME_A.txt`` holds comma-separated global edge endpoints (1-based),
    ``NAME_graph_indicator.txt`` maps each node to its graph, and
    ``NAME_graph_labels.txt`` holds one class label per graph. Labels are
    remapped to 1..c preserving the sorted order of the original values.
    """
    from pathlib import Path

    directory = Path(directory)
    a_path = directory / f"{name}_A.txt"
    ind_path = directory / f"{name}_graph_indicator.txt"
    lab_path = directory / f"{name}_graph_labels.txt"
    for p in (a_path, ind_path, lab_path):
        if not p.exists():
            raise FormatError(f"missing required file {p}")

    try:
        edges = pd.read_csv(a_path, header=None, skipinitialspace=True).to_numpy()
    except Exception as exc:
        raise ParseError(f"cannot parse edge file: {exc}", path=str(a_path))
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise FormatError(f"{a_path}: expected two columns of node ids")
    edges = edges.astype(np.int64)

    indicator = _read_int_column(ind_path, "graph indicator")
    raw_labels = _read_int_column(lab_path, "graph labels")

    n_nodes = len(indicator)
    if len(edges) and (edges.min() < 1 or edges.max() > n_nodes):
        raise FormatError(
            f"{a_path}: node id outside 1..{n_nodes} (not covered by indicator)"
        )
    n_graphs = len(raw_labels)
    if indicator.min() < 1 or indicator.max() > n_graphs:
        raise FormatError(f"{ind_path}: graph index outside 1..{n_graphs}")

    gu = indicator[edges[:, 0] - 1]
    gv = indicator[edges[:, 1] - 1]
    crossing = np.flatnonzero(gu != gv)
    if len(crossing):
        u, v = edges[crossing[0]]
        raise FormatError(f"{a_path}: edge ({u}, {v}) crosses two graphs")

    # group nodes and edges by graph
    node_order = np.argsort(indicator, kind="stable")
    node_splits = np.searchsorted(indicator[node_order], np.arange(2, n_graphs + 1))
    nodes_per_graph = np.split(node_order, node_splits)  # 0-based global indices

    edge_order = np.argsort(gu, kind="stable")
    edge_splits = np.searchsorted(gu[edge_order], np.arange(2, n_graphs + 1))
    edges_per_graph = np.split(edge_order, edge_splits)

    graphs = []
    for gidx in range(n_graphs):
        glob_nodes = nodes_per_graph[gidx]  # sorted ascending
        ids = [str(i + 1) for i in glob_nodes]
        e = edges[edges_per_graph[gidx]] - 1
        local = np.searchsorted(glob_nodes, e)
        graphs.append(Graph.from_indexed_edges(ids, local))

    uniq = np.unique(raw_labels)
    labels = np.searchsorted(uniq, raw_labels) + 1
    return GraphCollection(
        graphs=graphs, ids=[str(i + 1) for i in range(n_graphs)], labels=labels
    )


def load_bipartite_matrix(path, graph_id=None) -> BipartiteWeightedGraph:
    """Load a dense bipartite weight matrix from CSV.

    The header row carries the right-partition ids (first cell ignored),
    each subsequent row a left-partition id followed by real weights.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file")
        right_ids = [h.strip() for h in header[1:]]
        if not right_ids:
            raise FormatError(f"{path}: header has no right-partition ids")
        left_ids = []
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(right_ids) + 1:
                raise FormatError(
                    f"{path}:{line_no}: ragged row ({len(row)} cells, "
                    f"expected {len(right_ids) + 1})"
                )
            left_ids.append(row[0].strip())
            try:
                rows.append(np.asarray(row[1:], dtype=np.float64))
            except ValueError:
                for col, cell in enumerate(row[1:], start=2):
                    try:
                        float(cell)
                    except ValueError:
                        raise ParseError(
                            f"non-numeric cell {cell!r}",
                            path=path,
                            line=line_no,
                            column=col,
                        )
                raise
        if not left_ids:
            raise FormatError(f"{path}: no data rows")
    return BipartiteWeightedGraph(
        left_ids=tuple(left_ids),
        right_ids=tuple(right_ids),
        weights=np.vstack(rows),
        graph_id=graph_id or str(path),
    )
