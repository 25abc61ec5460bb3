import numpy as np
import pytest
from conftest import (
    brute_assortativity,
    brute_local_clustering,
    brute_triangles,
    brute_wedges,
    random_graph,
)

from netclass.errors import ConfigError
from netclass.features import (
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
    pooled_bin_edges,
    wedge_count,
)
from netclass.graph import Graph, GraphCollection, NodeAttr


def triangle_with_tail():
    return Graph.from_edge_pairs(
        [("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")], extra_nodes=["iso"]
    )


def test_node_count_excludes_isolated():
    g = triangle_with_tail()
    assert g.n_stored == 5
    assert num_nodes(g) == 4.0


def test_avg_degree_uses_active_nodes():
    g = triangle_with_tail()
    # 4 edges over 4 connected nodes
    assert avg_degree(g) == pytest.approx(2 * 4 / 4)


def test_empty_graph_features():
    g = Graph.from_edge_pairs([], extra_nodes=["x", "y"])
    assert num_nodes(g) == 0.0
    assert num_edges(g) == 0.0
    assert avg_degree(g) == 0.0
    assert num_triangles(g) == 0.0
    assert global_clustering(g) == 0.0
    assert avg_local_clustering(g) == 0.0


def test_triangle_graph_is_fully_clustered():
    g = Graph.from_edge_pairs([("a", "b"), ("b", "c"), ("a", "c")])
    assert num_triangles(g) == 1.0
    assert global_clustering(g) == 1.0
    assert avg_local_clustering(g) == 1.0


def test_star_has_no_triangles():
    g = Graph.from_edge_pairs([("c", f"l{i}") for i in range(5)])
    assert num_triangles(g) == 0.0
    assert global_clustering(g) == 0.0


def test_triangles_against_enumeration(rng):
    for _ in range(300):
        g = random_graph(rng, max_nodes=20)
        assert num_triangles(g) == brute_triangles(g)


def test_wedges_against_enumeration(rng):
    for _ in range(100):
        g = random_graph(rng, max_nodes=20)
        assert wedge_count(g) == brute_wedges(g)


def test_global_clustering_identity(rng):
    # transitivity = 3 * triangles / wedges whenever wedges exist
    for _ in range(100):
        g = random_graph(rng, max_nodes=20)
        w = brute_wedges(g)
        if w == 0:
            assert global_clustering(g) == 0.0
        else:
            assert global_clustering(g) == pytest.approx(
                3 * brute_triangles(g) / w
            )


def test_local_clustering_against_enumeration(rng):
    for _ in range(100):
        g = random_graph(rng, max_nodes=20)
        got = local_clustering_values(g, include_isolated=True)
        np.testing.assert_allclose(got, brute_local_clustering(g), atol=1e-12)


def test_avg_local_clustering_skips_isolated(rng):
    for _ in range(50):
        g = random_graph(rng, max_nodes=15)
        deg = g.degrees()
        if (deg > 0).sum() == 0:
            continue
        vals = brute_local_clustering(g)[deg > 0]
        assert avg_local_clustering(g) == pytest.approx(vals.mean())


def test_assortativity_matches_pearson(rng):
    checked = 0
    for _ in range(300):
        g = random_graph(rng, max_nodes=20)
        want = brute_assortativity(g)
        got = degree_assortativity(g)
        if want is None:
            assert got.degenerate
            assert got.value == 0.0
        else:
            checked += 1
            assert abs(got.value - want) < 1e-9
            assert not got.degenerate
    assert checked > 100


def test_assortativity_regular_graph_degenerate():
    # cycle: every degree is 2, correlation undefined
    g = Graph.from_edge_pairs([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    r = degree_assortativity(g)
    assert r.degenerate and r.value == 0.0


def attr_graph():
    attrs = {
        "1": NodeAttr(sex="female", age=30, zip="z1"),
        "2": NodeAttr(sex="male", age=40, zip="z1"),
        "3": NodeAttr(sex="female", age=50, zip="z2"),
        "4": NodeAttr(sex="unknown", age=None, zip=None),
    }
    g = Graph.from_edge_pairs(
        [("1", "2"), ("1", "3"), ("2", "3"), ("3", "4")], attributes=attrs
    )
    return g


def test_attribute_features_by_hand():
    feats = attribute_features(attr_graph())
    # sexes known for 3 active nodes: 2 female of 3
    assert feats["FracF"] == pytest.approx(2 / 3)
    # edges with both sexes known: (1,2) MF, (1,3) FF, (2,3) MF -> 2/3
    assert feats["FracMF"] == pytest.approx(2 / 3)
    # age differences over edges with both ages: |30-40|, |30-50|, |40-50| -> 40/3
    assert feats["AvgAgeDif"] == pytest.approx(40 / 3)
    # zip pairs known: (1,2) same, (1,3) diff, (2,3) diff -> 1/3
    assert feats["FracSameZip"] == pytest.approx(1 / 3)


def test_attribute_features_all_missing():
    g = Graph.from_edge_pairs([("a", "b")])
    feats = attribute_features(g)
    assert all(np.isnan(v) for v in feats.values())


def test_benchmark6_names_and_order(rng):
    g = random_graph(rng, max_nodes=12)
    v = benchmark6_vector(g, graph_id="g0")
    assert v.names == (
        "NumNodes",
        "NumEdges",
        "AvgDeg",
        "DegAssort",
        "NumTri",
        "ClustCoef",
    )
    assert v.values[0] == num_nodes(g)
    assert v.values[4] == num_triangles(g)


def test_cdr_vector_names():
    v = cdr_vector(attr_graph(), warn_missing=False)
    assert v.names == (
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


def test_cdr_vector_warns_when_attributes_missing():
    g = Graph.from_edge_pairs([("a", "b")])
    with pytest.warns(UserWarning):
        cdr_vector(g)


def test_feature_vector_validation():
    with pytest.raises(ConfigError):
        FeatureVector(names=("a", "a"), values=(1.0, 2.0), graph_id="x")
    with pytest.raises(ConfigError):
        FeatureVector(names=("a",), values=(1.0, 2.0), graph_id="x")


def test_distribution_summary_probabilities(rng):
    values = rng.normal(size=200)
    edges = pooled_bin_edges([values], 10)
    s = distribution_summary(values, edges)
    assert s.bin_probabilities.sum() == pytest.approx(1.0)
    assert len(s.bin_probabilities) == 10


def test_distribution_pca_feature_shape(rng):
    graphs = [random_graph(rng, max_nodes=25, isolated=False) for _ in range(8)]
    coll = GraphCollection(graphs=graphs, ids=[f"g{i}" for i in range(8)])
    names, scores = distribution_pca_features(coll, "degree", n_components=4, n_bins=20)
    assert names == ("DegPC1", "DegPC2", "DegPC3", "DegPC4")
    assert scores.shape == (8, 4)
    names, scores = distribution_pca_features(
        coll, "local_clustering", n_components=2, n_bins=20
    )
    assert names == ("ClusPC1", "ClusPC2")
    assert scores.shape == (8, 2)
