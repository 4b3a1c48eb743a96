import os

import numpy as np
import pytest
from hypothesis import given
from numpy.testing import assert_array_equal

from google_matrix.errors import InputFormatError, PreconditionError
from google_matrix.graph import (
    GraphStats,
    NodeLabelMap,
    build_graph,
    build_graph_with_report,
    graph_stats,
    load_network,
    read_edge_file,
    read_label_file,
    transpose,
    write_edge_file,
    write_label_file,
)
from tests.oracles import digraphs


def test_duplicates_are_collapsed():
    graph = build_graph([(0, 1), (0, 1), (1, 2)], 3)
    assert graph.edge_count == 2
    assert_array_equal(graph.out_degree, [1, 1, 0])
    assert_array_equal(graph.in_degree, [0, 1, 1])


def test_self_loops_are_dropped():
    graph, report = build_graph_with_report([(0, 0), (0, 1)], 2)
    assert graph.edge_count == 1
    assert report.self_loops == 1
    assert report.duplicates == 0
    assert report.edges_read == 2


def test_targets_are_sorted():
    graph = build_graph([(0, 3), (0, 1), (0, 2)], 4)
    assert_array_equal(graph.successors(0), [1, 2, 3])
    assert graph.has_edge(0, 2)
    assert not graph.has_edge(2, 0)


def test_out_of_range_id_names_position():
    with pytest.raises(PreconditionError, match=r"position 1 \(1, 5\)"):
        build_graph([(0, 1), (1, 5)], 3)


def test_zero_nodes_rejected():
    with pytest.raises(PreconditionError):
        build_graph([], 0)


def test_transpose_single_edge():
    reversed_graph = transpose(build_graph([(0, 1)], 2))
    assert reversed_graph.has_edge(1, 0)
    assert reversed_graph.edge_count == 1


def test_transpose_cycle():
    cycle = build_graph([(0, 1), (1, 2), (2, 0)], 3)
    reversed_cycle = transpose(cycle)
    sources, targets = reversed_cycle.edges()
    assert sorted(zip(sources.tolist(), targets.tolist())) == [(0, 2), (1, 0), (2, 1)]
    assert sorted(reversed_cycle.out_degree) == sorted(cycle.out_degree)


@given(digraphs(max_nodes=100))
def test_transpose_is_an_involution(graph_data):
    n, edges = graph_data
    graph = build_graph(edges, n)
    reversed_graph = transpose(graph)
    assert transpose(reversed_graph) == graph
    assert reversed_graph.edge_count == graph.edge_count
    assert_array_equal(reversed_graph.out_degree, graph.in_degree)
    assert_array_equal(reversed_graph.in_degree, graph.out_degree)


@given(digraphs())
def test_degree_sums_match_edge_count(graph_data):
    n, edges = graph_data
    graph = build_graph(edges, n)
    assert graph.out_degree.sum() == graph.edge_count
    assert graph.in_degree.sum() == graph.edge_count
    assert graph.edge_count == len({(s, t) for s, t in edges if s != t})


def test_stats_of_complete_digraph():
    edges = [(s, t) for s in range(3) for t in range(3) if s != t]
    stats = graph_stats(build_graph(edges, 3))
    assert stats.density == 1.0
    assert stats.mean_degree == 2.0
    assert stats.dangling_count == 0


@pytest.mark.parametrize(
    ("n", "edge_count", "density", "mean_degree"),
    [
        (5_416_537, 122_232_932, 0.42e-5, 22.6),
        (939_625, 13_364_440, 1.51e-5, 14.2),
    ],
)
def test_stats_from_edition_counts(n, edge_count, density, mean_degree):
    stats = GraphStats.from_counts(n, edge_count)
    assert stats.density == pytest.approx(density, rel=0.02)
    assert stats.mean_degree == pytest.approx(mean_degree, abs=0.05)


def test_stats_need_two_nodes():
    with pytest.raises(PreconditionError):
        graph_stats(build_graph([], 1))


def test_edge_file_round_trip(tmp_path, rng):
    edges = [(int(s), int(t)) for s, t in rng.integers(0, 40, size=(200, 2))]
    graph = build_graph(edges, 40)
    path = tmp_path / "edges.tsv"
    write_edge_file(graph, path)
    reread, report = read_edge_file(path, n=40)
    assert reread == graph
    assert report.duplicates == 0
    assert report.self_loops == 0


def test_edge_file_comments_and_crlf(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_bytes(b"# header\r\n0\t1\r\n\r\n1\t2\r\n# trailer\r\n")
    graph, report = read_edge_file(path)
    assert graph.n == 3
    assert graph.edge_count == 2
    assert report.edges_read == 2


def test_edge_file_reports_bad_line(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("# comment\n0\t1\n1\tx\n", encoding="utf-8")
    with pytest.raises(InputFormatError) as excinfo:
        read_edge_file(path)
    assert excinfo.value.line == 3
    assert excinfo.value.exit_code == 2


def test_edge_file_reports_out_of_range_line(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\n# comment\n1\t7\n", encoding="utf-8")
    with pytest.raises(InputFormatError) as excinfo:
        read_edge_file(path, n=3)
    assert excinfo.value.line == 3


def test_edge_file_reports_missing_column(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\n2\n", encoding="utf-8")
    with pytest.raises(InputFormatError) as excinfo:
        read_edge_file(path)
    assert excinfo.value.line == 2


def test_edgeless_network_takes_node_count_from_labels(data_dir):
    graph, report, labels = load_network(
        os.path.join(data_dir, "edgeless.tsv"),
        os.path.join(data_dir, "edgeless_labels.tsv"),
    )
    assert graph.n == 5
    assert graph.edge_count == 0
    assert report.edges_read == 0
    assert labels.label(4) == "n4"


def test_nodes_option_extends_network(data_dir):
    graph, _report, _labels = load_network(
        os.path.join(data_dir, "two_nodes.tsv"), nodes=4
    )
    assert graph.n == 4
    assert graph.dangling.sum() == 3


def test_label_map_lookups():
    labels = NodeLabelMap({0: "Aristotle", 2: "Plato"})
    assert labels.id_of("Plato") == 2
    assert labels.label_or_id(1) == "1"
    assert "Aristotle" in labels
    assert labels.max_id == 2
    with pytest.raises(PreconditionError, match="Kant"):
        labels.id_of("Kant")


def test_label_map_rejects_duplicate_label():
    with pytest.raises(PreconditionError):
        NodeLabelMap({0: "Plato", 1: "Plato"})


def test_label_file_round_trip(tmp_path):
    labels = NodeLabelMap({0: "Thales of Miletus", 3: "Zeno of Elea", 1: "Ἀριστοτέλης"})
    path = tmp_path / "labels.tsv"
    write_label_file(labels, path)
    assert read_label_file(path).items() == labels.items()


def test_label_file_rejects_duplicate_id(tmp_path):
    path = tmp_path / "labels.tsv"
    path.write_text("0\ta\n0\tb\n", encoding="utf-8")
    with pytest.raises(InputFormatError):
        read_label_file(path)


def test_graph_arrays_cannot_be_changed():
    graph = build_graph([(0, 1)], 2)
    with pytest.raises(ValueError):
        graph.out_degree[0] = 5
    assert np.issubdtype(graph.adjacency.dtype, np.integer)
