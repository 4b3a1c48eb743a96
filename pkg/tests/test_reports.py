import hashlib
import json
import os

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from google_matrix.analytics import (
    EditionRanking,
    density_grid,
    kendall_matrix,
    theta_scores,
)
from google_matrix.config import RUN_RECORD, RunConfig, file_checksum, write_run_record
from google_matrix.errors import InputFormatError, PreconditionError
from google_matrix.google import GoogleOperator, RankTable, pagerank
from google_matrix.graph import NodeLabelMap, build_graph, graph_stats, load_network
from google_matrix.reduced import (
    HiddenLink,
    ReducedSelection,
    SourceHiddenLinks,
    hidden_links,
    reduced_google,
)
from google_matrix.reports import (
    hidden_links_frame,
    manifest_inputs,
    positions_frame,
    read_edition_ranking,
    read_manifest,
    read_rank_file,
    read_reduced,
    read_selection_file,
    selection_labels,
    subset_ranking,
    write_density,
    write_edition_ranking,
    write_rank_outputs,
    write_reduced,
    write_stats_json,
    write_theta_csv,
)


@pytest.fixture
def hidden_path(data_dir):
    graph, report, labels = load_network(
        os.path.join(data_dir, "hidden_path.tsv"),
        os.path.join(data_dir, "hidden_path_labels.tsv"),
    )
    return graph, report, labels


def test_rank_csv_round_trip(tmp_path, hidden_path):
    graph, _report, labels = hidden_path
    probabilities, ranks, report = pagerank(graph)
    rank_path, report_path = write_rank_outputs(
        tmp_path, "csv", probabilities, ranks, report, labels
    )
    assert os.path.basename(rank_path) == "pagerank.csv"
    with open(rank_path, encoding="utf-8") as file:
        assert file.readline() == "rank,node_id,label,probability\n"
    table, read_labels = read_rank_file(rank_path)
    assert_array_equal(table.order, ranks.order)
    assert read_labels.items() == labels.items()
    with open(report_path, encoding="utf-8") as file:
        stored = json.load(file)
    assert stored["kind"] == "pagerank"
    assert stored["report"]["converged"]


def test_rank_json_round_trip_without_labels(tmp_path):
    graph = build_graph([(0, 1), (1, 2), (2, 0), (0, 2)], 3)
    probabilities, ranks, report = pagerank(graph)
    rank_path, _report_path = write_rank_outputs(
        tmp_path, "json", probabilities, ranks, report
    )
    with open(rank_path, encoding="utf-8") as file:
        stored = json.load(file)
    assert stored["ranks"][0]["probability"] == probabilities.values[ranks.order[0]]
    table, read_labels = read_rank_file(rank_path)
    assert_array_equal(table.rank_of, ranks.rank_of)
    assert len(read_labels) == 0


def test_rank_file_with_missing_column(tmp_path):
    path = tmp_path / "pagerank.csv"
    path.write_text("rank,node_id,label\n1,0,a\n", encoding="utf-8")
    with pytest.raises(InputFormatError) as excinfo:
        read_rank_file(path)
    assert excinfo.value.line == 1


def test_rank_file_with_bad_rank_names_line(tmp_path):
    path = tmp_path / "pagerank.csv"
    path.write_text(
        "rank,node_id,label,probability\n1,0,a,0.6\nsecond,1,b,0.4\n",
        encoding="utf-8",
    )
    with pytest.raises(InputFormatError) as excinfo:
        read_rank_file(path)
    assert excinfo.value.line == 3


def test_subset_ranking_uses_labels():
    ranks = RankTable.from_probabilities([0.1, 0.5, 0.4])
    labels = NodeLabelMap({0: "Thales", 2: "Plato"})
    ranking = subset_ranking(ranks, [0, 2, 1], labels, "PR")
    assert ranking.entity_ids == ("Thales", "Plato", "1")
    assert_array_equal(ranking.local_rank, [3, 2, 1])


def test_selection_prefers_labels_over_ids(tmp_path):
    labels = NodeLabelMap({0: "a", 1: "b", 2: "7"})
    path = tmp_path / "selection.txt"
    path.write_text("7\n\nb\r\n0\n", encoding="utf-8")
    assert read_selection_file(path, labels, n=8) == [2, 1, 0]


def test_selection_lists_every_unknown_entry(tmp_path):
    labels = NodeLabelMap({0: "a", 1: "b", 2: "c"})
    path = tmp_path / "selection.txt"
    path.write_text("a\nzzz\n99\nc\n", encoding="utf-8")
    with pytest.raises(PreconditionError) as excinfo:
        read_selection_file(path, labels, n=3)
    message = str(excinfo.value)
    assert "line 2: <zzz>" in message
    assert "line 3: <99>" in message


def test_selection_with_non_ascii_digit(tmp_path):
    path = tmp_path / "selection.txt"
    path.write_text("0\n²\n", encoding="utf-8")
    with pytest.raises(PreconditionError) as excinfo:
        read_selection_file(path, n=3)
    assert "line 2: <²>" in str(excinfo.value)


def test_empty_selection_is_rejected(tmp_path):
    path = tmp_path / "selection.txt"
    path.write_text("\n\n", encoding="utf-8")
    with pytest.raises(PreconditionError):
        read_selection_file(path, n=3)


def test_presocratics_selection(data_dir):
    names = [f"philosopher {i}" for i in range(30)]
    path = os.path.join(data_dir, "presocratics.txt")
    with open(path, encoding="utf-8") as file:
        names[:21] = [line.strip() for line in file if line.strip()]
    labels = NodeLabelMap(dict(enumerate(names)))
    assert read_selection_file(path, labels, n=30) == list(range(21))


def test_edition_ranking_round_trip(tmp_path):
    ranking = EditionRanking(
        "SEP", ("Plato", "René Descartes", "Aristotle"), [1, 3, 2]
    )
    path = tmp_path / "SEP.csv"
    write_edition_ranking(path, ranking)
    text = path.read_text(encoding="utf-8")
    assert text.splitlines()[-1] == "René Descartes,3"
    reread = read_edition_ranking(path, "SEP")
    assert reread.ordered_entities() == ranking.ordered_entities()


def test_edition_ranking_with_gap_is_rejected(tmp_path):
    path = tmp_path / "EN.csv"
    path.write_text("entity_label,rank\nPlato,1\nAristotle,3\n", encoding="utf-8")
    with pytest.raises(InputFormatError):
        read_edition_ranking(path, "EN")


def test_manifest_of_fixture_editions(data_dir):
    manifest = os.path.join(data_dir, "manifest.csv")
    entries = read_manifest(manifest)
    assert [(ranking.edition_code, kind) for ranking, kind in entries] == [
        ("EN", "edition"),
        ("FR", "edition"),
        ("SEP", "external"),
    ]
    assert len(manifest_inputs(manifest)) == 4

    editions = [ranking for ranking, kind in entries if kind == "edition"]
    table = theta_scores(editions)
    assert table.entity_ids == (
        "Aristotle",
        "Immanuel Kant",
        "Plato",
        "Thales of Miletus",
    )
    assert_array_equal(table.theta, [1.0, 0.625, 0.625, 0.25])
    assert_array_equal(table.display_rank, [1, 2, 2, 4])

    rankings = editions + [table.as_ranking(), entries[2][0]]
    matrix = kendall_matrix(rankings)
    assert matrix.loc["EN", "FR"] == pytest.approx(1 / 6)
    assert matrix.loc["EN", "SEP"] == pytest.approx(1 / 3)
    assert matrix.loc["FR", "SEP"] == pytest.approx(2 / 3)
    assert matrix.loc["FR", "WIKI"] == 0.0
    assert matrix.loc["EN", "WIKI"] == pytest.approx(1 / 6)
    assert matrix.loc["WIKI", "SEP"] == pytest.approx(2 / 3)


def test_theta_csv_is_rounded(tmp_path, data_dir):
    entries = read_manifest(os.path.join(data_dir, "manifest.csv"))
    table = theta_scores([ranking for ranking, kind in entries if kind == "edition"])
    path = tmp_path / "theta.csv"
    write_theta_csv(path, table)
    assert path.read_text(encoding="utf-8") == (
        "display_rank,entity_label,theta\n"
        "1,Aristotle,1.000\n"
        "2,Immanuel Kant,0.625\n"
        "2,Plato,0.625\n"
        "4,Thales of Miletus,0.250\n"
    )


def test_manifest_with_unknown_kind(tmp_path, data_dir):
    path = tmp_path / "manifest.csv"
    path.write_text(
        "edition,path,kind\n"
        f"EN,{os.path.join(data_dir, 'editions', 'EN.csv')},edition\n"
        f"FR,{os.path.join(data_dir, 'editions', 'FR.csv')},survey\n",
        encoding="utf-8",
    )
    with pytest.raises(InputFormatError) as excinfo:
        read_manifest(path)
    assert excinfo.value.line == 3


def test_manifest_with_duplicate_edition(tmp_path, data_dir):
    path = tmp_path / "manifest.csv"
    edition_path = os.path.join(data_dir, "editions", "EN.csv")
    path.write_text(
        f"edition,path\nEN,{edition_path}\nEN,{edition_path}\n", encoding="utf-8"
    )
    with pytest.raises(InputFormatError, match="listed twice"):
        read_manifest(path)


def test_reduced_output_round_trip(tmp_path, data_dir, hidden_path):
    graph, _report, labels = hidden_path
    ids = read_selection_file(
        os.path.join(data_dir, "hidden_path_selection.txt"), labels, graph.n
    )
    selection = ReducedSelection.create(ids, graph.n)
    reduced = reduced_google(GoogleOperator(graph), selection, tol=1e-13)
    names = selection_labels(ids, labels)
    write_reduced(tmp_path, reduced, names)

    for filename in ("G_R.csv", "G_rr.csv", "G_pr.csv", "G_qr.csv"):
        header = (tmp_path / filename).read_text(encoding="utf-8").splitlines()[0]
        assert header.startswith(f"# {filename[:-4]}: entry (row i, column j)")

    stored = read_reduced(tmp_path)
    assert stored.labels == ["a", "b"]
    assert_array_equal(stored.selection.ids, ids)
    assert_array_equal(stored.g_qr, reduced.g_qr)
    assert hidden_links(stored, graph) == hidden_links(reduced, graph)
    # a reaches b only through the scattering network
    assert stored.g_qr[1, 0] > 0.5

    with open(tmp_path / "metadata.json", encoding="utf-8") as file:
        metadata = json.load(file)
    assert metadata["n"] == 6
    assert metadata["converged"]
    assert metadata["selection"][1] == {"node_id": 1, "label": "b"}


def test_reduced_output_with_wrong_shape(tmp_path, hidden_path):
    graph, _report, labels = hidden_path
    selection = ReducedSelection.create([0, 1], graph.n)
    write_reduced(
        tmp_path,
        reduced_google(GoogleOperator(graph), selection),
        selection_labels([0, 1], labels),
    )
    metadata_path = tmp_path / "metadata.json"
    metadata = json.loads(metadata_path.read_text(encoding="utf-8"))
    metadata["selection"].append({"node_id": 2, "label": "x"})
    metadata_path.write_text(json.dumps(metadata), encoding="utf-8")
    with pytest.raises(InputFormatError, match="shape"):
        read_reduced(tmp_path)


def test_empty_source_keeps_a_blank_row():
    per_source = [
        SourceHiddenLinks(source=0, links=[]),
        SourceHiddenLinks(
            source=1,
            links=[HiddenLink(source=1, target=0, weight=0.25, purely_hidden=True)],
        ),
    ]
    frame = hidden_links_frame(per_source, ["a", "b"])
    assert frame["source_label"].tolist() == ["a", "b"]
    assert frame["target_label"].tolist() == ["", "a"]
    assert np.isnan(frame["weight"].iloc[0])


def test_density_outputs(tmp_path, rng):
    n = 500
    pagerank_table = RankTable.from_order(rng.permutation(n))
    cheirank_table = RankTable.from_order(rng.permutation(n))
    grid = density_grid(pagerank_table, cheirank_table)
    write_density(tmp_path, grid)
    lines = (tmp_path / "density.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].split(",")[:3] == ["cell_k", "0", "1"]
    assert len(lines) == 101
    with open(tmp_path / "density_axis.json", encoding="utf-8") as file:
        axis = json.load(file)
    assert len(axis["edges"]) == 101
    assert axis["n"] == n

    ids = np.array([int(pagerank_table.order[0])])
    positions = positions_frame(
        grid, pagerank_table, cheirank_table, ids, NodeLabelMap({})
    )
    assert positions.loc[0, "K"] == 1
    assert positions.loc[0, "cell_k"] == 0


def test_stats_json_includes_ingest(tmp_path, hidden_path):
    graph, report, _labels = hidden_path
    path = tmp_path / "stats.json"
    write_stats_json(path, graph_stats(graph), report)
    with open(path, encoding="utf-8") as file:
        stats = json.load(file)
    assert stats["n"] == 6
    assert stats["edge_count"] == 6
    assert stats["density"] == pytest.approx(6 / 30)
    assert stats["ingest"]["edges_kept"] == 6


def test_run_config_from_options():
    config = RunConfig.from_options(
        {"alpha": "0.9", "tol": "", "method": "projected", "format": "json"},
        nprocs=4,
    )
    assert config.alpha == 0.9
    assert config.tol == RunConfig().tol
    assert config.scatter_method == "projected"
    assert config.nprocs == 4


@pytest.mark.parametrize(
    "options",
    [
        {"alpha": "abc"},
        {"alpha": "1.0"},
        {"tol": "0"},
        {"max_iter": "0"},
        {"method": "lanczos"},
        {"format": "xml"},
    ],
)
def test_run_config_rejects_bad_values(options):
    with pytest.raises(PreconditionError):
        RunConfig.from_options(options)


def test_run_record_is_reproducible(tmp_path, data_dir):
    edges = os.path.join(data_dir, "hidden_path.tsv")
    config = RunConfig(edges=edges, output=str(tmp_path))
    path = write_run_record(tmp_path, config, [edges, "", edges], "m.google_matrix.stats")
    with open(path, "rb") as file:
        first = file.read()
    write_run_record(tmp_path, config, [edges], "m.google_matrix.stats")
    assert (tmp_path / RUN_RECORD).read_bytes() == first

    record = json.loads(first)
    with open(edges, "rb") as file:
        expected = hashlib.sha256(file.read()).hexdigest()
    assert record["inputs"] == {edges: expected}
    assert file_checksum(edges) == expected
    assert record["config"]["alpha"] == 0.85


def test_checksum_of_missing_file(tmp_path):
    with pytest.raises(InputFormatError):
        file_checksum(tmp_path / "missing.tsv")
