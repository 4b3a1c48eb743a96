"""Readers and writers of the CSV/JSON files exchanged by the modules.

CSV files carry human-rounded numbers, JSON files full precision.
"""

import json
import logging
import os
import re
from dataclasses import dataclass

import numpy as np
import pandas as pd

from google_matrix.analytics import EditionRanking
from google_matrix.errors import InputFormatError, PreconditionError
from google_matrix.google import RankTable, subset_rank
from google_matrix.graph import NodeLabelMap
from google_matrix.reduced import ReducedSelection

logger = logging.getLogger(__name__)

RANK_COLUMNS = ["rank", "node_id", "label", "probability"]
EDITION_COLUMNS = ["entity_label", "rank"]
HIDDEN_LINK_COLUMNS = ["source_label", "target_label", "weight", "purely_hidden"]
NODE_ID_PATTERN = re.compile(r"[0-9]+")
MATRIX_FILES = {
    "g_r": "G_R.csv",
    "g_rr": "G_rr.csv",
    "g_pr": "G_pr.csv",
    "g_qr": "G_qr.csv",
}
MATRIX_NAMES = {"g_r": "G_R", "g_rr": "G_rr", "g_pr": "G_pr", "g_qr": "G_qr"}
MANIFEST_KINDS = ("edition", "external")


def write_json(path, data):
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        json.dump(data, file, indent=2)
        file.write("\n")


def _to_csv(frame, path, **kwargs):
    frame.to_csv(path, index=False, lineterminator="\n", **kwargs)


def _read_csv(path, columns, what, **kwargs):
    """Read a CSV with a mandatory header, mapping errors to InputFormatError."""
    try:
        frame = pd.read_csv(
            path, keep_default_na=False, encoding="utf-8", **kwargs
        )
    except pd.errors.EmptyDataError:
        raise InputFormatError(f"empty {what}", path) from None
    except (ValueError, pd.errors.ParserError) as err:
        raise InputFormatError(f"malformed {what} ({err})", path) from err
    except OSError as err:
        raise InputFormatError(f"cannot read {what} ({err})", path) from err
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise InputFormatError(
            f"{what} lacks the column(s) {', '.join(missing)} "
            f"(expected header {','.join(columns)})",
            path,
            1,
        )
    return frame


def _integer_column(frame, column, path, what):
    """Return ``column`` as int64, pointing at the first bad line."""
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna() | (values != values.round())
    if bad.any():
        position = int(np.flatnonzero(bad.to_numpy())[0])
        raise InputFormatError(
            f"{what}: <{frame[column].iloc[position]}> is not an integer "
            f"{column}",
            path,
            position + 2,
        )
    return values.to_numpy().astype(np.int64)


# rank tables


def rank_frame(probabilities, rank_table, labels=None):
    """Return the rank table as frame in rank order."""
    order = rank_table.order
    return pd.DataFrame(
        {
            "rank": np.arange(1, order.size + 1),
            "node_id": order,
            "label": [
                labels.label(node, "") if labels is not None else ""
                for node in order
            ],
            "probability": probabilities.values[order],
        }
    )


def write_rank_csv(path, probabilities, rank_table, labels=None):
    _to_csv(rank_frame(probabilities, rank_table, labels), path, float_format="%.10g")


def write_rank_json(path, probabilities, rank_table, report, labels=None):
    frame = rank_frame(probabilities, rank_table, labels)
    write_json(
        path,
        {
            "kind": probabilities.kind,
            "alpha": probabilities.alpha,
            "report": report.to_dict(),
            "ranks": [
                {
                    "rank": int(row.rank),
                    "node_id": int(row.node_id),
                    "label": row.label,
                    "probability": float(row.probability),
                }
                for row in frame.itertuples(index=False)
            ],
        },
    )


def write_rank_outputs(output_dir, fmt, probabilities, rank_table, report, labels=None):
    """Write the rank table in ``fmt`` and the solver report; return paths."""
    kind = probabilities.kind
    rank_path = os.path.join(output_dir, f"{kind}.{fmt}")
    if fmt == "json":
        write_rank_json(rank_path, probabilities, rank_table, report, labels)
    else:
        write_rank_csv(rank_path, probabilities, rank_table, labels)
    report_path = os.path.join(output_dir, f"{kind}_report.json")
    write_json(
        report_path,
        {"kind": kind, "alpha": probabilities.alpha, "report": report.to_dict()},
    )
    return [rank_path, report_path]


def subset_ranking(rank_table, ids, labels=None, edition_code=""):
    """Return the local ranks of the nodes ``ids`` as an EditionRanking."""
    local = subset_rank(rank_table, ids)
    entities = tuple(
        labels.label_or_id(node) if labels is not None else str(node) for node in ids
    )
    return EditionRanking(edition_code, entities, local)


def read_rank_file(path):
    """Read a rank CSV or JSON file written by the pagerank/cheirank modules.

    Returns:
        tuple: (RankTable, NodeLabelMap of the non-empty labels)
    """
    if str(path).endswith(".json"):
        try:
            with open(path, encoding="utf-8") as file:
                ranks = json.load(file)["ranks"]
        except (OSError, ValueError, KeyError, TypeError) as err:
            raise InputFormatError(f"malformed rank file ({err})", path) from err
        frame = pd.DataFrame(ranks, columns=RANK_COLUMNS)
    else:
        frame = _read_csv(
            path, RANK_COLUMNS, "rank file", dtype={"label": str}
        )
    node_ids = _integer_column(frame, "node_id", path, "rank file")
    ranks = _integer_column(frame, "rank", path, "rank file")
    n = node_ids.size
    if not np.array_equal(np.sort(node_ids), np.arange(n)):
        raise InputFormatError(f"node ids are not exactly 0..{n - 1}", path)
    rank_of = np.empty(n, dtype=np.int64)
    rank_of[node_ids] = ranks
    try:
        table = RankTable.from_ranks(rank_of)
    except PreconditionError as err:
        raise InputFormatError(str(err), path) from err
    labels = NodeLabelMap(
        {
            node: label
            for node, label in zip(node_ids, frame["label"].astype(str))
            if label
        }
    )
    return table, labels


# selections and edition rankings


def read_selection_file(path, labels=None, n=None):
    """Resolve a selection file to node ids in file order.

    Every non-blank line holds a node label or a decimal id; labels win
    over ids. All unresolvable lines are reported at once.
    """
    try:
        with open(path, encoding="utf-8", newline=None) as file:
            lines = [(number, line.rstrip("\r\n")) for number, line in enumerate(file, 1)]
    except OSError as err:
        raise InputFormatError(f"cannot read selection file ({err})", path) from err
    ids = []
    unknown = []
    for number, entry in lines:
        if not entry.strip():
            continue
        if labels is not None and entry in labels:
            ids.append(labels.id_of(entry))
        elif NODE_ID_PATTERN.fullmatch(entry.strip()) and (n is None or int(entry) < n):
            ids.append(int(entry))
        else:
            unknown.append(f"line {number}: <{entry}>")
    if unknown:
        raise PreconditionError(
            f"{path}: unknown node label(s) or id(s):\n" + "\n".join(unknown)
        )
    if not ids:
        raise PreconditionError(f"{path}: the selection is empty")
    return ids


def read_edition_ranking(path, edition_code):
    """Read an 'entity_label,rank' file into an EditionRanking."""
    frame = _read_csv(path, EDITION_COLUMNS, "edition ranking", dtype={"entity_label": str})
    ranks = _integer_column(frame, "rank", path, "edition ranking")
    try:
        return EditionRanking(edition_code, tuple(frame["entity_label"]), ranks)
    except PreconditionError as err:
        raise InputFormatError(str(err), path) from err


def write_edition_ranking(path, ranking):
    """Write an EditionRanking in rank order."""
    entities = ranking.ordered_entities()
    frame = pd.DataFrame(
        {
            "entity_label": entities,
            "rank": ranking.ranks_for(entities),
        }
    )
    _to_csv(frame, path)


def read_manifest(path):
    """Read the edition manifest and every ranking it lists.

    Returns:
        list: (EditionRanking, kind) in manifest order
    """
    frame = _read_csv(path, ["edition", "path"], "manifest", dtype=str)
    if "kind" not in frame.columns:
        frame["kind"] = "edition"
    frame["kind"] = frame["kind"].replace("", "edition")
    unknown = frame.loc[~frame["kind"].isin(MANIFEST_KINDS), "kind"]
    if not unknown.empty:
        position = int(unknown.index[0])
        raise InputFormatError(
            f"unknown kind <{unknown.iloc[0]}>, use one of {MANIFEST_KINDS}",
            path,
            position + 2,
        )
    duplicated = frame["edition"].duplicated()
    if duplicated.any():
        position = int(np.flatnonzero(duplicated.to_numpy())[0])
        raise InputFormatError(
            f"edition <{frame['edition'].iloc[position]}> is listed twice",
            path,
            position + 2,
        )
    base = os.path.dirname(os.path.abspath(path))
    rankings = []
    for row in frame.itertuples(index=False):
        ranking_path = row.path
        if not os.path.isabs(ranking_path):
            ranking_path = os.path.join(base, ranking_path)
        rankings.append((read_edition_ranking(ranking_path, row.edition), row.kind))
    return rankings


def manifest_inputs(path):
    """Return the manifest path and the paths of all files it lists."""
    frame = _read_csv(path, ["edition", "path"], "manifest", dtype=str)
    base = os.path.dirname(os.path.abspath(path))
    return [path] + [
        entry if os.path.isabs(entry) else os.path.join(base, entry)
        for entry in frame["path"]
    ]


# reduced matrices and hidden links


@dataclass(frozen=True, eq=False)
class StoredReducedMatrices:
    """G_qr and selection read back from an output directory of the
    reduced module; enough to extract hidden links again.
    """

    selection: ReducedSelection
    labels: list
    g_qr: np.ndarray


def read_reduced(input_dir):
    """Read metadata.json and G_qr.csv written by ``write_reduced``."""
    metadata_path = os.path.join(input_dir, "metadata.json")
    try:
        with open(metadata_path, encoding="utf-8") as file:
            metadata = json.load(file)
        n = int(metadata["n"])
        ids = [int(entry["node_id"]) for entry in metadata["selection"]]
        labels = [str(entry["label"]) for entry in metadata["selection"]]
    except (OSError, ValueError, KeyError, TypeError) as err:
        raise InputFormatError(
            f"malformed reduced matrix metadata ({err})", metadata_path
        ) from err
    g_qr_path = os.path.join(input_dir, MATRIX_FILES["g_qr"])
    g_qr = read_matrix_csv(g_qr_path).to_numpy(dtype=np.float64)
    if g_qr.shape != (len(ids), len(ids)):
        raise InputFormatError(
            f"G_qr has shape {g_qr.shape}, the selection {len(ids)} nodes",
            g_qr_path,
        )
    return StoredReducedMatrices(
        selection=ReducedSelection.create(ids, n), labels=labels, g_qr=g_qr
    )


def write_matrix_csv(path, name, matrix, labels):
    """Write a dense reduced matrix with selection labels on both axes."""
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(
            f"# {name}: entry (row i, column j) is the transition weight "
            "from column node j to row node i\n"
        )
        pd.DataFrame(matrix, index=labels, columns=labels).to_csv(
            file, float_format="%.17g", lineterminator="\n"
        )


def read_matrix_csv(path):
    """Read a matrix CSV back into a frame indexed by selection label."""
    try:
        return pd.read_csv(
            path, skiprows=1, index_col=0, keep_default_na=False, encoding="utf-8"
        )
    except (OSError, ValueError, pd.errors.ParserError) as err:
        raise InputFormatError(f"malformed matrix file ({err})", path) from err


def write_reduced(output_dir, reduced, labels):
    """Write the four matrix CSVs and metadata.json of ``reduced``."""
    for key, filename in MATRIX_FILES.items():
        write_matrix_csv(
            os.path.join(output_dir, filename),
            MATRIX_NAMES[key],
            getattr(reduced, key),
            labels,
        )
    metadata = reduced.diagnostics()
    metadata["selection"] = [
        {"node_id": int(node), "label": label}
        for node, label in zip(reduced.selection.ids, labels)
    ]
    metadata["p_r"] = reduced.p_r.tolist()
    write_json(os.path.join(output_dir, "metadata.json"), metadata)


def hidden_links_frame(per_source, labels):
    """Rows of per-source hidden links; empty sources keep a blank row."""
    rows = []
    for entry in per_source:
        if entry.empty:
            rows.append((labels[entry.source], "", np.nan, ""))
        rows.extend(
            (labels[link.source], labels[link.target], link.weight, link.purely_hidden)
            for link in entry.links
        )
    return pd.DataFrame(rows, columns=HIDDEN_LINK_COLUMNS)


def top_links_frame(links, labels):
    return pd.DataFrame(
        [
            (labels[link.source], labels[link.target], link.weight, link.purely_hidden)
            for link in links
        ],
        columns=HIDDEN_LINK_COLUMNS,
    )


def write_hidden_links_csv(path, frame):
    _to_csv(frame, path, float_format="%.10g")


def write_hidden_links_json(path, per_source, top, labels):
    def link_dict(link):
        return {
            "source_label": labels[link.source],
            "target_label": labels[link.target],
            "weight": link.weight,
            "purely_hidden": link.purely_hidden,
        }

    write_json(
        path,
        {
            "per_source": [
                {
                    "source_label": labels[entry.source],
                    "empty": entry.empty,
                    "links": [link_dict(link) for link in entry.links],
                }
                for entry in per_source
            ],
            "top": [link_dict(link) for link in top],
        },
    )


def write_hidden_link_outputs(output_dir, fmt, per_source, top, labels):
    """Write per-source and global top hidden links; return the paths."""
    if fmt == "json":
        path = os.path.join(output_dir, "hidden_links.json")
        write_hidden_links_json(path, per_source, top, labels)
        return [path]
    per_source_path = os.path.join(output_dir, "hidden_links.csv")
    top_path = os.path.join(output_dir, "hidden_links_top.csv")
    write_hidden_links_csv(per_source_path, hidden_links_frame(per_source, labels))
    write_hidden_links_csv(top_path, top_links_frame(top, labels))
    return [per_source_path, top_path]


def selection_labels(ids, labels=None):
    """Display labels of selected nodes, decimal ids where unlabelled."""
    if labels is None:
        return [str(node) for node in ids]
    return [labels.label_or_id(node) for node in ids]


# rank analytics


def write_theta_csv(path, table):
    _to_csv(table.to_frame(), path, float_format="%.3f")


def write_theta_json(path, table):
    frame = table.to_frame()
    write_json(
        path,
        {
            "n_ph": table.n_ph,
            "n_ed": table.n_ed,
            "theta": [
                {
                    "display_rank": int(row.display_rank),
                    "entity_label": row.entity_label,
                    "theta": float(row.theta),
                }
                for row in frame.itertuples(index=False)
            ],
        },
    )


def write_kendall_csv(path, matrix):
    matrix.to_csv(path, float_format="%.6f", lineterminator="\n")


def write_kendall_json(path, matrix):
    write_json(
        path,
        {
            "names": list(matrix.index),
            "distances": matrix.to_numpy().tolist(),
        },
    )


def write_density(output_dir, grid):
    """Write density.csv (rows K cells, columns K* cells) and its axis JSON."""
    cells = range(grid.bins.shape[0])
    frame = pd.DataFrame(grid.bins, index=cells, columns=cells)
    frame.index.name = "cell_k"
    frame.to_csv(os.path.join(output_dir, "density.csv"), lineterminator="\n")
    write_json(
        os.path.join(output_dir, "density_axis.json"),
        {
            "n": grid.n,
            "rows": "log10 K",
            "columns": "log10 K_star",
            "edges": grid.axis.tolist(),
        },
    )


def positions_frame(grid, pagerank_table, cheirank_table, ids, labels):
    k = pagerank_table.rank_of[ids]
    k_star = cheirank_table.rank_of[ids]
    cell_k, cell_k_star = grid.cells(k, k_star)
    return pd.DataFrame(
        {
            "label": [labels.label_or_id(node) for node in ids],
            "node_id": ids,
            "K": k,
            "K_star": k_star,
            "cell_k": cell_k,
            "cell_k_star": cell_k_star,
        }
    )


def write_stats_json(path, stats, ingest=None):
    data = stats.to_dict()
    if ingest is not None:
        data["ingest"] = ingest.to_dict()
    write_json(path, data)
