"""Directed 0/1 networks in compressed sparse row form.

The adjacency is stored source-major: row ``j`` of ``DirectedGraph.adjacency``
lists the targets ``i`` of all links ``j -> i``, i.e. the non-zero entries
``A_ij`` of column ``j`` of the adjacency matrix.
"""

import csv
import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd
from scipy.sparse import coo_array, csr_array

from google_matrix.errors import InputFormatError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Immutable directed graph without duplicate links and self-loops."""

    adjacency: csr_array

    def __post_init__(self):
        adjacency = self.adjacency
        out_degree = np.diff(adjacency.indptr).astype(np.int64)
        in_degree = np.bincount(adjacency.indices, minlength=self.n).astype(
            np.int64
        )
        out_degree.flags.writeable = False
        in_degree.flags.writeable = False
        object.__setattr__(self, "out_degree", out_degree)
        object.__setattr__(self, "in_degree", in_degree)

    @property
    def n(self):
        """Number of nodes N."""
        return self.adjacency.shape[0]

    @property
    def edge_count(self):
        """Number of distinct directed links N_l."""
        return int(self.adjacency.nnz)

    @property
    def dangling(self):
        """Boolean mask of nodes without outgoing links."""
        return self.out_degree == 0

    def successors(self, node):
        """Sorted targets of the links leaving ``node``."""
        start, stop = self.adjacency.indptr[node], self.adjacency.indptr[node + 1]
        return self.adjacency.indices[start:stop]

    def has_edge(self, source, target):
        """Return whether the link ``source -> target`` exists."""
        targets = self.successors(source)
        pos = np.searchsorted(targets, target)
        return bool(pos < targets.size and targets[pos] == target)

    def edges(self):
        """Return the (source, target) arrays in canonical sorted order."""
        sources = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degree)
        return sources, self.adjacency.indices.astype(np.int64)

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.adjacency.indptr, other.adjacency.indptr)
            and np.array_equal(self.adjacency.indices, other.adjacency.indices)
        )

    __hash__ = None


@dataclass(frozen=True)
class GraphStats:
    """Structural statistics of a graph (edition table columns)."""

    n: int
    edge_count: int
    density: float
    mean_degree: float
    dangling_count: int

    @classmethod
    def from_counts(cls, n, edge_count, dangling_count=0):
        """Compute the statistics from the node and link counts alone."""
        if n < 2:
            raise PreconditionError(
                f"Graph density is undefined for fewer than two nodes (n={n})"
            )
        return cls(
            n=int(n),
            edge_count=int(edge_count),
            density=edge_count / (n * (n - 1)),
            mean_degree=edge_count / n,
            dangling_count=int(dangling_count),
        )

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class IngestReport:
    """What happened to the raw edge list while building a graph."""

    edges_read: int
    self_loops: int
    duplicates: int
    edges_kept: int

    def to_dict(self):
        return asdict(self)


class NodeLabelMap:
    """Bidirectional map between dense node ids and label strings."""

    def __init__(self, labels):
        self._labels = {}
        self._ids = {}
        for node_id, label in dict(labels).items():
            node_id = int(node_id)
            if node_id < 0:
                raise PreconditionError(f"Negative node id {node_id} in labels")
            if label in self._ids:
                raise PreconditionError(
                    f"Label <{label}> is used for node {self._ids[label]} "
                    f"and node {node_id}"
                )
            self._labels[node_id] = label
            self._ids[label] = node_id

    def __len__(self):
        return len(self._labels)

    def __contains__(self, label):
        return label in self._ids

    @property
    def max_id(self):
        """Largest labelled node id, -1 for an empty map."""
        return max(self._labels, default=-1)

    def label(self, node_id, default=None):
        """Return the label of ``node_id`` or ``default``."""
        return self._labels.get(int(node_id), default)

    def label_or_id(self, node_id):
        """Return the label of ``node_id``, falling back to its decimal id."""
        return self._labels.get(int(node_id), str(int(node_id)))

    def id_of(self, label):
        """Return the node id of ``label``."""
        try:
            return self._ids[label]
        except KeyError:
            raise PreconditionError(f"Unknown node label <{label}>") from None

    def items(self):
        return sorted(self._labels.items())


def _from_arrays(sources, targets, n):
    """Build a graph from validated id arrays; return graph and report."""
    edges_read = int(sources.size)
    loops = sources == targets
    self_loops = int(np.count_nonzero(loops))
    if self_loops:
        sources = sources[~loops]
        targets = targets[~loops]
    matrix = coo_array(
        (np.ones(sources.size, dtype=np.int32), (sources, targets)),
        shape=(n, n),
    ).tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    adjacency = csr_array(
        (np.ones(matrix.nnz, dtype=np.int8), matrix.indices, matrix.indptr),
        shape=(n, n),
    )
    graph = DirectedGraph(adjacency)
    report = IngestReport(
        edges_read=edges_read,
        self_loops=self_loops,
        duplicates=edges_read - self_loops - graph.edge_count,
        edges_kept=graph.edge_count,
    )
    return graph, report


def _check_ids(sources, targets, n):
    """Return the position of the first edge with an id outside [0, n)."""
    bad = (sources < 0) | (sources >= n) | (targets < 0) | (targets >= n)
    positions = np.flatnonzero(bad)
    return int(positions[0]) if positions.size else None


def build_graph(edge_list, n):
    """Build a graph from (source, target) id pairs.

    Duplicate links are collapsed and self-loops dropped.

    Args:
        edge_list: sequence of (source, target) pairs or an (E, 2) array
        n (int): number of nodes

    Returns:
        DirectedGraph: the graph
    """
    graph, _report = build_graph_with_report(edge_list, n)
    return graph


def build_graph_with_report(edge_list, n):
    """Build a graph like ``build_graph`` and return the IngestReport too."""
    if n < 1:
        raise PreconditionError(f"Node count must be positive, got {n}")
    pairs = np.asarray(edge_list, dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise PreconditionError("Edge list must consist of (source, target) pairs")
    sources, targets = pairs[:, 0], pairs[:, 1]
    position = _check_ids(sources, targets, n)
    if position is not None:
        raise PreconditionError(
            f"Edge at position {position} ({sources[position]}, "
            f"{targets[position]}) has a node id outside [0, {n})"
        )
    return _from_arrays(sources, targets, n)


def transpose(graph):
    """Return the graph with every link reversed."""
    reversed_adjacency = graph.adjacency.T.tocsr()
    reversed_adjacency.sort_indices()
    return DirectedGraph(reversed_adjacency)


def graph_stats(graph):
    """Return N, N_l, density, mean degree and dangling count of ``graph``."""
    return GraphStats.from_counts(
        graph.n,
        graph.edge_count,
        int(np.count_nonzero(graph.dangling)),
    )


def _data_lines(path):
    """Yield (line number, stripped line) for non-comment, non-blank lines."""
    with open(path, encoding="utf-8", newline=None) as file:
        for number, line in enumerate(file, start=1):
            stripped = line.rstrip("\r\n")
            if not stripped.strip() or stripped.startswith("#"):
                continue
            yield number, stripped


def _scan_edge_file(path):
    """Parse an edge file line by line; raise at the first malformed line."""
    for number, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 2:
            raise InputFormatError(
                f"expected 'src<TAB>dst', found {len(fields)} field(s)",
                path,
                number,
            )
        for field in fields:
            try:
                int(field.strip())
            except ValueError:
                raise InputFormatError(
                    f"<{field}> is not a decimal node id", path, number
                ) from None


def _line_of_record(path, position):
    """Return the file line number of the ``position``-th data line."""
    for index, (number, _line) in enumerate(_data_lines(path)):
        if index == position:
            return number
    return None


def read_edge_file(path, n=None, min_nodes=0):
    """Read a tab separated edge file into a graph.

    Lines starting with '#' and blank lines are ignored, LF and CRLF line
    ends are accepted.

    Args:
        path (str): edge file
        n (int): node count; defaults to the largest id + 1
        min_nodes (int): lower bound for the derived node count, e.g. from
                         a label file listing isolated nodes

    Returns:
        tuple: (DirectedGraph, IngestReport)
    """
    logger.info("Reading edge file %s", path)
    try:
        frame = pd.read_csv(
            path,
            sep="\t",
            header=None,
            comment="#",
            dtype=np.int64,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame(np.empty((0, 2), dtype=np.int64))
    except (ValueError, pd.errors.ParserError) as err:
        _scan_edge_file(path)
        raise InputFormatError(str(err), path) from err
    except OSError as err:
        raise InputFormatError(f"cannot read edge file ({err})", path) from err
    if frame.shape[1] != 2:
        _scan_edge_file(path)
        raise InputFormatError("expected two columns 'src<TAB>dst'", path)

    sources = frame.iloc[:, 0].to_numpy(dtype=np.int64)
    targets = frame.iloc[:, 1].to_numpy(dtype=np.int64)
    if n is None:
        n = int(max(sources.max(initial=-1), targets.max(initial=-1))) + 1
        n = max(n, int(min_nodes))
    if n < 1:
        raise PreconditionError(f"Edge file {path} defines no nodes")
    position = _check_ids(sources, targets, n)
    if position is not None:
        raise InputFormatError(
            f"node id outside [0, {n}) in edge "
            f"({sources[position]}, {targets[position]})",
            path,
            _line_of_record(path, position),
        )
    graph, report = _from_arrays(sources, targets, n)
    if report.self_loops or report.duplicates:
        logger.info(
            "Dropped %d self-loop(s) and collapsed %d duplicate link(s)",
            report.self_loops,
            report.duplicates,
        )
    return graph, report


def write_edge_file(graph, path):
    """Write ``graph`` as canonical sorted 'src<TAB>dst' lines."""
    sources, targets = graph.edges()
    pd.DataFrame({"src": sources, "dst": targets}).to_csv(
        path, sep="\t", header=False, index=False, lineterminator="\n"
    )


def read_label_file(path):
    """Read an 'id<TAB>label' file into a NodeLabelMap."""
    try:
        frame = pd.read_csv(
            path,
            sep="\t",
            header=None,
            names=["id", "label"],
            dtype={"id": np.int64, "label": str},
            quoting=csv.QUOTE_NONE,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        return NodeLabelMap({})
    except (ValueError, pd.errors.ParserError) as err:
        raise InputFormatError(str(err), path) from err
    except OSError as err:
        raise InputFormatError(f"cannot read label file ({err})", path) from err
    duplicated = frame["id"].duplicated()
    if duplicated.any():
        node_id = frame.loc[duplicated, "id"].iloc[0]
        raise InputFormatError(f"node id {node_id} is labelled twice", path)
    return NodeLabelMap(zip(frame["id"], frame["label"]))


def load_network(edge_path, label_path=None, nodes=None):
    """Read an edge file and its optional label file.

    The node count is the largest of: the largest edge id + 1, the largest
    labelled id + 1 and ``nodes``.

    Returns:
        tuple: (DirectedGraph, IngestReport, NodeLabelMap or None)
    """
    labels = read_label_file(label_path) if label_path else None
    min_nodes = int(nodes or 0)
    if labels is not None:
        min_nodes = max(min_nodes, labels.max_id + 1)
    graph, report = read_edge_file(edge_path, min_nodes=min_nodes)
    return graph, report, labels


def write_label_file(labels, path):
    """Write a NodeLabelMap as 'id<TAB>label' lines."""
    items = labels.items()
    pd.DataFrame(items, columns=["id", "label"]).to_csv(
        path,
        sep="\t",
        header=False,
        index=False,
        quoting=csv.QUOTE_NONE,
        lineterminator="\n",
    )
