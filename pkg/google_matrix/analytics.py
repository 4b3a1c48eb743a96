"""Cross-edition rank aggregation and ranking comparison.

Rankings here are over entity labels (e.g. philosopher article titles)
shared between editions, not over node ids of one network.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from multiprocessing import Pool

import numpy as np
import pandas as pd

from google_matrix.errors import EntityMismatchError, PreconditionError
from google_matrix.google import check_subset, subset_rank

logger = logging.getLogger(__name__)

DENSITY_BINS = 100


@dataclass(frozen=True, eq=False)
class EditionRanking:
    """Local ranks k_pe of a list of entities in one edition (or source)."""

    edition_code: str
    entity_ids: tuple
    local_rank: np.ndarray

    def __post_init__(self):
        entities = tuple(self.entity_ids)
        ranks = np.asarray(self.local_rank, dtype=np.int64)
        object.__setattr__(self, "entity_ids", entities)
        object.__setattr__(self, "local_rank", ranks)
        if len(entities) != ranks.size:
            raise PreconditionError(
                f"{self.edition_code}: {len(entities)} entities but "
                f"{ranks.size} ranks"
            )
        duplicates = pd.Index(entities)
        duplicates = duplicates[duplicates.duplicated()].unique().tolist()
        if duplicates:
            raise PreconditionError(
                f"{self.edition_code}: entities listed more than once: "
                f"{', '.join(map(str, duplicates))}"
            )
        out_of_range = (ranks < 1) | (ranks > ranks.size)
        if out_of_range.any():
            bad = [entities[i] for i in np.flatnonzero(out_of_range)]
            raise PreconditionError(
                f"{self.edition_code}: ranks outside 1..{ranks.size} for "
                f"{', '.join(bad)}"
            )
        if np.unique(ranks).size != ranks.size:
            raise PreconditionError(
                f"{self.edition_code}: ranks are not a permutation of "
                f"1..{ranks.size}"
            )

    @classmethod
    def from_order(cls, edition_code, ordered_entities):
        """Rank entities by their position in ``ordered_entities``."""
        return cls(
            edition_code,
            tuple(ordered_entities),
            np.arange(1, len(ordered_entities) + 1),
        )

    @property
    def n_ph(self):
        return len(self.entity_ids)

    def ranks_for(self, entities):
        """Return the local ranks of ``entities`` in the given order."""
        lookup = dict(zip(self.entity_ids, self.local_rank))
        return np.array([lookup[entity] for entity in entities], dtype=np.int64)

    def restricted(self, entities):
        """Return this ranking over ``entities`` only, re-ranked 1..len."""
        ranks = self.ranks_for(entities)
        order = np.argsort(ranks, kind="stable")
        dense = np.empty(ranks.size, dtype=np.int64)
        dense[order] = np.arange(1, ranks.size + 1)
        return EditionRanking(self.edition_code, tuple(entities), dense)

    def ordered_entities(self):
        """Entities from rank 1 downwards."""
        order = np.argsort(self.local_rank, kind="stable")
        return [self.entity_ids[i] for i in order]


@dataclass(frozen=True, eq=False)
class ThetaTable:
    """Theta scores sorted descending, equal scores ordered by label."""

    entity_ids: tuple
    theta: np.ndarray
    display_rank: np.ndarray
    n_ph: int
    n_ed: int

    def to_frame(self):
        return pd.DataFrame(
            {
                "display_rank": self.display_rank,
                "entity_label": list(self.entity_ids),
                "theta": self.theta,
            }
        )

    def as_ranking(self, edition_code="WIKI"):
        """Return the composite as an ordinal EditionRanking."""
        return EditionRanking.from_order(edition_code, self.entity_ids)


def check_same_entities(rankings):
    """Raise EntityMismatchError listing every deviation from the first."""
    reference = set(rankings[0].entity_ids)
    mismatches = {}
    for ranking in rankings[1:]:
        entities = set(ranking.entity_ids)
        missing = sorted(reference - entities)
        extra = sorted(entities - reference)
        if missing or extra:
            mismatches[ranking.edition_code] = {"missing": missing, "extra": extra}
    if mismatches:
        raise EntityMismatchError(mismatches)


def theta_scores(rankings):
    """Aggregate editions into Theta scores.

    Theta_p = (N_ph * N_ed)^-1 * sum_e (N_ph + 1 - k_pe), bounded by
    1/N_ph (last everywhere) and 1 (first everywhere).

    Args:
        rankings (list): EditionRanking objects over one entity list

    Returns:
        ThetaTable: scores with competition style display ranks
    """
    if not rankings:
        raise PreconditionError("Theta scores need at least one edition ranking")
    check_same_entities(rankings)
    entities = rankings[0].entity_ids
    n_ph = len(entities)
    n_ed = len(rankings)
    local_ranks = np.column_stack([ranking.ranks_for(entities) for ranking in rankings])
    # integer sums keep equal scores exactly equal
    scores = (n_ph + 1 - local_ranks).sum(axis=1)
    frame = pd.DataFrame({"entity_label": list(entities), "score": scores})
    frame = frame.sort_values(
        ["score", "entity_label"], ascending=[False, True], kind="mergesort"
    )
    frame["display_rank"] = (
        frame["score"].rank(method="min", ascending=False).astype(np.int64)
    )
    return ThetaTable(
        entity_ids=tuple(frame["entity_label"]),
        theta=frame["score"].to_numpy() / (n_ph * n_ed),
        display_rank=frame["display_rank"].to_numpy(),
        n_ph=n_ph,
        n_ed=n_ed,
    )


def _tied_pairs(values):
    """Number of unordered pairs with equal values (rows for 2-D input)."""
    if values.ndim == 1:
        _unique, counts = np.unique(values, return_counts=True)
    else:
        _unique, counts = np.unique(values, axis=0, return_counts=True)
    counts = counts.astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())


def count_inversions(values):
    """Count pairs i < j with values[i] > values[j] by bottom-up merge sort."""
    items = list(values)
    size = len(items)
    merged = items[:]
    inversions = 0
    width = 1
    while width < size:
        for low in range(0, size, 2 * width):
            middle = min(low + width, size)
            high = min(low + 2 * width, size)
            left, right, out = low, middle, low
            while left < middle and right < high:
                if items[right] < items[left]:
                    merged[out] = items[right]
                    right += 1
                    inversions += middle - left
                else:
                    merged[out] = items[left]
                    left += 1
                out += 1
            merged[out : out + middle - left] = items[left:middle]
            out += middle - left
            merged[out : out + high - right] = items[right:high]
        items, merged = merged, items
        width *= 2
    return inversions


def kendall_distance(first, second):
    """Kendall distance between two rank assignments of the same items.

    d = 1/(N(N-1)) * sum over pairs of (1 - sign(dK1) * sign(dK2)) with
    sign(0) = 0, so a pair tied in either ranking contributes 1 and a
    discordant pair 2. Runs in O(N log N).

    Args:
        first, second: ranks of item i at position i

    Returns:
        float: distance in [0, 1]
    """
    first = np.asarray(first)
    second = np.asarray(second)
    if first.shape != second.shape or first.ndim != 1:
        raise PreconditionError(
            "Rankings must assign ranks to the same items "
            f"({first.size} vs {second.size} ranks)"
        )
    n = first.size
    if n < 2:
        raise PreconditionError("Kendall distance needs at least two items")
    tied_first = _tied_pairs(first)
    tied_second = _tied_pairs(second)
    tied_both = _tied_pairs(np.column_stack((first, second)))
    tied_any = tied_first + tied_second - tied_both
    order = np.lexsort((second, first))
    discordant = count_inversions(second[order].tolist())
    return (2 * discordant + tied_any) / (n * (n - 1))


def restrict_common(first, second):
    """Restrict two rankings to their common entities and re-rank both.

    The common entities keep the order of ``first``; relative order within
    each ranking is preserved.
    """
    others = set(second.entity_ids)
    common = [entity for entity in first.entity_ids if entity in others]
    if len(common) < 2:
        raise PreconditionError(
            f"Rankings {first.edition_code} and {second.edition_code} share "
            f"{len(common)} entities, at least 2 are needed"
        )
    return first.restricted(common), second.restricted(common)


def ranking_distance(first, second):
    """Kendall distance of two rankings over the same entity set."""
    check_same_entities([first, second])
    return kendall_distance(first.local_rank, second.ranks_for(first.entity_ids))


def _common_distance(first, second):
    first, second = restrict_common(first, second)
    return kendall_distance(first.local_rank, second.local_rank)


def kendall_matrix(rankings, nprocs=1):
    """Symmetric Kendall distance matrix between named rankings.

    Every pair is restricted to its common entities first.

    Returns:
        pandas.DataFrame: distances indexed by edition code on both axes
    """
    codes = [ranking.edition_code for ranking in rankings]
    if len(set(codes)) != len(codes):
        raise PreconditionError(f"Ranking names are not unique: {codes}")
    pairs = list(combinations(range(len(rankings)), 2))
    arguments = [(rankings[i], rankings[j]) for i, j in pairs]
    if nprocs > 1 and len(pairs) > 1:
        with Pool(processes=nprocs) as pool:
            distances = pool.starmap(_common_distance, arguments)
    else:
        distances = [_common_distance(*args) for args in arguments]
    matrix = np.zeros((len(rankings), len(rankings)))
    for (i, j), distance in zip(pairs, distances):
        matrix[i, j] = matrix[j, i] = distance
    return pd.DataFrame(matrix, index=codes, columns=codes)


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Node counts on log10-equidistant (K, K*) cells.

    ``bins[a, b]`` counts nodes with log10 K in cell a and log10 K* in
    cell b. Cells are half open except the last, which is closed.
    """

    bins: np.ndarray
    axis: np.ndarray
    n: int

    def cells(self, k, k_star):
        """Return the (K cell, K* cell) indices of ranks ``k``, ``k_star``."""
        last = self.bins.shape[0] - 1
        k_cell = np.searchsorted(self.axis, np.log10(k), side="right") - 1
        k_star_cell = np.searchsorted(self.axis, np.log10(k_star), side="right") - 1
        return np.clip(k_cell, 0, last), np.clip(k_star_cell, 0, last)


def density_grid(pagerank_table, cheirank_table, bins=DENSITY_BINS):
    """Histogram all nodes on the PageRank-CheiRank plane."""
    n = len(pagerank_table)
    if len(cheirank_table) != n:
        raise PreconditionError(
            f"PageRank table has {n} nodes, CheiRank table "
            f"{len(cheirank_table)}"
        )
    if n < 2:
        raise PreconditionError("The density grid needs at least two nodes")
    axis = np.linspace(0.0, np.log10(n), bins + 1)
    counts, _k_edges, _k_star_edges = np.histogram2d(
        np.log10(pagerank_table.rank_of),
        np.log10(cheirank_table.rank_of),
        bins=[axis, axis],
    )
    return DensityGrid(bins=counts.astype(np.int64), axis=axis, n=n)


def topk_table(rank_table, labels, k, subset=None):
    """Return the labels of the first ``k`` nodes in rank order.

    With ``subset`` only those nodes are ranked, among themselves. Nodes
    without label are listed by their decimal id.
    """
    if subset is None:
        order = rank_table.order
    else:
        ids = check_subset(subset, len(rank_table))
        order = np.empty_like(ids)
        order[subset_rank(rank_table, ids) - 1] = ids
    if not 0 <= k <= order.size:
        raise PreconditionError(f"k={k} exceeds the {order.size} ranked nodes")
    if labels is None:
        return [str(node) for node in order[:k]]
    return [labels.label_or_id(node) for node in order[:k]]
