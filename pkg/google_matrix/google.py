"""Matrix-free Google operator, PageRank and CheiRank.

The Google matrix is never formed. For a graph with N nodes and damping
factor alpha it reads

    G_ij = alpha * S_ij + (1 - alpha) / N,

with S_ij = A_ij / k_out(j) for nodes j with outgoing links and
S_ij = 1 / N for dangling nodes j. Columns are sources, rows are targets.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse import csr_array

from google_matrix.errors import ConvergenceError, PreconditionError
from google_matrix.graph import transpose

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.85
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1000
# allowed drift of sum(P) from 1 during the power iteration
NORMALIZATION_TOL = 1e-12

PAGERANK = "pagerank"
CHEIRANK = "cheirank"


def check_alpha(alpha):
    """Return ``alpha`` as float or raise if it is outside (0, 1)."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise PreconditionError(f"Damping factor must lie in (0, 1), got {alpha}")
    return alpha


def check_solver_limits(tol, max_iter):
    if not tol > 0:
        raise PreconditionError(f"Tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise PreconditionError(f"max_iter must be at least 1, got {max_iter}")


class GoogleOperator:
    """Implicit Google matrix of a DirectedGraph.

    Applying the operator costs O(N + N_l). Instances are read-only after
    construction and can be shared between threads and worker processes.
    """

    def __init__(self, graph, alpha=DEFAULT_ALPHA):
        self.graph = graph
        self.alpha = check_alpha(alpha)
        self.dangling_set = graph.dangling
        self._dangling_nodes = np.flatnonzero(self.dangling_set)
        inv_out_degree = np.zeros(graph.n)
        linked = ~self.dangling_set
        inv_out_degree[linked] = 1.0 / graph.out_degree[linked]
        self.inv_out_degree = inv_out_degree
        # rows = targets, columns = sources, entries A_ij / k_out(j)
        reverse = graph.adjacency.T.tocsr()
        self._link_matrix = csr_array(
            (inv_out_degree[reverse.indices], reverse.indices, reverse.indptr),
            shape=reverse.shape,
        )

    @property
    def n(self):
        return self.graph.n

    def _check_vector(self, vector):
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (self.n,):
            raise PreconditionError(
                f"Vector of shape {vector.shape} does not match N={self.n}"
            )
        return vector

    def apply(self, vector, out=None):
        """Return G @ vector, written into ``out`` if given."""
        vector = self._check_vector(vector)
        total = vector.sum()
        dangling_mass = vector[self._dangling_nodes].sum()
        out = np.multiply(self._link_matrix @ vector, self.alpha, out=out)
        out += (self.alpha * dangling_mass + (1.0 - self.alpha) * total) / self.n
        return out

    def apply_transpose(self, vector):
        """Return G.T @ vector."""
        vector = self._check_vector(vector)
        total = vector.sum()
        result = self.graph.adjacency @ vector
        result *= self.alpha * self.inv_out_degree
        result[self._dangling_nodes] = self.alpha * total / self.n
        result += (1.0 - self.alpha) * total / self.n
        return result

    def column(self, node):
        """Return column ``node`` of G, the transitions leaving ``node``."""
        column = np.full(self.n, (1.0 - self.alpha) / self.n)
        if self.dangling_set[node]:
            column += self.alpha / self.n
        else:
            column[self.graph.successors(node)] += (
                self.alpha * self.inv_out_degree[node]
            )
        return column


def apply_google(operator, vector):
    """Apply the Google operator to ``vector`` (see GoogleOperator.apply)."""
    return operator.apply(vector)


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Steady-state probabilities P (pagerank) or P* (cheirank)."""

    values: np.ndarray
    kind: str = PAGERANK
    alpha: float = DEFAULT_ALPHA

    def __len__(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class RankTable:
    """Nodes ordered by descending probability.

    ``order[k]`` is the node at position k (0 based), ``rank_of[node]`` is
    the 1 based rank K (or K*) of a node.
    """

    order: np.ndarray
    rank_of: np.ndarray

    @classmethod
    def from_probabilities(cls, values):
        """Sort by descending probability, equal values by ascending id."""
        values = np.asarray(values, dtype=np.float64)
        node_ids = np.arange(values.size)
        order = np.lexsort((node_ids, -values))
        return cls.from_order(order)

    @classmethod
    def from_order(cls, order):
        order = np.asarray(order, dtype=np.int64)
        rank_of = np.empty_like(order)
        rank_of[order] = np.arange(1, order.size + 1)
        return cls(order=order, rank_of=rank_of)

    @classmethod
    def from_ranks(cls, rank_of):
        """Build a table from 1 based ranks per node (a permutation)."""
        rank_of = np.asarray(rank_of, dtype=np.int64)
        n = rank_of.size
        if not np.array_equal(np.sort(rank_of), np.arange(1, n + 1)):
            raise PreconditionError(f"Ranks are not a permutation of 1..{n}")
        order = np.empty_like(rank_of)
        order[rank_of - 1] = np.arange(n)
        return cls(order=order, rank_of=rank_of)

    def __len__(self):
        return self.order.size


@dataclass(frozen=True)
class SolverReport:
    """Outcome of an iterative solve."""

    iterations: int
    residual: float
    converged: bool
    tol: float

    def to_dict(self):
        return asdict(self)

    def raise_for_convergence(self, what="power iteration"):
        """Raise ConvergenceError if the solve stopped at max_iter."""
        if not self.converged:
            raise ConvergenceError(
                f"{what} did not converge in {self.iterations} iterations "
                f"(residual {self.residual:.3e} > tol {self.tol:.1e})",
                report=self,
            )


def power_iteration(operator, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, start=None):
    """Iterate P <- G P until the L1 change is at most ``tol``.

    Args:
        operator (GoogleOperator): the Google operator
        tol (float): L1 tolerance on successive iterates
        max_iter (int): iteration limit
        start (array): initial distribution, uniform if not given

    Returns:
        tuple: (probabilities as ndarray, SolverReport)
    """
    check_solver_limits(tol, max_iter)
    n = operator.n
    if start is None:
        current = np.full(n, 1.0 / n)
    else:
        current = np.array(start, dtype=np.float64)
        if current.shape != (n,) or (current < 0).any() or current.sum() <= 0:
            raise PreconditionError(
                "Start vector must be a non-negative length-N vector"
            )
        current /= current.sum()

    # two work buffers swapped every step
    following = np.empty(n)
    difference = np.empty(n)
    residual = np.inf
    iteration = 0
    for iteration in range(1, max_iter + 1):
        operator.apply(current, out=following)
        np.subtract(following, current, out=difference)
        residual = float(np.abs(difference, out=difference).sum())
        assert abs(following.sum() - 1.0) <= NORMALIZATION_TOL, (
            f"normalization lost in iteration {iteration}"
        )
        current, following = following, current
        logger.debug("Iteration %d: L1 change %.3e", iteration, residual)
        if residual <= tol:
            break
    current /= current.sum()
    report = SolverReport(
        iterations=iteration,
        residual=residual,
        converged=residual <= tol,
        tol=tol,
    )
    if report.converged:
        logger.info(
            "Power iteration converged after %d iterations (residual %.3e)",
            iteration,
            residual,
        )
    else:
        logger.warning(
            "Power iteration stopped after %d iterations with residual %.3e "
            "above tol %.1e",
            iteration,
            residual,
            tol,
        )
    return current, report


def pagerank(
    graph,
    alpha=DEFAULT_ALPHA,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    start=None,
    kind=PAGERANK,
):
    """Compute the PageRank of ``graph``.

    Returns:
        tuple: (ProbabilityVector, RankTable, SolverReport); a report with
               ``converged=False`` flags a partial result
    """
    operator = GoogleOperator(graph, alpha)
    values, report = power_iteration(operator, tol, max_iter, start)
    probabilities = ProbabilityVector(values=values, kind=kind, alpha=operator.alpha)
    return probabilities, RankTable.from_probabilities(values), report


def cheirank(
    graph, alpha=DEFAULT_ALPHA, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, start=None
):
    """Compute the CheiRank of ``graph``: the PageRank of the reversed graph."""
    return pagerank(transpose(graph), alpha, tol, max_iter, start, kind=CHEIRANK)


def check_subset(subset, n):
    """Validate node ids of a subset; return them as int64 array."""
    ids = np.asarray(subset, dtype=np.int64)
    if ids.ndim != 1 or ids.size == 0:
        raise PreconditionError("Subset must be a non-empty list of node ids")
    unknown = ids[(ids < 0) | (ids >= n)]
    if unknown.size:
        raise PreconditionError(
            f"Subset contains node ids outside [0, {n}): {unknown.tolist()}"
        )
    values, counts = np.unique(ids, return_counts=True)
    duplicates = values[counts > 1]
    if duplicates.size:
        raise PreconditionError(
            f"Subset contains duplicate node ids: {duplicates.tolist()}"
        )
    return ids


def subset_rank(rank_table, subset):
    """Return the local ranks k (1..|subset|) of subset members.

    Members are ranked among themselves by their global rank.
    """
    ids = check_subset(subset, len(rank_table))
    order = np.argsort(rank_table.rank_of[ids], kind="stable")
    local = np.empty(ids.size, dtype=np.int64)
    local[order] = np.arange(1, ids.size + 1)
    return local
