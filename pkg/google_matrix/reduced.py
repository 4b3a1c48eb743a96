"""Reduced Google matrix of a node selection and its hidden links.

For a selection r of N_r nodes and the scattering network s of the other
N_s = N - N_r nodes

    G_R = G_rr + G_rs (1 - G_ss)^-1 G_sr = G_rr + G_pr + G_qr

where G_pr is the contribution of the leading eigenmode of G_ss and
G_qr the remaining indirect transitions. All matrices use the column =
source convention of the Google matrix. G_ss is only ever applied to
vectors: apply G to the zero padded scatterer vector, then zero the
selection coordinates.
"""

import logging
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from google_matrix.errors import PreconditionError
from google_matrix.google import (
    DEFAULT_TOL,
    SolverReport,
    check_solver_limits,
    check_subset,
    pagerank,
)

logger = logging.getLogger(__name__)

DEFAULT_SCATTER_TOL = 1e-10
DEFAULT_SCATTER_MAX_ITER = 10000
DEFAULT_PAGERANK_TOL = DEFAULT_TOL
# G_qr weights not above max(RTOL * max|G_qr|, ATOL) count as zero
ZERO_WEIGHT_RTOL = 1e-8
ZERO_WEIGHT_ATOL = 1e-9
FIXED_POINT = "fixed_point"
PROJECTED = "projected"
SCATTER_METHODS = (FIXED_POINT, PROJECTED)


@dataclass(frozen=True, eq=False)
class ReducedSelection:
    """Ordered nodes of interest; the order defines matrix rows/columns."""

    ids: np.ndarray
    n: int

    @classmethod
    def create(cls, ids, n):
        ids = check_subset(ids, n).copy()
        ids.flags.writeable = False
        return cls(ids=ids, n=int(n))

    @property
    def n_r(self):
        return self.ids.size

    @property
    def n_s(self):
        return self.n - self.ids.size

    @property
    def mask(self):
        """Boolean mask of the selected nodes over all N nodes."""
        mask = np.zeros(self.n, dtype=bool)
        mask[self.ids] = True
        return mask


@dataclass(frozen=True)
class HiddenLink:
    """A G_qr entry between two selection positions."""

    source: int
    target: int
    weight: float
    purely_hidden: bool


@dataclass(frozen=True)
class SourceHiddenLinks:
    """Hidden links leaving one selection node, strongest first.

    ``empty`` flags a source without any eligible positive G_qr entry.
    """

    source: int
    links: list

    @property
    def empty(self):
        return not self.links


@dataclass(eq=False)
class ScatterSolution:
    """Result of the scattering network solves.

    ``gain`` is G_rs (1 - G_ss)^-1 G_sr. The leading mode of G_ss is given
    by ``leading_value`` (lambda_c) and the right/left vectors
    ``psi_right``/``psi_left``, both zero on the selection and with unit
    L1 norm.
    """

    gain: np.ndarray
    leading_value: float
    psi_right: np.ndarray
    psi_left: np.ndarray
    leading_response: np.ndarray
    leading_weights: np.ndarray
    column_reports: list
    right_report: SolverReport
    left_report: SolverReport
    method: str = FIXED_POINT
    vectors: list = field(default=None)

    @property
    def converged(self):
        reports = [self.right_report, self.left_report, *self.column_reports]
        return all(report.converged for report in reports)

    def raise_for_convergence(self):
        self.right_report.raise_for_convergence("leading right vector of G_ss")
        self.left_report.raise_for_convergence("leading left vector of G_ss")
        for position, report in enumerate(self.column_reports):
            report.raise_for_convergence(f"scatter solve of column {position}")


@dataclass(eq=False)
class ReducedMatrices:
    """G_R and its decomposition for one selection."""

    selection: ReducedSelection
    alpha: float
    g_r: np.ndarray
    g_rr: np.ndarray
    g_pr: np.ndarray
    g_qr: np.ndarray
    p_r: np.ndarray
    p_r_normalized: np.ndarray
    pagerank: np.ndarray
    pagerank_report: SolverReport
    scatter: ScatterSolution

    @property
    def converged(self):
        return self.pagerank_report.converged and self.scatter.converged

    def raise_for_convergence(self):
        self.pagerank_report.raise_for_convergence("PageRank")
        self.scatter.raise_for_convergence()

    @property
    def p_s_total(self):
        """PageRank mass of the scattering network."""
        return float(self.pagerank.sum() - self.p_r.sum())

    def projector_similarity(self):
        """Cosine similarity of the G_pr column direction to p_r."""
        direction = self.scatter.leading_response
        norm = np.linalg.norm(direction) * np.linalg.norm(self.p_r_normalized)
        if norm == 0:
            return 0.0
        return float(direction @ self.p_r_normalized / norm)

    def diagnostics(self):
        """Summary numbers of the decomposition, all JSON serialisable."""
        n_r = self.selection.n_r
        column_reports = self.scatter.column_reports
        return {
            "n": self.selection.n,
            "n_r": n_r,
            "alpha": self.alpha,
            "lambda_c": self.scatter.leading_value,
            "scatter_method": self.scatter.method,
            "converged": bool(self.converged),
            "weights": {
                "g_r": float(self.g_r.sum() / n_r),
                "g_rr": float(self.g_rr.sum() / n_r),
                "g_pr": float(self.g_pr.sum() / n_r),
                "g_qr": float(self.g_qr.sum() / n_r),
            },
            "g_pr_cosine_to_p_r": self.projector_similarity(),
            "p_s_total": self.p_s_total,
            "pagerank": self.pagerank_report.to_dict(),
            "psi_right": self.scatter.right_report.to_dict(),
            "psi_left": self.scatter.left_report.to_dict(),
            "columns": [report.to_dict() for report in column_reports],
        }


def extract_grr(operator, selection):
    """Return G_rr, the Google matrix entries among the selected nodes."""
    ids = selection.ids
    n = operator.n
    alpha = operator.alpha
    # rows of the sub-adjacency are sources, transpose to column = source
    direct = operator.graph.adjacency[ids][:, ids].toarray().T.astype(np.float64)
    g_rr = alpha * direct * operator.inv_out_degree[ids][np.newaxis, :]
    g_rr += (1.0 - alpha) / n
    g_rr[:, operator.dangling_set[ids]] = 1.0 / n
    return g_rr


class _ScatterOperator:
    """G_ss and its transpose acting on vectors supported on the scatterers."""

    def __init__(self, operator, selection):
        self.operator = operator
        self.ids = selection.ids

    def restrict(self, vector):
        vector[self.ids] = 0.0
        return vector

    def apply(self, vector):
        return self.restrict(self.operator.apply(vector))

    def apply_transpose(self, vector):
        return self.restrict(self.operator.apply_transpose(vector))

    def response(self, vector):
        """Return G_rs @ vector for a scatterer supported vector."""
        return self.operator.apply(vector)[self.ids]


def _leading_vector(apply, start, tol, max_iter):
    """Power iteration for the Perron vector of a positive operator."""
    current = start / start.sum()
    value = 0.0
    residual = np.inf
    iteration = 0
    for iteration in range(1, max_iter + 1):
        following = apply(current)
        value = float(following.sum())
        following /= value
        residual = float(np.abs(following - current).sum())
        current = following
        if residual <= tol:
            break
    report = SolverReport(
        iterations=iteration,
        residual=residual,
        converged=residual <= tol,
        tol=tol,
    )
    return value, current, report


class _ColumnSolver:
    """Solves x = G_ss x + b_j for one selection column j."""

    def __init__(self, scatter, method, tol, max_iter, leading, keep_vectors):
        self.scatter = scatter
        self.method = method
        self.tol = tol
        self.max_iter = max_iter
        self.leading_value, self.psi_right, self.psi_left = leading
        self.overlap = float(self.psi_left @ self.psi_right)
        self.keep_vectors = keep_vectors

    def leading_weight(self, vector):
        return float(self.psi_left @ vector) / self.overlap

    def __call__(self, position):
        node = self.scatter.ids[position]
        source = self.scatter.restrict(self.scatter.operator.column(node))
        weight = self.leading_weight(source)
        if self.method == PROJECTED:
            source = source - weight * self.psi_right
        current = source.copy()
        residual = np.inf
        iteration = 0
        for iteration in range(1, self.max_iter + 1):
            following = self.scatter.apply(current)
            if self.method == PROJECTED:
                following -= self.leading_weight(following) * self.psi_right
            following += source
            residual = float(np.abs(following - current).sum())
            current = following
            if residual <= self.tol:
                break
        if self.method == PROJECTED:
            current += weight / (1.0 - self.leading_value) * self.psi_right
        report = SolverReport(
            iterations=iteration,
            residual=residual,
            converged=residual <= self.tol,
            tol=self.tol,
        )
        vector = current if self.keep_vectors else None
        return self.scatter.response(current), weight, report, vector


# set in every worker process by _init_worker
_WORKER_SOLVER = None


def _init_worker(solver):
    global _WORKER_SOLVER
    _WORKER_SOLVER = solver


def _solve_in_worker(position):
    return _WORKER_SOLVER(position)


def solve_scatter(
    operator,
    selection,
    tol=DEFAULT_SCATTER_TOL,
    max_iter=DEFAULT_SCATTER_MAX_ITER,
    nprocs=1,
    method=FIXED_POINT,
    keep_vectors=False,
):
    """Solve the scattering network for every selection column.

    Args:
        operator (GoogleOperator): operator of the full network
        selection (ReducedSelection): nodes of interest, N_r < N
        tol (float): L1 tolerance of the fixed point and eigen iterations
        max_iter (int): iteration limit of every single solve
        nprocs (int): number of worker processes for the column solves
        method (str): "fixed_point" iterates x <- G_ss x + b, "projected"
                      treats the leading mode of G_ss analytically
        keep_vectors (bool): keep the N-long solution vectors x_j

    Returns:
        ScatterSolution: the solution; solver failures are flagged in the
                         reports, not raised
    """
    check_solver_limits(tol, max_iter)
    if method not in SCATTER_METHODS:
        raise PreconditionError(
            f"Unknown scatter method <{method}>, use one of {SCATTER_METHODS}"
        )
    if selection.n != operator.n:
        raise PreconditionError(
            f"Selection over {selection.n} nodes does not match the "
            f"network with {operator.n} nodes"
        )
    if selection.n_s == 0:
        raise PreconditionError(
            "The selection contains every node, there is no scattering network"
        )
    scatter = _ScatterOperator(operator, selection)
    start = (~selection.mask).astype(np.float64)

    logger.info("Computing the leading eigenmode of G_ss ...")
    leading_value, psi_right, right_report = _leading_vector(
        scatter.apply, start, tol, max_iter
    )
    _left_value, psi_left, left_report = _leading_vector(
        scatter.apply_transpose, start, tol, max_iter
    )
    logger.info("Leading eigenvalue of G_ss: lambda_c = %.12f", leading_value)
    for what, report in (("right", right_report), ("left", left_report)):
        if not report.converged:
            logger.warning(
                "Leading %s vector of G_ss not converged after %d iterations",
                what,
                report.iterations,
            )

    solver = _ColumnSolver(
        scatter,
        method,
        tol,
        max_iter,
        (leading_value, psi_right, psi_left),
        keep_vectors,
    )
    positions = range(selection.n_r)
    logger.info(
        "Solving %d scatter column(s) with %s iteration ...",
        selection.n_r,
        method,
    )
    if nprocs > 1 and selection.n_r > 1:
        with Pool(
            processes=min(nprocs, selection.n_r),
            initializer=_init_worker,
            initargs=(solver,),
        ) as pool:
            results = pool.map(_solve_in_worker, positions)
    else:
        results = [solver(position) for position in positions]

    gain = np.column_stack([result[0] for result in results])
    weights = np.array([result[1] for result in results])
    reports = [result[2] for result in results]
    for position, report in enumerate(reports):
        if not report.converged:
            logger.warning(
                "Scatter solve of column %d stopped after %d iterations "
                "(residual %.3e, lambda_c = %.12f)",
                position,
                report.iterations,
                report.residual,
                leading_value,
            )
    return ScatterSolution(
        gain=gain,
        leading_value=leading_value,
        psi_right=psi_right,
        psi_left=psi_left,
        leading_response=scatter.response(psi_right),
        leading_weights=weights,
        column_reports=reports,
        right_report=right_report,
        left_report=left_report,
        method=method,
        vectors=[result[3] for result in results] if keep_vectors else None,
    )


def reduced_google(
    operator,
    selection,
    tol=DEFAULT_SCATTER_TOL,
    max_iter=DEFAULT_SCATTER_MAX_ITER,
    nprocs=1,
    method=FIXED_POINT,
    pagerank_tol=DEFAULT_PAGERANK_TOL,
    pagerank_max_iter=None,
):
    """Compute G_R, G_rr, G_pr and G_qr for ``selection``.

    Returns:
        ReducedMatrices: the matrices; check ``converged`` before trusting
                         them
    """
    if selection.n_r >= operator.n:
        raise PreconditionError(
            f"Selection of {selection.n_r} nodes leaves no scattering "
            f"network in a graph of {operator.n} nodes"
        )
    g_rr = extract_grr(operator, selection)
    scatter = solve_scatter(
        operator, selection, tol, max_iter, nprocs=nprocs, method=method
    )
    g_r = g_rr + scatter.gain
    g_pr = np.outer(
        scatter.leading_response,
        scatter.leading_weights / (1.0 - scatter.leading_value),
    )
    g_qr = g_r - g_rr - g_pr

    if pagerank_max_iter is None:
        pagerank_max_iter = max_iter
    probabilities, _ranks, pagerank_report = pagerank(
        operator.graph, operator.alpha, pagerank_tol, pagerank_max_iter
    )
    p_r = probabilities.values[selection.ids]
    return ReducedMatrices(
        selection=selection,
        alpha=operator.alpha,
        g_r=g_r,
        g_rr=g_rr,
        g_pr=g_pr,
        g_qr=g_qr,
        p_r=p_r,
        p_r_normalized=p_r / p_r.sum(),
        pagerank=probabilities.values,
        pagerank_report=pagerank_report,
        scatter=scatter,
    )


def _direct_links(graph, selection):
    """Boolean matrix, [j, i] set if selection node j links to node i."""
    ids = selection.ids
    return graph.adjacency[ids][:, ids].toarray() != 0


def _check_same_network(reduced, graph):
    if reduced.selection.n != graph.n:
        raise PreconditionError(
            f"Reduced matrices were computed for {reduced.selection.n} nodes, "
            f"the graph has {graph.n}"
        )


def _zero_weight_floor(g_qr):
    return max(
        ZERO_WEIGHT_RTOL * float(np.abs(g_qr).max(initial=0.0)), ZERO_WEIGHT_ATOL
    )


def hidden_links(reduced, graph, ranked=False):
    """Return the purely hidden links leaving every selection node.

    Eligible targets of a source j are all other selection nodes without a
    direct link j -> i. Links are ordered by raw G_qr weight; weights within
    solver noise of zero (see ZERO_WEIGHT_RTOL and ZERO_WEIGHT_ATOL) are
    never reported.

    Args:
        reduced (ReducedMatrices): matrices of the selection
        graph (DirectedGraph): network the matrices were computed for
        ranked (bool): return all eligible links instead of the strongest

    Returns:
        list: one SourceHiddenLinks per selection position
    """
    _check_same_network(reduced, graph)
    direct = _direct_links(graph, reduced.selection)
    n_r = reduced.selection.n_r
    floor = _zero_weight_floor(reduced.g_qr)
    results = []
    for source in range(n_r):
        weights = reduced.g_qr[:, source]
        eligible = ~direct[source]
        eligible[source] = False
        candidates = np.flatnonzero(eligible & (weights > floor))
        # strongest first, equal weights by selection position
        candidates = candidates[np.lexsort((candidates, -weights[candidates]))]
        if not ranked:
            candidates = candidates[:1]
        links = [
            HiddenLink(
                source=source,
                target=int(target),
                weight=float(weights[target]),
                purely_hidden=True,
            )
            for target in candidates
        ]
        results.append(SourceHiddenLinks(source=source, links=links))
    return results


def top_hidden_links(reduced, graph, number=21, include_direct=False):
    """Return the ``number`` largest positive off-diagonal G_qr entries.

    Without ``include_direct`` only purely hidden links are considered.
    """
    _check_same_network(reduced, graph)
    direct = _direct_links(graph, reduced.selection).T
    weights = reduced.g_qr
    eligible = weights > _zero_weight_floor(weights)
    np.fill_diagonal(eligible, False)
    if not include_direct:
        eligible &= ~direct
    targets, sources = np.nonzero(eligible)
    values = weights[targets, sources]
    order = np.lexsort((targets, sources, -values))[:number]
    return [
        HiddenLink(
            source=int(sources[k]),
            target=int(targets[k]),
            weight=float(values[k]),
            purely_hidden=not direct[targets[k], sources[k]],
        )
        for k in order
    ]
