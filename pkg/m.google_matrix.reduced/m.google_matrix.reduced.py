#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.reduced
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Computes the reduced Google matrix of a node selection, its
#              decomposition into direct, projector and hidden parts and
#              the strongest purely hidden links.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Computes the reduced Google matrix G_R = G_rr + G_pr + G_qr of a node selection and extracts hidden links.
# % keyword: network
# % keyword: google matrix
# % keyword: reduced google matrix
# % keyword: parallel
# %end

# %option G_OPT_F_INPUT
# % key: edges
# % label: Edge file with one 'source<TAB>target' node id pair per line
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: labels
# % required: no
# % label: Label file with one 'id<TAB>label' pair per line
# % guisection: Input
# %end

# %option
# % key: nodes
# % type: integer
# % required: no
# % label: Number of nodes, if larger than the largest node id + 1
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: selection
# % label: Selection file with one node label or id per line
# % description: The order of the lines defines the row and column order of the matrices
# % guisection: Input
# %end

# %option
# % key: alpha
# % type: double
# % required: no
# % answer: 0.85
# % label: Damping factor of the Google matrix
# % guisection: Solver
# %end

# %option
# % key: tol
# % type: double
# % required: no
# % answer: 1e-10
# % label: L1 tolerance of the PageRank power iteration
# % guisection: Solver
# %end

# %option
# % key: max_iter
# % type: integer
# % required: no
# % answer: 1000
# % label: Maximum number of PageRank iterations
# % guisection: Solver
# %end

# %option
# % key: scatter_tol
# % type: double
# % required: no
# % answer: 1e-10
# % label: L1 tolerance of the scattering network solves
# % guisection: Solver
# %end

# %option
# % key: scatter_max_iter
# % type: integer
# % required: no
# % answer: 10000
# % label: Maximum number of iterations of every scattering network solve
# % guisection: Solver
# %end

# %option
# % key: method
# % type: string
# % required: no
# % options: fixed_point,projected
# % answer: fixed_point
# % label: Scattering network solver
# % description: projected treats the leading eigenmode of G_ss analytically and is needed for small selections of large networks
# % guisection: Solver
# %end

# %option G_OPT_M_NPROCS
# %end

# %option
# % key: number
# % type: integer
# % required: no
# % answer: 21
# % label: Number of strongest hidden links in the global list
# % guisection: Output
# %end

# %option G_OPT_M_DIR
# % key: output
# % label: Output directory
# % guisection: Output
# %end

# %option
# % key: format
# % type: string
# % required: no
# % options: csv,json
# % answer: csv
# % label: Format of the hidden link lists
# % guisection: Output
# %end

# %flag
# % key: a
# % description: List all positive hidden links of every source, not only the strongest
# %end

# %flag
# % key: d
# % description: Include links with a direct counterpart in the global list
# %end

import atexit

import grass.script as grass
from grass_gis_helpers.cleanup import general_cleanup
from grass_gis_helpers.general import set_nprocs

# pylint: disable=C0413
from google_matrix.config import RunConfig, write_run_record
from google_matrix.errors import GoogleMatrixError
from google_matrix.google import GoogleOperator
from google_matrix.grass_support import (
    fail,
    keep_output_dir,
    prepare_output_dir,
    route_library_messages,
)
from google_matrix.graph import load_network
from google_matrix.reduced import (
    ReducedSelection,
    hidden_links,
    reduced_google,
    top_hidden_links,
)
from google_matrix.reports import (
    read_selection_file,
    selection_labels,
    write_hidden_link_outputs,
    write_reduced,
)

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Compute the reduced Google matrix and its hidden links."""
    route_library_messages()
    nodes = int(options["nodes"]) if options["nodes"] else None
    number = int(options["number"])
    output = options["output"]
    nprocs = set_nprocs(int(options["nprocs"]))

    try:
        config = RunConfig.from_options(options, nprocs=nprocs)
        graph, _ingest, labels = load_network(config.edges, config.labels, nodes)
        ids = read_selection_file(config.selection, labels, graph.n)
        selection = ReducedSelection.create(ids, graph.n)
        names = selection_labels(selection.ids, labels)

        grass.message(
            _(
                f"Reducing the Google matrix of {graph.n} nodes to "
                f"{selection.n_r} selected nodes using {nprocs} process(es) ..."
            )
        )
        reduced = reduced_google(
            GoogleOperator(graph, config.alpha),
            selection,
            tol=config.scatter_tol,
            max_iter=config.scatter_max_iter,
            nprocs=nprocs,
            method=config.scatter_method,
            pagerank_tol=config.tol,
            pagerank_max_iter=config.max_iter,
        )
        per_source = hidden_links(reduced, graph, ranked=flags["a"])
        top = top_hidden_links(reduced, graph, number, include_direct=flags["d"])

        prepare_output_dir(output, rm_dirs)
        write_reduced(output, reduced, names)
        write_hidden_link_outputs(output, config.format, per_source, top, names)
        write_run_record(
            output,
            config,
            [config.edges, config.labels, config.selection],
            module="m.google_matrix.reduced",
        )
        keep_output_dir(output, rm_dirs)

        for entry in per_source:
            if entry.empty:
                grass.warning(
                    _(f"No positive purely hidden link leaves <{names[entry.source]}>")
                )
        reduced.raise_for_convergence()
    except GoogleMatrixError as err:
        fail(err)

    weights = reduced.diagnostics()["weights"]
    grass.message(
        _(
            f"lambda_c = {reduced.scatter.leading_value:.12f}; weights "
            f"G_rr {weights['g_rr']:.4f}, G_pr {weights['g_pr']:.4f}, "
            f"G_qr {weights['g_qr']:.4f}"
        )
    )
    grass.message(_(f"Reduced matrices are stored under {output}."))


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
