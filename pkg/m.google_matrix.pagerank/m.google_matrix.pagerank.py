#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.pagerank
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Computes the PageRank probabilities and ranks K of a
#              directed network by power iteration of its Google matrix.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Computes the PageRank of a directed network.
# % keyword: network
# % keyword: google matrix
# % keyword: pagerank
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
# % required: no
# % label: Selection file with one node label or id per line
# % description: If given, the local ranks of the selected nodes are written to subset_ranks.csv
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
# % label: L1 tolerance of the power iteration
# % guisection: Solver
# %end

# %option
# % key: max_iter
# % type: integer
# % required: no
# % answer: 1000
# % label: Maximum number of power iterations
# % guisection: Solver
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
# % label: Format of the rank table
# % guisection: Output
# %end

import atexit
import os

import grass.script as grass
from grass_gis_helpers.cleanup import general_cleanup

# pylint: disable=C0413
from google_matrix.config import RunConfig, write_run_record
from google_matrix.errors import GoogleMatrixError
from google_matrix.google import pagerank
from google_matrix.grass_support import (
    fail,
    keep_output_dir,
    prepare_output_dir,
    route_library_messages,
)
from google_matrix.graph import load_network
from google_matrix.reports import (
    read_selection_file,
    subset_ranking,
    write_edition_ranking,
    write_rank_outputs,
)

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Compute and write the PageRank."""
    route_library_messages()
    nodes = int(options["nodes"]) if options["nodes"] else None
    output = options["output"]

    try:
        config = RunConfig.from_options(options)
        graph, _ingest, labels = load_network(config.edges, config.labels, nodes)
        selection = None
        if config.selection:
            selection = read_selection_file(config.selection, labels, graph.n)

        grass.message(
            _(f"Computing the PageRank of {graph.n} nodes (alpha={config.alpha}) ...")
        )
        probabilities, rank_table, report = pagerank(
            graph, config.alpha, config.tol, config.max_iter
        )

        prepare_output_dir(output, rm_dirs)
        write_rank_outputs(
            output, config.format, probabilities, rank_table, report, labels
        )
        if selection is not None:
            write_edition_ranking(
                os.path.join(output, "subset_ranks.csv"),
                subset_ranking(rank_table, selection, labels),
            )
        write_run_record(
            output,
            config,
            [config.edges, config.labels, config.selection],
            module="m.google_matrix.pagerank",
        )
        keep_output_dir(output, rm_dirs)
        report.raise_for_convergence("PageRank power iteration")
    except GoogleMatrixError as err:
        fail(err)

    grass.message(
        _(
            f"PageRank converged after {report.iterations} iterations. "
            f"Results are stored under {output}."
        )
    )


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
