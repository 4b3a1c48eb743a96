#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.stats
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Reads a directed network from an edge list and reports its
#              structural statistics.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Reports node count, link count, density, mean degree and dangling nodes of a directed network.
# % keyword: network
# % keyword: google matrix
# % keyword: statistics
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

# %option G_OPT_M_DIR
# % key: output
# % label: Output directory for stats.json
# % guisection: Output
# %end

# %flag
# % key: c
# % description: Also write the canonical edge list (duplicates and self-loops removed) as edges.tsv
# %end

import atexit
import os

import grass.script as grass
from grass_gis_helpers.cleanup import general_cleanup

# pylint: disable=C0413
from google_matrix.config import RunConfig, write_run_record
from google_matrix.errors import GoogleMatrixError
from google_matrix.grass_support import (
    fail,
    keep_output_dir,
    prepare_output_dir,
    route_library_messages,
)
from google_matrix.graph import graph_stats, load_network, write_edge_file
from google_matrix.reports import write_stats_json

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Read the network and write its statistics."""
    route_library_messages()
    edges = options["edges"]
    labels_path = options["labels"]
    nodes = int(options["nodes"]) if options["nodes"] else None
    output = options["output"]

    try:
        config = RunConfig.from_options(options)
        grass.message(_(f"Reading network <{edges}> ..."))
        graph, ingest, _labels = load_network(edges, labels_path, nodes)
        stats = graph_stats(graph)

        prepare_output_dir(output, rm_dirs)
        write_stats_json(os.path.join(output, "stats.json"), stats, ingest)
        if flags["c"]:
            write_edge_file(graph, os.path.join(output, "edges.tsv"))
        write_run_record(
            output, config, [edges, labels_path], module="m.google_matrix.stats"
        )
        keep_output_dir(output, rm_dirs)
    except GoogleMatrixError as err:
        fail(err)

    grass.message(
        _(
            f"{ingest.edges_read} edge line(s) read, {ingest.self_loops} "
            f"self-loop(s) dropped, {ingest.duplicates} duplicate(s) collapsed"
        )
    )
    grass.message(
        _(
            f"N = {stats.n}, N_l = {stats.edge_count}, "
            f"D = {stats.density:.3g}, <k> = {stats.mean_degree:.3g}, "
            f"{stats.dangling_count} dangling node(s)"
        )
    )
    grass.message(_(f"Statistics are stored under {output}."))


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
