#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.density
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Counts the nodes of a network on a logarithmic grid of the
#              PageRank-CheiRank plane.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Computes the 100x100 density of nodes on the (K, K*) plane with log10 equidistant cells.
# % keyword: network
# % keyword: google matrix
# % keyword: density
# %end

# %option G_OPT_F_INPUT
# % key: pagerank
# % label: PageRank table written by m.google_matrix.pagerank (csv or json)
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: cheirank
# % label: CheiRank table written by m.google_matrix.cheirank (csv or json)
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: labels
# % required: no
# % label: Label file with one 'id<TAB>label' pair per line
# % description: Defaults to the labels stored in the PageRank table
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: selection
# % required: no
# % label: Selection file whose nodes are located on the grid (positions.csv)
# % guisection: Input
# %end

# %option G_OPT_M_DIR
# % key: output
# % label: Output directory
# % guisection: Output
# %end

import atexit
import os

import grass.script as grass
from grass_gis_helpers.cleanup import general_cleanup

# pylint: disable=C0413
from google_matrix.analytics import density_grid
from google_matrix.config import RunConfig, write_run_record
from google_matrix.errors import GoogleMatrixError
from google_matrix.google import check_subset
from google_matrix.grass_support import (
    fail,
    keep_output_dir,
    prepare_output_dir,
    route_library_messages,
)
from google_matrix.graph import read_label_file
from google_matrix.reports import (
    positions_frame,
    read_rank_file,
    read_selection_file,
    write_density,
)

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Write the density grid and the positions of selected nodes."""
    route_library_messages()
    pagerank_path = options["pagerank"]
    cheirank_path = options["cheirank"]
    output = options["output"]

    try:
        config = RunConfig.from_options(options)
        pagerank_table, labels = read_rank_file(pagerank_path)
        cheirank_table, _cheirank_labels = read_rank_file(cheirank_path)
        if config.labels:
            labels = read_label_file(config.labels)
        grid = density_grid(pagerank_table, cheirank_table)
        positions = None
        if config.selection:
            ids = read_selection_file(config.selection, labels, grid.n)
            ids = check_subset(ids, grid.n)
            positions = positions_frame(
                grid, pagerank_table, cheirank_table, ids, labels
            )

        prepare_output_dir(output, rm_dirs)
        write_density(output, grid)
        if positions is not None:
            positions.to_csv(
                os.path.join(output, "positions.csv"),
                index=False,
                lineterminator="\n",
            )
        write_run_record(
            output,
            config,
            [pagerank_path, cheirank_path, config.labels, config.selection],
            module="m.google_matrix.density",
        )
        keep_output_dir(output, rm_dirs)
    except GoogleMatrixError as err:
        fail(err)

    grass.message(
        _(f"Density grid of {grid.n} nodes is stored under {output}.")
    )


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
