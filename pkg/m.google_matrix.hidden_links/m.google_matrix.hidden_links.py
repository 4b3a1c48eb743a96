#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.hidden_links
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Extracts purely hidden links from reduced Google matrices
#              computed by m.google_matrix.reduced.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Lists the strongest hidden links (G_qr entries without direct link) of a reduced Google matrix.
# % keyword: network
# % keyword: google matrix
# % keyword: hidden links
# %end

# %option G_OPT_M_DIR
# % key: input
# % label: Output directory of m.google_matrix.reduced
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: edges
# % label: Edge file the reduced matrices were computed from
# % guisection: Input
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
from google_matrix.graph import load_network
from google_matrix.reduced import hidden_links, top_hidden_links
from google_matrix.reports import (
    MATRIX_FILES,
    read_reduced,
    write_hidden_link_outputs,
)

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Extract hidden links from stored reduced matrices."""
    route_library_messages()
    input_dir = options["input"]
    number = int(options["number"])
    output = options["output"]

    try:
        config = RunConfig.from_options(options)
        stored = read_reduced(input_dir)
        graph, _ingest, _labels = load_network(
            config.edges, nodes=stored.selection.n
        )
        per_source = hidden_links(stored, graph, ranked=flags["a"])
        top = top_hidden_links(stored, graph, number, include_direct=flags["d"])

        prepare_output_dir(output, rm_dirs)
        write_hidden_link_outputs(
            output, config.format, per_source, top, stored.labels
        )
        write_run_record(
            output,
            config,
            [
                config.edges,
                os.path.join(input_dir, "metadata.json"),
                os.path.join(input_dir, MATRIX_FILES["g_qr"]),
            ],
            module="m.google_matrix.hidden_links",
        )
        keep_output_dir(output, rm_dirs)
    except GoogleMatrixError as err:
        fail(err)

    empty = [stored.labels[entry.source] for entry in per_source if entry.empty]
    if empty:
        grass.warning(
            _(f"No positive purely hidden link leaves: {', '.join(empty)}")
        )
    grass.message(_(f"Hidden links are stored under {output}."))


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
