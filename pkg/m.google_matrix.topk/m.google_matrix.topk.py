#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.topk
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Lists the top k nodes of a PageRank or CheiRank table,
#              optionally among a selection of nodes only.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Lists the labels of the k highest ranked nodes.
# % keyword: network
# % keyword: google matrix
# % keyword: ranking
# %end

# %option G_OPT_F_INPUT
# % key: input
# % label: Rank table written by m.google_matrix.pagerank or m.google_matrix.cheirank (csv or json)
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: labels
# % required: no
# % label: Label file with one 'id<TAB>label' pair per line
# % description: Defaults to the labels stored in the rank table
# % guisection: Input
# %end

# %option G_OPT_F_INPUT
# % key: selection
# % required: no
# % label: Selection file; if given only the selected nodes are ranked
# % guisection: Input
# %end

# %option
# % key: k
# % type: integer
# % required: no
# % answer: 10
# % label: Number of listed nodes
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
# % label: Format of the top k table
# % guisection: Output
# %end

import atexit
import os

import grass.script as grass
import pandas as pd
from grass_gis_helpers.cleanup import general_cleanup

# pylint: disable=C0413
from google_matrix.analytics import topk_table
from google_matrix.config import RunConfig, write_run_record
from google_matrix.errors import GoogleMatrixError
from google_matrix.grass_support import (
    fail,
    keep_output_dir,
    prepare_output_dir,
    route_library_messages,
)
from google_matrix.graph import read_label_file
from google_matrix.reports import read_rank_file, read_selection_file, write_json

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Write the top k table."""
    route_library_messages()
    rank_path = options["input"]
    k = int(options["k"])
    output = options["output"]

    try:
        config = RunConfig.from_options(options)
        rank_table, labels = read_rank_file(rank_path)
        if config.labels:
            labels = read_label_file(config.labels)
        subset = None
        if config.selection:
            subset = read_selection_file(config.selection, labels, len(rank_table))
        top = topk_table(rank_table, labels, k, subset=subset)

        prepare_output_dir(output, rm_dirs)
        if config.format == "json":
            write_json(os.path.join(output, "topk.json"), {"k": k, "labels": top})
        else:
            pd.DataFrame({"rank": range(1, len(top) + 1), "label": top}).to_csv(
                os.path.join(output, "topk.csv"), index=False, lineterminator="\n"
            )
        write_run_record(
            output,
            config,
            [rank_path, config.labels, config.selection],
            module="m.google_matrix.topk",
        )
        keep_output_dir(output, rm_dirs)
    except GoogleMatrixError as err:
        fail(err)

    for position, label in enumerate(top, start=1):
        grass.message(f"{position:>4} {label}")


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
