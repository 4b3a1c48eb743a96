#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.theta
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Aggregates the local ranks of one entity list in several
#              editions into Theta scores.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Cross-ranks entities over several network editions by their Theta score.
# % keyword: network
# % keyword: google matrix
# % keyword: ranking
# %end

# %option G_OPT_F_INPUT
# % key: manifest
# % label: Manifest CSV 'edition,path[,kind]' of the edition ranking files
# % description: Rankings of kind 'external' are ignored
# % guisection: Input
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
# % label: Format of the Theta table
# % guisection: Output
# %end

import atexit
import os

import grass.script as grass
from grass_gis_helpers.cleanup import general_cleanup

# pylint: disable=C0413
from google_matrix.analytics import theta_scores
from google_matrix.config import RunConfig, write_run_record
from google_matrix.errors import GoogleMatrixError
from google_matrix.grass_support import (
    fail,
    keep_output_dir,
    prepare_output_dir,
    route_library_messages,
)
from google_matrix.reports import (
    manifest_inputs,
    read_manifest,
    write_theta_csv,
    write_theta_json,
)

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Compute the Theta scores of all editions in the manifest."""
    route_library_messages()
    manifest = options["manifest"]
    output = options["output"]

    try:
        config = RunConfig.from_options(options)
        editions = [
            ranking
            for ranking, kind in read_manifest(manifest)
            if kind == "edition"
        ]
        grass.message(
            _(
                f"Aggregating {len(editions)} edition(s): "
                f"{', '.join(r.edition_code for r in editions)} ..."
            )
        )
        table = theta_scores(editions)

        prepare_output_dir(output, rm_dirs)
        if config.format == "json":
            write_theta_json(os.path.join(output, "theta.json"), table)
        else:
            write_theta_csv(os.path.join(output, "theta.csv"), table)
        write_run_record(
            output,
            config,
            manifest_inputs(manifest),
            module="m.google_matrix.theta",
        )
        keep_output_dir(output, rm_dirs)
    except GoogleMatrixError as err:
        fail(err)

    for position in range(min(3, table.n_ph)):
        grass.message(
            f"{table.display_rank[position]:>4} {table.entity_ids[position]} "
            f"{table.theta[position]:.3f}"
        )
    grass.message(_(f"Theta scores are stored under {output}."))


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
