#!/usr/bin/env python3
"""############################################################################
#
# MODULE:      m.google_matrix.kendall
# AUTHOR(S):   mundialis GmbH & Co. KG
# PURPOSE:     Computes the Kendall distances between all rankings listed
#              in a manifest.
# SPDX-FileCopyrightText: (c) 2026 by mundialis GmbH & Co. KG and the
#              GRASS Development Team
# SPDX-License-Identifier: GPL-3.0-or-later.
#
#############################################################################
"""

# %Module
# % description: Computes the symmetric Kendall distance matrix of edition and external rankings.
# % keyword: network
# % keyword: ranking
# % keyword: kendall
# % keyword: parallel
# %end

# %option G_OPT_F_INPUT
# % key: manifest
# % label: Manifest CSV 'edition,path[,kind]' of the ranking files
# % guisection: Input
# %end

# %option
# % key: theta_name
# % type: string
# % required: no
# % answer: WIKI
# % label: Name of the Theta composite ranking (with flag -t)
# % guisection: Input
# %end

# %option G_OPT_M_NPROCS
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
# % label: Format of the distance matrix
# % guisection: Output
# %end

# %flag
# % key: t
# % description: Add the Theta composite of all editions as a ranking
# %end

import atexit
import os

import grass.script as grass
from grass_gis_helpers.cleanup import general_cleanup
from grass_gis_helpers.general import set_nprocs

# pylint: disable=C0413
from google_matrix.analytics import kendall_matrix, theta_scores
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
    write_kendall_csv,
    write_kendall_json,
)

rm_dirs = []


def cleanup():
    """Cleanup function."""
    general_cleanup(rm_dirs=rm_dirs)


def main():
    """Compute the distance matrix of all rankings in the manifest."""
    route_library_messages()
    manifest = options["manifest"]
    theta_name = options["theta_name"]
    output = options["output"]
    nprocs = set_nprocs(int(options["nprocs"]))

    try:
        config = RunConfig.from_options(options, nprocs=nprocs)
        entries = read_manifest(manifest)
        editions = [ranking for ranking, kind in entries if kind == "edition"]
        externals = [ranking for ranking, kind in entries if kind == "external"]
        rankings = list(editions)
        if flags["t"]:
            if not editions:
                grass.fatal(_("Flag -t needs at least one ranking of kind 'edition'"))
            rankings.append(theta_scores(editions).as_ranking(theta_name))
        rankings.extend(externals)

        grass.message(
            _(f"Computing Kendall distances between {len(rankings)} rankings ...")
        )
        matrix = kendall_matrix(rankings, nprocs=nprocs)

        prepare_output_dir(output, rm_dirs)
        if config.format == "json":
            write_kendall_json(os.path.join(output, "kendall.json"), matrix)
        else:
            write_kendall_csv(os.path.join(output, "kendall.csv"), matrix)
        write_run_record(
            output,
            config,
            manifest_inputs(manifest),
            module="m.google_matrix.kendall",
        )
        keep_output_dir(output, rm_dirs)
    except GoogleMatrixError as err:
        fail(err)

    grass.message(_(f"Kendall distances are stored under {output}."))


if __name__ == "__main__":
    options, flags = grass.parser()
    atexit.register(cleanup)
    main()
