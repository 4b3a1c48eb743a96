"""Glue between the google_matrix library and GRASS GIS modules.

GRASS is imported lazily so that the library stays usable and testable
without a GRASS installation.
"""

import logging
import os
import sys

LIBRARY_LOGGER = "google_matrix"


def _grass():
    import grass.script as grass  # noqa: PLC0415

    return grass


class GrassMessageHandler(logging.Handler):
    """Forward library log records to the GRASS message functions."""

    def emit(self, record):
        try:
            message = self.format(record)
            grass = _grass()
            if record.levelno >= logging.ERROR:
                grass.error(message)
            elif record.levelno >= logging.WARNING:
                grass.warning(message)
            elif record.levelno >= logging.INFO:
                grass.verbose(message)
            else:
                grass.debug(message)
        except Exception:
            self.handleError(record)


def route_library_messages(level=logging.DEBUG):
    """Install a GrassMessageHandler on the library logger (idempotent)."""
    logger = logging.getLogger(LIBRARY_LOGGER)
    logger.setLevel(level)
    logger.propagate = False
    if not any(isinstance(h, GrassMessageHandler) for h in logger.handlers):
        logger.addHandler(GrassMessageHandler())
    return logger


def fail(err):
    """Print a library error with grass.error and exit with its code."""
    _grass().error(str(err))
    sys.exit(getattr(err, "exit_code", 1))


def prepare_output_dir(output, rm_dirs):
    """Create ``output``; register it for removal if this run created it."""
    if not os.path.isdir(output):
        os.makedirs(output)
        rm_dirs.append(output)


def keep_output_dir(output, rm_dirs):
    """Unregister ``output`` once its files have been written."""
    if output in rm_dirs:
        rm_dirs.remove(output)
