"""Run configuration of the m.google_matrix modules."""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, replace

from google_matrix.errors import InputFormatError, PreconditionError
from google_matrix.google import (
    DEFAULT_ALPHA,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    check_alpha,
    check_solver_limits,
)
from google_matrix.reduced import (
    DEFAULT_SCATTER_MAX_ITER,
    DEFAULT_SCATTER_TOL,
    FIXED_POINT,
    SCATTER_METHODS,
)

RUN_RECORD = "run_config.json"
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    """Solver settings and paths of one module run."""

    alpha: float = DEFAULT_ALPHA
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    scatter_tol: float = DEFAULT_SCATTER_TOL
    scatter_max_iter: int = DEFAULT_SCATTER_MAX_ITER
    scatter_method: str = FIXED_POINT
    nprocs: int = 1
    edges: str = ""
    labels: str = ""
    selection: str = ""
    output: str = ""
    format: str = "csv"

    def __post_init__(self):
        check_alpha(self.alpha)
        check_solver_limits(self.tol, self.max_iter)
        check_solver_limits(self.scatter_tol, self.scatter_max_iter)
        if self.nprocs < 1:
            raise PreconditionError(f"nprocs must be at least 1, got {self.nprocs}")
        if self.scatter_method not in SCATTER_METHODS:
            raise PreconditionError(
                f"Unknown scatter method <{self.scatter_method}>"
            )
        if self.format not in FORMATS:
            raise PreconditionError(
                f"Unknown output format <{self.format}>, use one of {FORMATS}"
            )

    @classmethod
    def from_options(cls, options, nprocs=1):
        """Build a RunConfig from a parsed GRASS options dict.

        Options a module does not declare, or leaves empty, keep their
        default. ``nprocs`` is the already resolved process count.
        """

        def value(key, convert, default):
            raw = options.get(key, "")
            if raw in ("", None):
                return default
            try:
                return convert(raw)
            except ValueError:
                raise PreconditionError(
                    f"Option <{key}> has the invalid value <{raw}>"
                ) from None

        defaults = cls()
        return cls(
            alpha=value("alpha", float, defaults.alpha),
            tol=value("tol", float, defaults.tol),
            max_iter=value("max_iter", int, defaults.max_iter),
            scatter_tol=value("scatter_tol", float, defaults.scatter_tol),
            scatter_max_iter=value(
                "scatter_max_iter", int, defaults.scatter_max_iter
            ),
            scatter_method=value("method", str, defaults.scatter_method),
            nprocs=int(nprocs),
            edges=value("edges", str, ""),
            labels=value("labels", str, ""),
            selection=value("selection", str, ""),
            output=value("output", str, ""),
            format=value("format", str, defaults.format),
        )

    def with_paths(self, **paths):
        return replace(self, **paths)

    def to_dict(self):
        return asdict(self)


def file_checksum(path):
    """Return the SHA-256 hex digest of a file."""
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as file:
            for block in iter(lambda: file.read(1 << 20), b""):
                digest.update(block)
    except OSError as err:
        raise InputFormatError(f"cannot read file ({err})", path) from err
    return digest.hexdigest()


def write_run_record(output_dir, config, inputs, module=None):
    """Write the config echo and input checksums to ``run_config.json``.

    Args:
        output_dir (str): output directory of the run
        config (RunConfig): configuration of the run
        inputs (list): paths of all input files; empty entries are skipped
        module (str): name of the module that produced the outputs

    Returns:
        str: path of the written record
    """
    record = {
        "module": module,
        "config": config.to_dict(),
        "inputs": {
            path: file_checksum(path) for path in sorted(set(inputs)) if path
        },
    }
    path = os.path.join(output_dir, RUN_RECORD)
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        json.dump(record, file, indent=2, sort_keys=True)
        file.write("\n")
    return path
