"""Exceptions of the google_matrix library.

Every exception carries the process exit code the m.google_matrix modules
terminate with when it reaches them.
"""


class GoogleMatrixError(Exception):
    """Base class for all errors raised by the library."""

    exit_code = 1


class InputFormatError(GoogleMatrixError):
    """A file could not be parsed."""

    exit_code = 2

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f", line {line}"
            location += ": "
        super().__init__(f"{location}{message}")


class PreconditionError(GoogleMatrixError, ValueError):
    """Input is well formed but violates a precondition of an operation."""

    exit_code = 3


class EntityMismatchError(PreconditionError):
    """Rankings do not share the expected entity set.

    ``mismatches`` maps the name of each offending ranking to a dict with
    the sorted lists of ``missing`` and ``extra`` entities.
    """

    def __init__(self, mismatches):
        self.mismatches = mismatches
        lines = []
        for name, diff in mismatches.items():
            if diff.get("missing"):
                lines.append(f"{name}: missing {', '.join(diff['missing'])}")
            if diff.get("extra"):
                lines.append(f"{name}: unexpected {', '.join(diff['extra'])}")
        super().__init__("Entity lists differ:\n" + "\n".join(lines))


class ConvergenceError(GoogleMatrixError):
    """An iterative solver stopped at max_iter without reaching tol."""

    exit_code = 4

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
