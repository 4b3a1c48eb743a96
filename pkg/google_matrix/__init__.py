"""Google matrix analysis of directed networks.

PageRank and CheiRank, reduced Google matrices with hidden links and
cross-edition rank analytics used by the m.google_matrix modules.
"""

from google_matrix.errors import (
    ConvergenceError,
    EntityMismatchError,
    GoogleMatrixError,
    InputFormatError,
    PreconditionError,
)

__all__ = [
    "ConvergenceError",
    "EntityMismatchError",
    "GoogleMatrixError",
    "InputFormatError",
    "PreconditionError",
]
