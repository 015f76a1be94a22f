"""
Exception hierarchy for mctsi.
Every error derives from MctsiError and from the closest built-in so plain
``except ValueError`` callers keep working.
"""

from typing import Optional


class MctsiError(Exception):
    """Base class for all mctsi errors."""


class InvalidKeyError(MctsiError, ValueError):
    """A marginal key names unknown, duplicated or overlapping variables."""


class InvalidEdgeError(MctsiError, ValueError):
    """A vertex pair is not an edge of the tree."""


class InvalidInputError(MctsiError, ValueError):
    """Vertex sets violate a disjointness or non-emptiness precondition."""


class InvalidTreeError(MctsiError, ValueError):
    """Edge list does not describe a tree."""


class InvalidPartitionError(MctsiError, ValueError):
    """Partition is malformed or unsuitable for the requested operation."""


class SizeLimitError(MctsiError, ValueError):
    """A configured guard (dense states, enumeration size, exhaustive scan) was exceeded."""


class InvalidParameterError(MctsiError, ValueError):
    """A numeric parameter is outside its admissible range."""


class PreconditionError(MctsiError, ValueError):
    """A closed-form bound was requested outside the regime where it holds."""


class UniquenessError(MctsiError, ValueError):
    """The minimizing edge is not unique (gap is zero)."""


class InternalConsistencyError(MctsiError, ArithmeticError):
    """Two computations that must agree did not; indicates a bug."""


class NoRepairNeeded(MctsiError):
    """Raised by a repair step when every atom is already connected."""


class ModelParseError(MctsiError, ValueError):
    """A model or experiment file could not be read or decoded."""


class ModelValidationError(MctsiError, ValueError):
    """A decoded model violates an invariant.

    Attributes:
        path: JSON pointer to the first offending value (e.g. ``/kernels/3/1``)
    """

    def __init__(self, path: str, message: str):
        self.path = path or "/"
        self.message = message
        super().__init__(f"{self.path}: {message}")


def json_pointer(*parts: Optional[object]) -> str:
    """Build a JSON pointer from path parts, escaping ``~`` and ``/``."""
    tokens = []
    for part in parts:
        if part is None:
            continue
        token = str(part).replace("~", "~0").replace("/", "~1")
        tokens.append(token)
    return "/" + "/".join(tokens) if tokens else "/"
