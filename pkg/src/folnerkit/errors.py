"""Exception hierarchy shared by all folnerkit modules."""

from __future__ import annotations


class FolnerError(Exception):
    """Base class for every error raised by folnerkit."""


class DomainError(FolnerError, ValueError):
    """An index or parameter lies outside its admissible set."""


class StructureError(FolnerError):
    """An operator tree has a shape the requested computation cannot handle."""


class UnsupportedStructureError(StructureError):
    """The operation needs a band bound but the tree only has structured sparsity."""


class PreconditionError(FolnerError, ValueError):
    """A documented precondition (self-adjointness, ordering, ...) is violated."""


class ResourceError(FolnerError):
    """A configured size cap would be exceeded."""


class EstimationError(FolnerError):
    """An operator-norm upper bound could not be produced."""


class DSLError(FolnerError, ValueError):
    """Malformed operator document.

    ``pointer`` is the JSON pointer of the offending node.
    """

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")
