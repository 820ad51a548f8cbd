"""Exception types shared across the package.

Witness-carrying exceptions keep the offending data in a structured
attribute so callers (CLI, census) can serialize and replay it.
"""

from __future__ import annotations


class YbxError(Exception):
    """Base class for package errors."""


class InconsistentSolution(YbxError):
    """A table fails an identity it is required to satisfy."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class AxiomViolation(YbxError):
    """A constructor input violates one of its axioms."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotClosed(YbxError):
    """A subset is not closed under the maps needed to restrict."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceLimit(YbxError):
    """A requested computation exceeds the configured node budget."""

    def __init__(self, message: str, *, needed=None, budget=None):
        super().__init__(message)
        self.needed = needed
        self.budget = budget


class IllDefined(YbxError):
    """A map announced as class-well-defined sends two representatives
    of one class to different classes."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionUnmet(YbxError):
    """An operation was invoked outside its stated precondition."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class CrossCheckFailure(YbxError):
    """An exact theorem-level consistency check failed; this falsifies
    the implementation (or the input data) and must abort the run."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
