"""Exception types shared across the package."""

from __future__ import annotations


class CramlabError(Exception):
    """Base class for all package errors."""


class GraphFormatError(CramlabError, ValueError):
    """Malformed edge-list text or invalid graph construction."""


class UnknownGraphError(CramlabError, ValueError):
    """A named-graph family that does not exist, or bad parameters for it."""


class PreconditionError(CramlabError, ValueError):
    """An operation was called outside the domain where it is defined."""


class PartialColouringError(CramlabError, ValueError):
    """A judgment that needs a total colouring received a partial one."""


class ContractViolation(CramlabError, RuntimeError):
    """An internal guarantee failed; indicates a bug rather than bad input."""


class BudgetExhausted(CramlabError):
    """A bounded search ran out of nodes before reaching a verdict."""

    def __init__(self, message: str, explored: int = 0, edges=None):
        super().__init__(message)
        self.explored = explored
        self.edges = edges


class NoValidColouring(CramlabError):
    """A block admits no colouring of the requested kind.

    ``edges`` holds the block, which is a counterexample certificate for
    the colouring statement the pipeline relies on.
    """

    def __init__(self, message: str, edges, explored: int = 0):
        super().__init__(message)
        self.edges = edges
        self.explored = explored


class DensityBoundError(PreconditionError):
    """A triangle component is too dense for the constructive colourings."""

    def __init__(self, message: str, edges):
        super().__init__(message)
        self.edges = edges
