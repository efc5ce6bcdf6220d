"""Exception hierarchy shared by the engines and the CLI."""

from __future__ import annotations


class AllocGameError(Exception):
    """Base class for all errors raised by :mod:`allocgame`."""


class ArgumentError(AllocGameError, ValueError):
    """An argument violates an operation's precondition."""


class ConvergenceError(AllocGameError, ArithmeticError):
    """A series hit its term cap before meeting the tolerance.

    Attributes:
        partial: the accumulated partial sum when the cap was reached.
        terms: number of terms summed.
    """

    def __init__(self, message: str, partial: float, terms: int):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class NonTerminationError(AllocGameError):
    """A box holding counters can never be drawn, so play never ends."""


class CapacityError(AllocGameError):
    """An exact engine would exceed its configured state cap."""


class NoRootError(AllocGameError):
    """A bracketing root search found no sign change."""


class SolverError(AllocGameError):
    """The linear program failed to produce a certified solution."""
