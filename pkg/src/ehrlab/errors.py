"""Typed errors shared across the package.

Guard violations carry enough context to be surfaced by the CLI with a
dedicated exit code; everything else is a plain ValueError subclass so that
callers can catch narrowly.
"""

from __future__ import annotations


class EhrlabError(ValueError):
    """Base class for all package-specific errors."""


class TreeSyntaxError(EhrlabError):
    """Malformed tree or colouring literal. Carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SentenceSyntaxError(EhrlabError):
    """Malformed logic sentence: bad syntax, arity, or variable scope."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class InvalidNodeError(EhrlabError):
    """Node id outside the arena of the tree it was used with."""


class LassoUnsupportedError(EhrlabError):
    """Operation requires a finite tree but was given a lasso tree."""


class NotRootedError(EhrlabError):
    """Colouring does not assign the distinguished colour to exactly the root."""


class PaletteMismatchError(EhrlabError):
    """Two colourings that must share a palette do not."""


class GuardExceededError(EhrlabError):
    """A size/enumeration guard would be exceeded; refusing to run.

    The CLI maps this to exit code 3.
    """

    def __init__(self, what: str, actual, bound):
        self.what = what
        self.actual = actual
        self.bound = bound
        super().__init__(f"guard exceeded: {what} = {actual} > bound {bound}")


class ConfigurationNotWinnableError(EhrlabError):
    """A corresponding-node query was made from a configuration Duplicator loses."""


class StrategyInvariantError(EhrlabError):
    """A strategy engine could not maintain its invariants (this is a bug or a
    violated precondition, never a legal game outcome)."""


class ResponseUnavailableError(EhrlabError):
    """The construction's colouring response could not be completed (e.g. the
    bounded periodic search found no admissible tail colouring)."""


class ConstructionError(EhrlabError):
    """Invalid construction plan (unverified witnesses, bad parameters)."""
