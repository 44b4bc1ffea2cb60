"""Exception types shared across the package."""

from __future__ import annotations

from typing import Any


class InvalidArgument(ValueError):
    """An input violates an operation's precondition."""


class ResourceLimit(RuntimeError):
    """A computation would exceed its configured budget.

    When a search is cut short, ``best`` holds the smallest value seen so far.
    It is only an upper bound on the true minimum.
    """

    def __init__(self, message: str, best: Any = None, argmin: Any = None, work: int = 0):
        super().__init__(message)
        self.best = best
        self.argmin = argmin
        self.work = work


class VerificationFailure(AssertionError):
    """A mechanically checked claim did not hold."""
