"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ClawhamError(Exception):
    """Base class for all errors raised by the package."""


class InputError(ClawhamError, ValueError):
    """Malformed input: unknown vertex, bad spec, broken precondition."""


class HypothesisViolation(ClawhamError):
    """The graph violates a hypothesis of the construction (claw, missing
    common neighbour, cutvertex).  ``witness`` names the offending vertices."""

    def __init__(self, message: str, kind: str, witness=None):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


class ExtensionUnavailable(ClawhamError):
    """No extension exists under the supplied base/w filters."""

    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason


class ImpossibleCase(ClawhamError):
    """A case that the construction rules out was reached.

    Either the implementation or the input hypotheses are broken; ``state``
    carries a full diagnostic snapshot.
    """

    def __init__(self, message: str, state: dict | None = None):
        super().__init__(message)
        self.state = state or {}


class InvariantViolation(ClawhamError):
    """A validated data structure failed one of its invariants."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceCapExceeded(ClawhamError):
    """A bounded search hit its configured cap."""


class PreconditionError(InputError):
    """A local check was asked for a vertex whose neighbourhood is clipped."""
