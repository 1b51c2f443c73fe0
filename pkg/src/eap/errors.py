"""Exception hierarchy.

Two families matter to callers: ``DomainError`` covers every violated
precondition, unresolved reference, or broken invariant (CLI exit status 1),
and ``CapacityError`` covers exceeded enumeration bounds (exit status 3).
"""

from __future__ import annotations


class EapError(Exception):
    """Base class for all library errors."""


class DomainError(EapError):
    """A precondition, invariant, or reference failed to hold."""


class CapacityError(EapError):
    """An enumeration bound was exceeded."""


class InvariantError(DomainError):
    """A value violates one of its structural invariants."""


class ShapeMismatchError(DomainError):
    """Temporal coordinates have incompatible or missing shapes."""


class InvalidParameterError(DomainError):
    """A numeric parameter is outside its admissible range."""


class UndefinedExtentError(DomainError):
    """Begin/end of an action is undefined (empty or untimed events)."""


class ResolutionError(DomainError):
    """A local id, label, or name does not resolve."""


class UndefinedCompositionError(DomainError):
    """A name-composition table has no entry for the given pair."""


class UndefinedShiftError(DomainError):
    """A tag-shift table has no entry for the given tag."""


class UndefinedRenamingError(DomainError):
    """A renaming map has no entry for the given value."""


class ShiftMismatchError(DomainError):
    """The supplied shift does not map the first tag onto the second."""


class LinkError(DomainError):
    """Input/output states of sequentially linked events do not match."""


class OrderingError(DomainError):
    """Temporal order required by a composition is violated."""


class UnsupportedShapeError(DomainError):
    """An operation defined for point-like events got an extended event."""


class UniverseError(DomainError):
    """Complement was taken relative to a non-containing universe."""


class CoverageError(DomainError):
    """A strong composition's pairing does not cover all elements."""


class UndefinedRatioError(DomainError):
    """A parallelism ratio over an empty operand."""


class AmbiguousTraceError(DomainError):
    """Two observable events share a time, so no linear trace exists."""


class ReservedNameError(DomainError):
    """The silent-step name is reserved and cannot be used as an atom."""


class SchemaError(DomainError):
    """A document violates the interchange schema.

    ``path`` names the offending location, e.g. ``actions.A.events.e1.time``.
    """

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
