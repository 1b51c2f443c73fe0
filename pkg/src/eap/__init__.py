"""Three-level algebra of events, actions, and processes.

Events carry names and exact-rational space-time tags; actions are systems
of related events; processes are systems of actions.  The package provides
the compositions and parallelism measures of all three levels, an embedding
of the classic process-algebra operators with trace semantics, a textual
format for expressions and documents, and brute-force oracles anchoring the
closed forms.
"""

from .model import (
    Action,
    Category,
    CompatConstraint,
    CompatMode,
    Document,
    Event,
    EventKind,
    Interval,
    Point,
    Points,
    Process,
    Relation,
    SemanticMap,
    SpaceGraph,
    Status,
    Tag,
    event,
)

__all__ = [
    "Action",
    "Category",
    "CompatConstraint",
    "CompatMode",
    "Document",
    "Event",
    "EventKind",
    "Interval",
    "Point",
    "Points",
    "Process",
    "Relation",
    "SemanticMap",
    "SpaceGraph",
    "Status",
    "Tag",
    "event",
]

__version__ = "0.1.0"
