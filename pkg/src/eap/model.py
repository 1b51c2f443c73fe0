"""Domain model for the three-tier event/action/process calculus.

An event is an atomic occurrence: a name, a space-time tag, a communication
kind, and optional input/output states.  An action is a system of events —
a set of events together with named binary relations and compatibility
constraints.  A process is, one tier up, a system of actions.

Times are exact rationals (`fractions.Fraction`) so that simultaneity is a
decidable equality, never a floating-point comparison.  All values are
immutable after construction and safe to share between threads.

Structural identity of an event is the tuple (name, tag, kind, carrier).
Sets of events and actions are deduplicated under that key; fields outside
the key (states, observability, category) ride along with the first
occurrence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .errors import InvariantError, ResolutionError

RationalLike = Union[Fraction, int, str]


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints and "num/den" strings to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise InvariantError(f"not a rational value: {value!r}")


def _cached_hash(self) -> int:
    """Hash memoization for frozen values that nest exact rationals.

    Rational hashes are costly (a modular inverse per call) and the same
    tags and events are hashed millions of times during set-semantics
    composition, so each value computes its hash once.
    """
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash(tuple(getattr(self, f.name) for f in fields(self)))
        object.__setattr__(self, "_hash", h)
    return h


# --------------------------------------------------------------------------
# Temporal and spatial coordinates
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class Point:
    """A point-like temporal coordinate: the event happens at one instant."""

    at: Fraction

    __hash__ = _cached_hash

    def __post_init__(self) -> None:
        object.__setattr__(self, "at", as_rational(self.at))


@dataclass(frozen=True, eq=True)
class Interval:
    """An extended temporal coordinate: the event spans [begin, end]."""

    begin: Fraction
    end: Fraction

    __hash__ = _cached_hash

    def __post_init__(self) -> None:
        object.__setattr__(self, "begin", as_rational(self.begin))
        object.__setattr__(self, "end", as_rational(self.end))
        if self.begin > self.end:
            raise InvariantError(f"interval begin {self.begin} > end {self.end}")


@dataclass(frozen=True, eq=True)
class Points:
    """A pointed temporal coordinate: one instant per time scale."""

    times: tuple[Fraction, ...]

    __hash__ = _cached_hash

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", tuple(as_rational(t) for t in self.times))
        if not self.times:
            raise InvariantError("pointed coordinate needs at least one time")


TemporalCoord = Union[Point, Interval, Points]


def temporal_values(coord: Optional[TemporalCoord]) -> tuple[Fraction, ...]:
    """All rational time values carried by a coordinate (both interval ends)."""
    if coord is None:
        return ()
    if isinstance(coord, Point):
        return (coord.at,)
    if isinstance(coord, Interval):
        return (coord.begin, coord.end)
    return coord.times


@dataclass(frozen=True, eq=True)
class Tag:
    """Where and when something happened.

    ``time`` is a temporal coordinate or None (abstract in time); ``space``
    is a node id in the document's space graph or None (abstract in space).
    """

    time: Optional[TemporalCoord] = None
    space: Optional[str] = None

    __hash__ = _cached_hash


@dataclass(frozen=True)
class SpaceGraph:
    """Finite carrier for system space: named nodes and undirected edges."""

    nodes: frozenset[str] = frozenset()
    edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        normalized = frozenset(
            (a, b) if a <= b else (b, a) for a, b in self.edges
        )
        object.__setattr__(self, "edges", normalized)
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise InvariantError(f"edge ({a}, {b}) uses undeclared nodes")


@dataclass(frozen=True)
class SemanticMap:
    """Total map from event names to values; unlisted names map to themselves."""

    entries: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        items = self.entries
        if isinstance(items, Mapping):
            items = tuple(sorted(items.items()))
        else:
            items = tuple(sorted(dict(items).items()))
        object.__setattr__(self, "entries", items)
        object.__setattr__(self, "_lookup", dict(items))

    def value_of(self, name: str) -> str:
        return self._lookup.get(name, name)  # type: ignore[attr-defined]


IDENTITY_SEMANTICS = SemanticMap()


# --------------------------------------------------------------------------
# Events
# --------------------------------------------------------------------------


class EventKind(str, enum.Enum):
    GENERIC = "generic"
    EMISSION = "emission"
    RECEPTION = "reception"
    READING = "reading"
    WRITING = "writing"


COMMUNICATION_KINDS = frozenset(
    {EventKind.EMISSION, EventKind.RECEPTION, EventKind.READING, EventKind.WRITING}
)


class Category(str, enum.Enum):
    IN_SYSTEM = "in-system"
    BY_SYSTEM = "by-system"
    FOR_SYSTEM = "for-system"


@dataclass(frozen=True, eq=True)
class Event:
    """An atomic occurrence.

    The value of an event is never stored: it is derived from the name
    through a :class:`SemanticMap`.  Identity for set semantics is
    (name, tag, kind, carrier).
    """

    name: str
    tag: Tag = Tag()
    kind: EventKind = EventKind.GENERIC
    carrier: Optional[str] = None
    in_state: Optional[str] = None
    out_state: Optional[str] = None
    observable: bool = True
    category: Optional[Category] = None

    __hash__ = _cached_hash

    def times(self) -> tuple[Fraction, ...]:
        return temporal_values(self.tag.time)

    def time_point(self) -> Fraction:
        """The single instant of a point-like event."""
        coord = self.tag.time
        if not isinstance(coord, Point):
            raise InvariantError(f"event {self.name!r} is not point-like")
        return coord.at


EventKey = tuple[str, Tag, EventKind, Optional[str]]


def event_key(e: Event) -> EventKey:
    """Structural identity of an event (memoized on the instance)."""
    key = e.__dict__.get("_key")
    if key is None:
        key = (e.name, e.tag, e.kind, e.carrier)
        object.__setattr__(e, "_key", key)
    return key


def event(
    name: str,
    t: Optional[RationalLike] = None,
    span: Optional[tuple[RationalLike, RationalLike]] = None,
    times: Optional[Iterable[RationalLike]] = None,
    space: Optional[str] = None,
    **kwargs,
) -> Event:
    """Convenience constructor: ``event("a", 1)`` is a point event a@1."""
    coord: Optional[TemporalCoord] = None
    if t is not None:
        coord = Point(as_rational(t))
    elif span is not None:
        coord = Interval(as_rational(span[0]), as_rational(span[1]))
    elif times is not None:
        coord = Points(tuple(as_rational(x) for x in times))
    return Event(name=name, tag=Tag(time=coord, space=space), **kwargs)


# --------------------------------------------------------------------------
# Relations and compatibility constraints
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    """A named binary relation over local ids of the owning system."""

    label: str
    pairs: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "pairs", frozenset((str(a), str(b)) for a, b in self.pairs)
        )


class CompatMode(str, enum.Enum):
    COMPATIBLE = "compatible"
    WEAKLY_COMPATIBLE = "weakly-compatible"
    STRONGLY_COMPATIBLE = "strongly-compatible"
    INCOMPATIBLE = "incompatible"
    STRONGLY_INCOMPATIBLE = "strongly-incompatible"
    WEAKLY_INCOMPATIBLE = "weakly-incompatible"


IMPLICATION_MODES = frozenset({CompatMode.COMPATIBLE, CompatMode.STRONGLY_COMPATIBLE})
EXCLUSION_MODES = frozenset(
    {CompatMode.INCOMPATIBLE, CompatMode.STRONGLY_INCOMPATIBLE}
)


@dataclass(frozen=True)
class CompatConstraint:
    """Realization constraint between two elements.

    Compatible modes read as implications (first present forces second);
    incompatible modes as mutual exclusions; weak modes are annotations.
    """

    pair: tuple[str, str]
    mode: CompatMode

    def __post_init__(self) -> None:
        object.__setattr__(self, "pair", (str(self.pair[0]), str(self.pair[1])))
        object.__setattr__(self, "mode", CompatMode(self.mode))


class Status(str, enum.Enum):
    ACTUALIZED = "actualized"
    POTENTIAL = "potential"
    EMERGING = "emerging"


# --------------------------------------------------------------------------
# Systems of elements: shared canonicalization for actions and processes
# --------------------------------------------------------------------------


def _canonical_entries(elements, what: str) -> tuple[tuple[str, object], ...]:
    """Normalize events/actions input into a sorted (id, element) tuple."""
    if isinstance(elements, tuple):
        # fast path: already a strictly id-sorted pair tuple
        prev = None
        for kv in elements:
            if (
                type(kv) is not tuple
                or len(kv) != 2
                or not isinstance(kv[0], str)
                or (prev is not None and kv[0] <= prev)
            ):
                break
            prev = kv[0]
        else:
            return elements
    if isinstance(elements, Mapping):
        items = [(str(k), v) for k, v in elements.items()]
    else:
        seq = list(elements)
        if seq and all(isinstance(x, tuple) and len(x) == 2 for x in seq):
            items = [(str(k), v) for k, v in seq]
        else:
            items = [(f"e{i}", v) for i, v in enumerate(seq)]
    seen: set[str] = set()
    for key, _ in items:
        if key in seen:
            raise InvariantError(f"duplicate {what} id {key!r}")
        seen.add(key)
    return tuple(sorted(items, key=lambda kv: kv[0]))


def _merge_relations(relations: Iterable[Relation]) -> tuple[Relation, ...]:
    """Union pairs of same-label relations and order labels."""
    if isinstance(relations, tuple):
        prev = None
        for r in relations:
            if type(r) is not Relation or (prev is not None and r.label <= prev):
                break
            prev = r.label
        else:
            return relations
    by_label: dict[str, set[tuple[str, str]]] = {}
    for r in relations:
        by_label.setdefault(r.label, set()).update(r.pairs)
    return tuple(
        Relation(label, frozenset(pairs)) for label, pairs in sorted(by_label.items())
    )


def _sorted_constraints(
    constraints: Iterable[CompatConstraint],
) -> tuple[CompatConstraint, ...]:
    if isinstance(constraints, tuple):
        prev = None
        for c in constraints:
            if type(c) is not CompatConstraint:
                break
            key = (c.pair, c.mode.value)
            if prev is not None and key <= prev:
                break
            prev = key
        else:
            return constraints
    unique = {(c.pair, c.mode): c for c in constraints}
    return tuple(
        unique[k] for k in sorted(unique, key=lambda pm: (pm[0], pm[1].value))
    )


def _check_system_invariants(
    entries, relations, constraints, status, actualized, what: str
) -> None:
    ids = {eid for eid, _ in entries}
    for r in relations:
        for a, b in r.pairs:
            if a not in ids or b not in ids:
                raise ResolutionError(
                    f"relation {r.label!r} refers to unknown {what} id ({a}, {b})"
                )
    for c in constraints:
        a, b = c.pair
        if a not in ids or b not in ids:
            raise ResolutionError(f"constraint refers to unknown {what} id ({a}, {b})")
    if status is Status.ACTUALIZED:
        for c in constraints:
            if c.mode in EXCLUSION_MODES:
                raise InvariantError(
                    f"actualized {what} system carries incompatibility {c.pair}"
                )
    if status is not Status.EMERGING and actualized:
        raise InvariantError("actualized-part designation requires emerging status")
    if not actualized <= ids:
        raise ResolutionError("actualized part names unknown ids")


def _emerging_precedence(entries, actualized: frozenset[str], times_of) -> None:
    """All timed events of the actualized part must precede the potential part."""
    done = [t for eid, el in entries if eid in actualized for t in times_of(el)]
    todo = [t for eid, el in entries if eid not in actualized for t in times_of(el)]
    if done and todo and max(done) >= min(todo):
        raise InvariantError(
            "emerging system: actualized part does not precede potential part"
        )


@dataclass(frozen=True)
class Action:
    """A system of related events.

    ``events`` maps local ids to events; ``relations`` are named binary
    relations over those ids; ``constraints`` restrict realizations.  An
    emerging action designates its already-happened part in ``actualized``.
    Construction validates invariants but does not deduplicate — use
    :func:`eap.core.form_action` to build actions from raw events.
    """

    events: tuple[tuple[str, Event], ...] = ()
    relations: tuple[Relation, ...] = ()
    constraints: tuple[CompatConstraint, ...] = ()
    status: Status = Status.ACTUALIZED
    shared_carriers: frozenset[str] = frozenset()
    actualized: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        entries = _canonical_entries(self.events, "event")
        object.__setattr__(self, "events", entries)
        object.__setattr__(self, "relations", _merge_relations(self.relations))
        object.__setattr__(
            self, "constraints", _sorted_constraints(self.constraints)
        )
        object.__setattr__(self, "status", Status(self.status))
        object.__setattr__(self, "shared_carriers", frozenset(self.shared_carriers))
        object.__setattr__(self, "actualized", frozenset(self.actualized))
        _check_system_invariants(
            entries, self.relations, self.constraints, self.status,
            self.actualized, "event",
        )
        keys = [event_key(e) for _, e in entries]
        if len(set(keys)) != len(keys):
            raise InvariantError("two local ids name structurally identical events")
        if self.status is Status.EMERGING:
            _emerging_precedence(entries, self.actualized, lambda e: e.times())

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(eid for eid, _ in self.events)

    @property
    def event_map(self) -> dict[str, Event]:
        return dict(self.events)

    def get(self, eid: str) -> Event:
        for key, e in self.events:
            if key == eid:
                return e
        raise ResolutionError(f"unknown event id {eid!r}")

    def __len__(self) -> int:
        return len(self.events)

    def times(self) -> tuple[Fraction, ...]:
        return tuple(t for _, e in self.events for t in e.times())


EMPTY_ACTION = Action()


def action_key(a: Action):
    """Structural identity of an action, independent of local id names.

    Well defined because the events of an action are pairwise distinct
    under their own identity key.
    """
    ekeys = {eid: event_key(e) for eid, e in a.events}
    return (
        frozenset(ekeys.values()),
        frozenset(
            (r.label, frozenset((ekeys[x], ekeys[y]) for x, y in r.pairs))
            for r in a.relations
        ),
        frozenset((ekeys[c.pair[0]], ekeys[c.pair[1]], c.mode) for c in a.constraints),
        a.status,
        a.shared_carriers,
        frozenset(ekeys[i] for i in a.actualized),
    )


@dataclass(frozen=True)
class Process:
    """A system of actions: the top tier of the model."""

    actions: tuple[tuple[str, Action], ...] = ()
    relations: tuple[Relation, ...] = ()
    constraints: tuple[CompatConstraint, ...] = ()
    status: Status = Status.ACTUALIZED
    actualized: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        entries = _canonical_entries(self.actions, "action")
        object.__setattr__(self, "actions", entries)
        object.__setattr__(self, "relations", _merge_relations(self.relations))
        object.__setattr__(
            self, "constraints", _sorted_constraints(self.constraints)
        )
        object.__setattr__(self, "status", Status(self.status))
        object.__setattr__(self, "actualized", frozenset(self.actualized))
        _check_system_invariants(
            entries, self.relations, self.constraints, self.status,
            self.actualized, "action",
        )
        keys = [action_key(a) for _, a in entries]
        if len(set(keys)) != len(keys):
            raise InvariantError("two local ids name structurally identical actions")
        if self.status is Status.EMERGING:
            _emerging_precedence(entries, self.actualized, lambda a: a.times())

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(aid for aid, _ in self.actions)

    @property
    def action_map(self) -> dict[str, Action]:
        return dict(self.actions)

    def get(self, aid: str) -> Action:
        for key, a in self.actions:
            if key == aid:
                return a
        raise ResolutionError(f"unknown action id {aid!r}")

    def __len__(self) -> int:
        return len(self.actions)

    def events(self) -> tuple[tuple[str, str, Event], ...]:
        """All event occurrences as (action id, event id, event) triples.

        A process's events are the disjoint union over its actions, so a
        structurally identical event appearing in two actions yields two
        occurrences.
        """
        return tuple(
            (aid, eid, e) for aid, a in self.actions for eid, e in a.events
        )

    def times(self) -> tuple[Fraction, ...]:
        return tuple(t for _, _, e in self.events() for t in e.times())


EMPTY_PROCESS = Process()


def process_key(p: Process):
    """Structural identity of a process, independent of local id names."""
    akeys = {aid: action_key(a) for aid, a in p.actions}
    return (
        frozenset(akeys.values()),
        frozenset(
            (r.label, frozenset((akeys[x], akeys[y]) for x, y in r.pairs))
            for r in p.relations
        ),
        frozenset((akeys[c.pair[0]], akeys[c.pair[1]], c.mode) for c in p.constraints),
        p.status,
        frozenset(akeys[i] for i in p.actualized),
    )


@dataclass(frozen=True)
class Document:
    """A self-contained collection of named actions and processes."""

    space_graph: SpaceGraph = SpaceGraph()
    semantics: SemanticMap = IDENTITY_SEMANTICS
    actions: tuple[tuple[str, Action], ...] = ()
    processes: tuple[tuple[str, Process], ...] = ()

    def __post_init__(self) -> None:
        for attr in ("actions", "processes"):
            value = getattr(self, attr)
            items = value.items() if isinstance(value, Mapping) else value
            items = [(str(k), v) for k, v in items]
            names = [k for k, _ in items]
            if len(set(names)) != len(names):
                raise InvariantError(f"duplicate {attr[:-1]} name in document")
            object.__setattr__(
                self, attr, tuple(sorted(items, key=lambda kv: kv[0]))
            )
        for _, a in self.actions:
            self._check_spaces(a)
        for _, p in self.processes:
            for _, a in p.actions:
                self._check_spaces(a)

    def _check_spaces(self, a: Action) -> None:
        for eid, e in a.events:
            node = e.tag.space
            if node is not None and node not in self.space_graph.nodes:
                raise ResolutionError(
                    f"event {eid!r} uses undeclared space node {node!r}"
                )

    @property
    def action_map(self) -> dict[str, Action]:
        return dict(self.actions)

    @property
    def process_map(self) -> dict[str, Process]:
        return dict(self.processes)
