"""Core operations: temporal predicates, classifications, sub-systems,
the two lifting operations, and realization of potential systems.

Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    CapacityError,
    InvalidParameterError,
    ResolutionError,
    ShapeMismatchError,
    UndefinedExtentError,
)
from .model import (
    Action,
    CompatConstraint,
    EXCLUSION_MODES,
    Event,
    EventKind,
    IDENTITY_SEMANTICS,
    IMPLICATION_MODES,
    Interval,
    Point,
    Process,
    Relation,
    SemanticMap,
    Status,
    action_key,
    as_rational,
    event_key,
)

# --------------------------------------------------------------------------
# Temporal predicates on events
# --------------------------------------------------------------------------


def parallel(e1: Event, e2: Event) -> bool:
    """Exact simultaneity: equal instants, or equal interval endpoints."""
    t1, t2 = e1.tag.time, e2.tag.time
    if isinstance(t1, Point) and isinstance(t2, Point):
        return t1.at == t2.at
    if isinstance(t1, Interval) and isinstance(t2, Interval):
        return t1.begin == t2.begin and t1.end == t2.end
    raise ShapeMismatchError(
        f"parallelism needs matching temporal shapes, got {t1!r} and {t2!r}"
    )


def r_parallel(e1: Event, e2: Event, r) -> bool:
    """Approximate simultaneity: temporal distance strictly below ``r``."""
    radius = as_rational(r)
    if radius <= 0:
        raise InvalidParameterError(f"r must be positive, got {radius}")
    t1, t2 = e1.tag.time, e2.tag.time
    if isinstance(t1, Point) and isinstance(t2, Point):
        return abs(t1.at - t2.at) < radius
    if isinstance(t1, Interval) and isinstance(t2, Interval):
        return abs(t1.begin - t2.begin) < radius and abs(t1.end - t2.end) < radius
    raise ShapeMismatchError(
        f"r-parallelism needs matching temporal shapes, got {t1!r} and {t2!r}"
    )


def _extent(e: Event) -> tuple[Fraction, Fraction]:
    """An event's time span; a point is the degenerate interval [t, t]."""
    times = e.times()
    if not times:
        raise ShapeMismatchError(f"event {e.name!r} has no temporal coordinate")
    return min(times), max(times)


def coexisting(e1: Event, e2: Event) -> bool:
    """Each starts before the other ends; equal point events coexist."""
    b1, e1_end = _extent(e1)
    b2, e2_end = _extent(e2)
    if b1 == e1_end == b2 == e2_end:
        return True
    return b1 < e2_end and b2 < e1_end


def separable_events(e1: Event, e2: Event) -> bool:
    return not coexisting(e1, e2)


# --------------------------------------------------------------------------
# Action extent and separability
# --------------------------------------------------------------------------


def action_begin(a: Action) -> Fraction:
    times = _action_times(a)
    return min(times)


def action_end(a: Action) -> Fraction:
    times = _action_times(a)
    return max(times)


def _action_times(a: Action) -> tuple[Fraction, ...]:
    if len(a) == 0:
        raise UndefinedExtentError("empty action has no temporal extent")
    if any(not e.times() for _, e in a.events):
        raise UndefinedExtentError("some events carry no temporal coordinate")
    return a.times()


def separable_actions(a: Action, b: Action) -> bool:
    """One action's end is at or before the other's beginning."""
    return action_end(a) <= action_begin(b) or action_end(b) <= action_begin(a)


def strictly_separable(a: Action, b: Action) -> bool:
    return action_end(a) < action_begin(b) or action_end(b) < action_begin(a)


# --------------------------------------------------------------------------
# Classification
# --------------------------------------------------------------------------

ABSTRACT = "abstract"
PURE_TEMPORAL = "pure-temporal"
PURE_SPATIAL = "pure-spatial"
EMBODIED = "embodied"


def classify_event(e: Event) -> str:
    """Placement of an event: abstract, pure-temporal, pure-spatial, embodied."""
    has_time = e.tag.time is not None
    has_space = e.tag.space is not None
    if has_time and has_space:
        return EMBODIED
    if has_time:
        return PURE_TEMPORAL
    if has_space:
        return PURE_SPATIAL
    return ABSTRACT


FINITE = "finite"
SIGNAL = "signal"
EXPLICIT_COMMUNICATION = "explicit-communication"
IMPLICIT_COMMUNICATION = "implicit-communication"
PURE_EXPLICIT_COMMUNICATION = "pure-explicit-communication"
WITHOUT_REPETITION = "without-repetition"
COORDINATED = "coordinated"
SEQUENTIAL = "sequential"

_COMM_KINDS = frozenset(
    {EventKind.EMISSION, EventKind.RECEPTION, EventKind.READING, EventKind.WRITING}
)
_EXPLICIT_KINDS = frozenset({EventKind.EMISSION, EventKind.RECEPTION})
_CARRIER_KINDS = frozenset({EventKind.READING, EventKind.WRITING})


def _all_distinct(items: Sequence) -> bool:
    return len(set(items)) == len(items)


def _events_sequential(events: Sequence[Event]) -> bool:
    """Point-like events with pairwise distinct times."""
    times = []
    for e in events:
        if not isinstance(e.tag.time, Point):
            return False
        times.append(e.tag.time.at)
    return _all_distinct(times)


def _events_coordinated(events: Sequence[Event]) -> bool:
    return _all_distinct([e.tag for e in events])


def _events_without_repetition(
    events: Sequence[Event], semantics: SemanticMap
) -> bool:
    return _all_distinct([semantics.value_of(e.name) for e in events])


def classify_action(
    a: Action, semantics: SemanticMap = IDENTITY_SEMANTICS
) -> frozenset[str]:
    """Every classification label whose defining predicate holds for ``a``."""
    events = [e for _, e in a.events]
    labels = {FINITE}
    if all(e.kind in _COMM_KINDS for e in events):
        labels.add(SIGNAL)
    if any(e.kind in _EXPLICIT_KINDS for e in events):
        labels.add(EXPLICIT_COMMUNICATION)
        if all(e.kind in _EXPLICIT_KINDS for e in events):
            labels.add(PURE_EXPLICIT_COMMUNICATION)
    if any(
        e.kind in _CARRIER_KINDS and e.carrier in a.shared_carriers for e in events
    ):
        labels.add(IMPLICIT_COMMUNICATION)
    if _events_without_repetition(events, semantics):
        labels.add(WITHOUT_REPETITION)
    if _events_coordinated(events):
        labels.add(COORDINATED)
    if _events_sequential(events):
        labels.add(SEQUENTIAL)
    return frozenset(labels)


COMMUNICATION = "communication"
PURE_COMMUNICATION = "pure-communication"
ACTION_SEQUENTIAL = "action-sequential"
STRICTLY_SEQUENTIAL = "strictly-sequential"
INTERLEAVING = "interleaving"


def _pairwise_separable(actions: Sequence[Action]) -> bool:
    try:
        return all(
            separable_actions(actions[i], actions[j])
            for i in range(len(actions))
            for j in range(i + 1, len(actions))
        )
    except UndefinedExtentError:
        return False


def classify_process(
    p: Process, semantics: SemanticMap = IDENTITY_SEMANTICS
) -> frozenset[str]:
    """Every classification label whose defining predicate holds for ``p``."""
    actions = [a for _, a in p.actions]
    action_labels = [classify_action(a, semantics) for a in actions]
    labels = {FINITE}
    if all(
        EXPLICIT_COMMUNICATION in ls or IMPLICIT_COMMUNICATION in ls
        for ls in action_labels
    ):
        labels.add(COMMUNICATION)
    if all(PURE_EXPLICIT_COMMUNICATION in ls for ls in action_labels):
        labels.add(PURE_COMMUNICATION)
    if _pairwise_separable(actions):
        labels.add(ACTION_SEQUENTIAL)
        if all(SEQUENTIAL in ls for ls in action_labels):
            labels.add(STRICTLY_SEQUENTIAL)
    occurrences = [e for _, _, e in p.events()]
    if _events_sequential(occurrences):
        labels.add(INTERLEAVING)
    return frozenset(labels)


# --------------------------------------------------------------------------
# Sub-systems
# --------------------------------------------------------------------------


def _restrict_relations(
    relations: Iterable[Relation],
    keep: frozenset[str],
    labels: Optional[frozenset[str]],
) -> tuple[Relation, ...]:
    kept = []
    for r in relations:
        if labels is not None and r.label not in labels:
            continue
        kept.append(
            Relation(r.label, frozenset(p for p in r.pairs if set(p) <= keep))
        )
    return tuple(kept)


def _restrict_constraints(
    constraints: Iterable[CompatConstraint], keep: frozenset[str]
) -> tuple[CompatConstraint, ...]:
    return tuple(c for c in constraints if set(c.pair) <= keep)


def subaction(
    a: Action,
    keep: Iterable[str],
    labels: Optional[Iterable[str]] = None,
) -> Action:
    """The sub-system of ``a`` induced on the ids in ``keep``.

    ``labels`` selects which named relations are induced; None means all of
    them (the complete subaction).
    """
    keep_set = frozenset(keep)
    unknown = keep_set - set(a.ids)
    if unknown:
        raise ResolutionError(f"unknown event ids {sorted(unknown)}")
    label_set = None if labels is None else frozenset(labels)
    if label_set is not None:
        present = {r.label for r in a.relations}
        missing = label_set - present
        if missing:
            raise ResolutionError(f"unknown relation labels {sorted(missing)}")
    return Action(
        events=tuple((eid, e) for eid, e in a.events if eid in keep_set),
        relations=_restrict_relations(a.relations, keep_set, label_set),
        constraints=_restrict_constraints(a.constraints, keep_set),
        status=a.status,
        shared_carriers=a.shared_carriers,
        actualized=a.actualized & keep_set,
    )


def subprocess(
    p: Process,
    keep: Iterable[str],
    labels: Optional[Iterable[str]] = None,
) -> Process:
    """The subprocess of ``p`` induced on the action ids in ``keep``."""
    keep_set = frozenset(keep)
    unknown = keep_set - set(p.ids)
    if unknown:
        raise ResolutionError(f"unknown action ids {sorted(unknown)}")
    label_set = None if labels is None else frozenset(labels)
    if label_set is not None:
        present = {r.label for r in p.relations}
        missing = label_set - present
        if missing:
            raise ResolutionError(f"unknown relation labels {sorted(missing)}")
    return Process(
        actions=tuple((aid, a) for aid, a in p.actions if aid in keep_set),
        relations=_restrict_relations(p.relations, keep_set, label_set),
        constraints=_restrict_constraints(p.constraints, keep_set),
        status=p.status,
        actualized=p.actualized & keep_set,
    )


def enhanced_subprocess(
    p: Process,
    keep: Iterable[str],
    labels: Optional[Iterable[str]] = None,
    extra: Iterable[Relation] = (),
) -> Process:
    """A subprocess that additionally carries the ``extra`` relations."""
    base = subprocess(p, keep, labels)
    keep_set = frozenset(base.ids)
    for r in extra:
        for pair in r.pairs:
            if not set(pair) <= keep_set:
                raise ResolutionError(
                    f"extra relation {r.label!r} leaves the kept action set"
                )
    return Process(
        actions=base.actions,
        relations=base.relations + tuple(extra),
        constraints=base.constraints,
        status=base.status,
        actualized=base.actualized,
    )


# --------------------------------------------------------------------------
# Lifts: forming actions from events and processes from actions
# --------------------------------------------------------------------------


def _dedupe(entries, key_fn):
    """Drop later entries whose key repeats; map every id to its survivor."""
    survivor_by_key: dict = {}
    kept = []
    remap: dict[str, str] = {}
    for eid, element in entries:
        key = key_fn(element)
        if key in survivor_by_key:
            remap[eid] = survivor_by_key[key]
        else:
            survivor_by_key[key] = eid
            remap[eid] = eid
            kept.append((eid, element))
    return kept, remap


def _remap_relations(relations, remap) -> list[Relation]:
    return [
        Relation(r.label, frozenset((remap[a], remap[b]) for a, b in r.pairs))
        for r in relations
    ]


def _remap_constraints(constraints, remap) -> list[CompatConstraint]:
    return [
        CompatConstraint((remap[c.pair[0]], remap[c.pair[1]]), c.mode)
        for c in constraints
    ]


def form_action(
    events,
    relations: Iterable[Relation] = (),
    constraints: Iterable[CompatConstraint] = (),
    status: Status = Status.ACTUALIZED,
    shared_carriers: Iterable[str] = (),
    actualized: Iterable[str] = (),
) -> Action:
    """First lift: build an action from events, with set semantics.

    Structurally identical events are merged and relation and constraint
    endpoints are redirected onto the surviving id.  ``events`` may be a
    mapping, an iterable of (id, event) pairs, or a bare iterable of events
    (ids e0, e1, ... are assigned by position).
    """
    from .model import _canonical_entries  # shared normalization

    entries = _canonical_entries(events, "event")
    kept, remap = _dedupe(entries, event_key)
    try:
        rels = _remap_relations(relations, remap)
        cons = _remap_constraints(constraints, remap)
        act = frozenset(remap[i] for i in actualized)
    except KeyError as exc:
        raise ResolutionError(f"dangling id {exc.args[0]!r}") from exc
    return Action(
        events=tuple(kept),
        relations=tuple(rels),
        constraints=tuple(cons),
        status=status,
        shared_carriers=frozenset(shared_carriers),
        actualized=act,
    )


def form_process(
    actions,
    relations: Iterable[Relation] = (),
    constraints: Iterable[CompatConstraint] = (),
    status: Status = Status.ACTUALIZED,
    actualized: Iterable[str] = (),
) -> Process:
    """Second lift: build a process from actions, with set semantics."""
    from .model import _canonical_entries

    entries = _canonical_entries(actions, "action")
    kept, remap = _dedupe(entries, action_key)
    try:
        rels = _remap_relations(relations, remap)
        cons = _remap_constraints(constraints, remap)
        act = frozenset(remap[i] for i in actualized)
    except KeyError as exc:
        raise ResolutionError(f"dangling id {exc.args[0]!r}") from exc
    return Process(
        actions=tuple(kept),
        relations=tuple(rels),
        constraints=tuple(cons),
        status=status,
        actualized=act,
    )


# --------------------------------------------------------------------------
# Realizations of potential and emerging systems
# --------------------------------------------------------------------------

DEFAULT_REALIZATION_BOUND = 16


class _ConstraintSystem:
    """Implication/exclusion view of a system's compatibility constraints.

    Element sets are integer bitmasks over the id order.  ``closure_of[i]``
    is the implication closure of element i (including i itself) and
    ``partners_of[i]`` the union of exclusion partners over that closure, so
    feasibility of adding an element to a closed conflict-free set is two
    mask operations.
    """

    def __init__(self, ids: Sequence[str], constraints) -> None:
        self.ids = list(ids)
        self.index = {eid: i for i, eid in enumerate(self.ids)}
        n = len(self.ids)
        implied: list[int] = [0] * n
        self.excl: list[int] = [0] * n
        for c in constraints:
            a, b = self.index[c.pair[0]], self.index[c.pair[1]]
            if c.mode in IMPLICATION_MODES:
                implied[a] |= 1 << b
            elif c.mode in EXCLUSION_MODES:
                self.excl[a] |= 1 << b
                self.excl[b] |= 1 << a
        self.closure_of: list[int] = [0] * n
        for i in range(n):
            mask = 1 << i
            stack = [i]
            while stack:
                extra = implied[stack.pop()] & ~mask
                while extra:
                    low = extra & -extra
                    mask |= low
                    stack.append(low.bit_length() - 1)
                    extra ^= low
            self.closure_of[i] = mask
        self.partners_of: list[int] = [
            self._partners(self.closure_of[i]) for i in range(n)
        ]

    def _bits(self, mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def _partners(self, mask: int) -> int:
        out = 0
        for i in self._bits(mask):
            out |= self.excl[i]
        return out

    def to_mask(self, members: Iterable[str]) -> int:
        out = 0
        for eid in members:
            out |= 1 << self.index[eid]
        return out

    def to_ids(self, mask: int) -> frozenset[str]:
        return frozenset(self.ids[i] for i in self._bits(mask))

    def close(self, mask: int) -> int:
        out = mask
        for i in self._bits(mask):
            out |= self.closure_of[i]
        return out

    def conflict_free(self, mask: int) -> bool:
        return all(not self.excl[i] & mask for i in self._bits(mask))

    def can_add(self, closed_ok: int, x: int) -> bool:
        """Whether a closed conflict-free set extends to one containing x.

        The least closed superset is the union with x's closure; it and
        hence every closed superset works iff no member of that union
        excludes another, which reduces to one mask test.
        """
        grown = closed_ok | self.closure_of[x]
        return not self.partners_of[x] & grown


def _maximal_satisfying_sets(cs: _ConstraintSystem, forced: frozenset[str]):
    """All inclusion-maximal closed, conflict-free supersets of ``forced``.

    Depth-first over the id order.  Including an element pulls in its
    implication closure.  Skipping an addable element is explored only when
    some still-addable element could later exclude it; otherwise every
    extension would stay extendable by it and no maximal set is lost.
    Leaves are checked for true maximality, which is decidable locally:
    a set extends by x exactly when the implication closure with x stays
    conflict free.
    """
    n = len(cs.ids)
    base = cs.close(cs.to_mask(forced))
    if not cs.conflict_free(base):
        return []
    results: set[int] = set()

    def rec(included: int, partners: int, idx: int) -> None:
        while idx < n and included >> idx & 1:
            idx += 1
        if idx == n:
            for x in range(n):
                if not included >> x & 1 and cs.can_add(included, x):
                    return
            results.add(included)
            return
        x = idx
        if not cs.can_add(included, x):
            rec(included, partners, idx + 1)
            return
        rec(included | cs.closure_of[x], partners | cs.partners_of[x], idx + 1)
        x_partners = partners | cs.partners_of[x]
        for y in range(n):
            if y == x or included >> y & 1:
                continue
            if cs.can_add(included, y) and cs.closure_of[y] & x_partners:
                rec(included, partners, idx + 1)
                break

    rec(base, cs._partners(base), 0)
    masks = [m for m in results if not any(m != t and m & t == m for t in results)]
    return sorted((cs.to_ids(m) for m in masks), key=sorted)


def realizations(
    x: Union[Action, Process],
    bound: Optional[int] = DEFAULT_REALIZATION_BOUND,
):
    """All maximal actualized selections from a potential or emerging system.

    Compatible constraints act as implications, incompatible ones as mutual
    exclusions, weak modes impose nothing.  For an emerging system the
    already-actualized part is forced present.  Contradictory constraints
    yield an empty list.
    """
    if x.status is Status.ACTUALIZED:
        raise InvalidParameterError("realizations expect a potential or emerging system")
    ids = list(x.ids)
    if bound is not None and len(ids) > bound:
        raise CapacityError(f"{len(ids)} elements exceed realization bound {bound}")
    cs = _ConstraintSystem(ids, x.constraints)
    forced = frozenset(x.actualized) if x.status is Status.EMERGING else frozenset()
    subsets = _maximal_satisfying_sets(cs, forced)
    if ids and subsets == [frozenset()]:
        return []
    out = []
    for chosen in subsets:
        if isinstance(x, Action):
            sub = subaction(x, chosen)
            out.append(
                Action(
                    events=sub.events,
                    relations=sub.relations,
                    constraints=(),
                    status=Status.ACTUALIZED,
                    shared_carriers=sub.shared_carriers,
                )
            )
        else:
            sub = subprocess(x, chosen)
            out.append(
                Process(
                    actions=sub.actions,
                    relations=sub.relations,
                    constraints=(),
                    status=Status.ACTUALIZED,
                )
            )
    return out
