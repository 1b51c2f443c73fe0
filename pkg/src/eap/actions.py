"""Second-level algebra: action compositions, projections, and parallelism measures.

The three temporal compositions (sequential, interleaving, parallel) each
shift the second operand by a deterministic delta and then take the free
composition.  They are defined for point-like events only; the predicates in
:mod:`eap.core` still accept extended events.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .core import form_action
from .errors import (
    CoverageError,
    InvalidParameterError,
    InvariantError,
    ResolutionError,
    UndefinedRatioError,
    UniverseError,
    UnsupportedShapeError,
)
from .events import RenamingMap, TagShift, Translate, fuse_events, rename_event, shift_event
from .model import (
    Action,
    CompatConstraint,
    Event,
    IDENTITY_SEMANTICS,
    Point,
    Relation,
    SemanticMap,
    Status,
    Tag,
    as_rational,
    event_key,
)

# --------------------------------------------------------------------------
# Shared merge machinery (used one level up by the process algebra)
# --------------------------------------------------------------------------


def merge_status(s1: Status, s2: Status) -> Status:
    """Status of a binary composition: actualized only if both operands are."""
    if s1 is Status.ACTUALIZED and s2 is Status.ACTUALIZED:
        return Status.ACTUALIZED
    return Status.POTENTIAL


def _fresh_id(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    n = 2
    while f"{base}_{n}" in taken:
        n += 1
    return f"{base}_{n}"


def union_entries(left, right, key_fn):
    """Set-semantics union of two (id, element) systems.

    Left ids survive as-is.  Right elements structurally present on the left
    merge onto the left id; genuinely new right elements keep their id unless
    it collides, in which case a fresh suffixed id is allocated.  Returns the
    merged entries plus the remapping of right-hand ids.
    """
    entries = list(left)
    by_key = {key_fn(el): eid for eid, el in left}
    taken = {eid for eid, _ in left}
    remap: dict[str, str] = {}
    for eid, el in right:
        key = key_fn(el)
        if key in by_key:
            remap[eid] = by_key[key]
            continue
        new_id = _fresh_id(eid, taken)
        taken.add(new_id)
        by_key[key] = new_id
        remap[eid] = new_id
        entries.append((new_id, el))
    return entries, remap


def _remap(relations, constraints, remap):
    rels = [
        Relation(r.label, frozenset((remap[a], remap[b]) for a, b in r.pairs))
        for r in relations
    ]
    cons = [
        CompatConstraint((remap[c.pair[0]], remap[c.pair[1]]), c.mode)
        for c in constraints
    ]
    return rels, cons


def union_systems(left_entries, right_entries, left, right, key_fn):
    """Merged entries, relations, and constraints of two systems."""
    entries, remap = union_entries(list(left_entries), list(right_entries), key_fn)
    rrels, rcons = _remap(right.relations, right.constraints, remap)
    return entries, list(left.relations) + rrels, list(left.constraints) + rcons


def meet_systems(left_entries, right_entries, left, right, key_fn):
    """Common elements plus label-wise common relations and constraints.

    Elements are matched by structural key; the survivors keep the left
    operand's ids.  A relation label survives only when both operands carry
    it, with the pair sets intersected structurally.
    """
    left_key = {eid: key_fn(el) for eid, el in left_entries}
    right_key = {eid: key_fn(el) for eid, el in right_entries}
    right_keys = set(right_key.values())
    kept = [(eid, el) for eid, el in left_entries if left_key[eid] in right_keys]
    kept_ids = {eid for eid, _ in kept}

    right_rel = {
        r.label: {(right_key[a], right_key[b]) for a, b in r.pairs}
        for r in right.relations
    }
    relations = []
    for r in left.relations:
        if r.label not in right_rel:
            continue
        pairs = frozenset(
            (a, b)
            for a, b in r.pairs
            if a in kept_ids
            and b in kept_ids
            and (left_key[a], left_key[b]) in right_rel[r.label]
        )
        relations.append(Relation(r.label, pairs))
    right_cons = {
        (right_key[c.pair[0]], right_key[c.pair[1]], c.mode)
        for c in right.constraints
    }
    constraints = [
        c
        for c in left.constraints
        if set(c.pair) <= kept_ids
        and (left_key[c.pair[0]], left_key[c.pair[1]], c.mode) in right_cons
    ]
    return kept, relations, constraints


# --------------------------------------------------------------------------
# Free composition, meet, complement
# --------------------------------------------------------------------------


def free_compose(a1: Action, a2: Action) -> Action:
    """Union of events keeping existing relations and adding none."""
    entries, relations, constraints = union_systems(
        list(a1.events), list(a2.events), a1, a2, event_key
    )
    return Action(
        events=tuple(entries),
        relations=tuple(relations),
        constraints=tuple(constraints),
        status=merge_status(a1.status, a2.status),
        shared_carriers=a1.shared_carriers | a2.shared_carriers,
    )


def meet(a1: Action, a2: Action) -> Action:
    """Events and relations present in both operands."""
    kept, relations, constraints = meet_systems(
        list(a1.events), list(a2.events), a1, a2, event_key
    )
    return Action(
        events=tuple(kept),
        relations=tuple(relations),
        constraints=tuple(constraints),
        status=merge_status(a1.status, a2.status),
        shared_carriers=a1.shared_carriers & a2.shared_carriers,
    )


def complement(a: Action, universe: Action) -> Action:
    """Events of the universe not in ``a``, with induced relations."""
    a_keys = {event_key(e) for _, e in a.events}
    u_keys = {event_key(e) for _, e in universe.events}
    if not a_keys <= u_keys:
        raise UniverseError("action is not contained in the given universe")
    keep = [eid for eid, e in universe.events if event_key(e) not in a_keys]
    from .core import subaction

    return subaction(universe, keep)


# --------------------------------------------------------------------------
# Shifts, renamings, projections
# --------------------------------------------------------------------------


def shift_action(
    a: Action,
    sft: Union[TagShift, Mapping[str, TagShift]],
    uniform: bool = True,
) -> Action:
    """Shift every event; a non-uniform shift maps each event id separately."""
    if uniform and isinstance(sft, Mapping):
        raise InvalidParameterError("a uniform shift needs a single mapping")
    if isinstance(sft, Mapping):
        missing = set(a.ids) - set(sft)
        if missing:
            raise ResolutionError(f"no shift given for event ids {sorted(missing)}")
        shifted = [(eid, shift_event(e, sft[eid])) for eid, e in a.events]
    else:
        shifted = [(eid, shift_event(e, sft)) for eid, e in a.events]
    return form_action(
        shifted,
        relations=a.relations,
        constraints=a.constraints,
        status=a.status,
        shared_carriers=a.shared_carriers,
        actualized=a.actualized,
    )


def rename_action(
    a: Action, rn: RenamingMap, semantics: SemanticMap = IDENTITY_SEMANTICS
) -> Action:
    """Rename every event; a non-injective renaming may merge events."""
    renamed = [(eid, rename_event(e, rn, semantics)) for eid, e in a.events]
    return form_action(
        renamed,
        relations=a.relations,
        constraints=a.constraints,
        status=a.status,
        shared_carriers=a.shared_carriers,
        actualized=a.actualized,
    )


def project_values(
    a: Action, values: Iterable[str], semantics: SemanticMap = IDENTITY_SEMANTICS
) -> Action:
    """Complete subaction on the events whose values lie in ``values``."""
    from .core import subaction

    wanted = frozenset(values)
    keep = [eid for eid, e in a.events if semantics.value_of(e.name) in wanted]
    return subaction(a, keep)


def project_tags(a: Action, tags: Iterable[Tag]) -> Action:
    """Complete subaction on the events whose tags lie in ``tags``."""
    from .core import subaction

    wanted = frozenset(tags)
    keep = [eid for eid, e in a.events if e.tag in wanted]
    return subaction(a, keep)


# --------------------------------------------------------------------------
# Temporal compositions
# --------------------------------------------------------------------------


def point_times(events: Sequence[Event], what: str) -> list[Fraction]:
    times = []
    for e in events:
        if not isinstance(e.tag.time, Point):
            raise UnsupportedShapeError(
                f"{what} is defined for point-like events only"
            )
        times.append(e.tag.time.at)
    return times


def seq_delta(
    left_times: Sequence[Fraction],
    right_times: Sequence[Fraction],
    gap: Fraction,
) -> Fraction:
    """Shift placing every right time strictly after every left time."""
    if not left_times or not right_times:
        return Fraction(0)
    return max(left_times) - min(right_times) + gap


def interleave_delta(
    left_times: Sequence[Fraction], right_times: Sequence[Fraction]
) -> Fraction:
    """Smallest delta in 0, 1/2, 1, ... making all cross times distinct."""
    left = set(left_times)
    delta = Fraction(0)
    while any(t + delta in left for t in right_times):
        delta += Fraction(1, 2)
    return delta


def parallel_delta(
    left_times: Sequence[Fraction], right_times: Sequence[Fraction]
) -> Fraction:
    """Alignment delta maximizing cross-parallel pairs; ties pick the smallest."""
    candidates = sorted({ta - tb for ta in left_times for tb in right_times})
    best = None
    best_count = -1
    for delta in candidates:
        shifted = [t + delta for t in right_times]
        count = sum(1 for ta in left_times for tb in shifted if ta == tb)
        if count > best_count:
            best, best_count = delta, count
    assert best is not None
    return best


def free_seq(a1: Action, a2: Action, gap=Fraction(1)) -> Action:
    """Shift the second action wholly after the first, then free-compose."""
    gap = as_rational(gap)
    if gap <= 0:
        raise InvalidParameterError("gap must be positive")
    t1 = point_times([e for _, e in a1.events], "sequential composition")
    t2 = point_times([e for _, e in a2.events], "sequential composition")
    delta = seq_delta(t1, t2, gap)
    return free_compose(a1, shift_action(a2, Translate(delta)))


def free_interleave(a1: Action, a2: Action) -> Action:
    """Shift the second action so no cross pair shares a time, then compose."""
    t1 = point_times([e for _, e in a1.events], "interleaving composition")
    t2 = point_times([e for _, e in a2.events], "interleaving composition")
    delta = interleave_delta(t1, t2)
    return free_compose(a1, shift_action(a2, Translate(delta)))


def free_parallel(a1: Action, a2: Action) -> Action:
    """Shift the second action to align as many cross pairs as possible."""
    if len(a1) == 0 or len(a2) == 0:
        raise InvalidParameterError("parallel composition needs non-empty operands")
    t1 = point_times([e for _, e in a1.events], "parallel composition")
    t2 = point_times([e for _, e in a2.events], "parallel composition")
    delta = parallel_delta(t1, t2)
    return free_compose(a1, shift_action(a2, Translate(delta)))


# --------------------------------------------------------------------------
# Parallelism measures
# --------------------------------------------------------------------------


def _time_classes(times: Sequence[Fraction]) -> dict[Fraction, int]:
    classes: dict[Fraction, int] = {}
    for t in times:
        classes[t] = classes.get(t, 0) + 1
    return classes


def count_parallel_pairs(times: Sequence[Fraction]) -> int:
    """Unordered pairs of distinct positions with equal times."""
    return sum(c * (c - 1) // 2 for c in _time_classes(times).values())


def count_cross_pairs(
    left: Sequence[Fraction], right: Sequence[Fraction]
) -> int:
    """Pairs (one from each side) with equal times."""
    classes = _time_classes(left)
    return sum(classes.get(t, 0) for t in right)


def mpar_pairs(a: Action) -> int:
    """Number of parallel event pairs inside an action."""
    return count_parallel_pairs(point_times([e for _, e in a.events], "measure"))


def mpar_cross(a: Action, b: Action) -> int:
    """Number of parallel pairs with one event from each action."""
    return count_cross_pairs(
        point_times([e for _, e in a.events], "measure"),
        point_times([e for _, e in b.events], "measure"),
    )


def mpar_seq(a: Action) -> int:
    """Cardinality minus the length of a maximal sequential subaction.

    All maximal sequential subactions pick exactly one event per time class,
    so the length is the number of distinct times.
    """
    times = point_times([e for _, e in a.events], "measure")
    return len(times) - len(set(times))


def mpar_seq_cross(a: Action, b: Action) -> int:
    """Parallel pairs between maximal sequential subactions of the operands.

    Independent of the choice of subactions: each contributes one event per
    time class, so the count is the number of shared distinct times.
    """
    ta = point_times([e for _, e in a.events], "measure")
    tb = point_times([e for _, e in b.events], "measure")
    return len(set(ta) & set(tb))


def is_k_parallel(a: Action, k) -> bool:
    """Whether the in-action parallelism ratio reaches ``k``."""
    k = as_rational(k)
    if not 0 <= k <= 1:
        raise InvalidParameterError("k must lie in [0, 1]")
    if len(a) == 0:
        raise UndefinedRatioError("k-parallelism of an empty action is undefined")
    return k <= Fraction(mpar_seq(a), len(a))


def is_k_parallel_pair(a: Action, b: Action, k) -> bool:
    """Whether the cross parallelism ratio of two actions reaches ``k``."""
    k = as_rational(k)
    if not 0 <= k <= 1:
        raise InvalidParameterError("k must lie in [0, 1]")
    if len(a) == 0 or len(b) == 0:
        raise UndefinedRatioError("k-parallelism with an empty action is undefined")
    return k <= Fraction(mpar_seq_cross(a, b), min(len(a), len(b)))


# --------------------------------------------------------------------------
# Strong and mixed sequential composition
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Pairing:
    """Event pairing between two actions; no id repeats on either side."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        pairs = tuple((str(a), str(b)) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        lefts = [a for a, _ in pairs]
        rights = [b for _, b in pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise InvariantError("pairing repeats an id on one side")


def _linked_compose(
    a1: Action, a2: Action, pairing: Pairing, gap, require_all: bool
) -> Action:
    gap = as_rational(gap)
    if gap <= 0:
        raise InvalidParameterError("gap must be positive")
    t1 = point_times([e for _, e in a1.events], "sequential composition")
    t2 = point_times([e for _, e in a2.events], "sequential composition")
    shifted = shift_action(a2, Translate(seq_delta(t1, t2, gap)))

    left_ids = set(a1.ids)
    right_ids = set(shifted.ids)
    for lid, rid in pairing.pairs:
        if lid not in left_ids:
            raise ResolutionError(f"pairing names unknown left id {lid!r}")
        if rid not in right_ids:
            raise ResolutionError(f"pairing names unknown right id {rid!r}")
    if require_all:
        paired_left = {lid for lid, _ in pairing.pairs}
        paired_right = {rid for _, rid in pairing.pairs}
        if paired_left != left_ids or paired_right != right_ids:
            raise CoverageError(
                "strong sequential composition must pair every event"
            )

    left_map = dict(a1.events)
    right_map = dict(shifted.events)
    fused: list[tuple[str, Event]] = []
    fid_of: dict[tuple[str, str], str] = {}
    for lid, rid in pairing.pairs:
        fid = f"{lid};{rid}"
        fid_of[(lid, rid)] = fid
        fused.append((fid, fuse_events(left_map[lid], right_map[rid])))
    paired_left = {lid for lid, _ in pairing.pairs}
    paired_right = {rid for _, rid in pairing.pairs}
    base = [(eid, e) for eid, e in a1.events if eid not in paired_left]
    tail = [(eid, e) for eid, e in shifted.events if eid not in paired_right]
    merged, remap_mid = union_entries(base, fused, event_key)
    events, remap_tail = union_entries(merged, tail, event_key)

    remap_left = {eid: eid for eid in a1.ids if eid not in paired_left}
    remap_right = {eid: remap_tail[eid] for eid in shifted.ids if eid not in paired_right}
    for lid, rid in pairing.pairs:
        target = remap_mid[fid_of[(lid, rid)]]
        remap_left[lid] = target
        remap_right[rid] = target
    lrels, lcons = _remap(a1.relations, a1.constraints, remap_left)
    rrels, rcons = _remap(shifted.relations, shifted.constraints, remap_right)
    return form_action(
        events,
        relations=lrels + rrels,
        constraints=lcons + rcons,
        status=merge_status(a1.status, a2.status),
        shared_carriers=a1.shared_carriers | a2.shared_carriers,
    )


def strong_seq_actions(
    a1: Action, a2: Action, pairing: Pairing, gap=Fraction(1)
) -> Action:
    """Fuse every event of the first action with its paired successor."""
    return _linked_compose(a1, a2, pairing, gap, require_all=True)


def mixed_seq_actions(
    a1: Action, a2: Action, pairing: Pairing, gap=Fraction(1)
) -> Action:
    """Fuse the paired events; the rest compose freely in sequence."""
    return _linked_compose(a1, a2, pairing, gap, require_all=False)
