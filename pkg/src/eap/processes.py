"""Third-level algebra: process compositions and observable-trace extraction.

Temporal compositions shift all events of the second operand uniformly, with
the delta computed over the full event sets of both processes by the same
policies as the action-level compositions, so the two levels agree on
single-action operands.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .actions import (
    Pairing,
    count_cross_pairs,
    count_parallel_pairs,
    interleave_delta,
    meet_systems,
    merge_status,
    mixed_seq_actions,
    parallel_delta,
    point_times,
    project_tags,
    project_values,
    rename_action,
    seq_delta,
    shift_action,
    strong_seq_actions,
    union_entries,
    union_systems,
)
from .core import form_process, subprocess
from .errors import (
    AmbiguousTraceError,
    CoverageError,
    InvalidParameterError,
    InvariantError,
    ResolutionError,
)
from .events import RenamingMap, TagShift, Translate
from .model import (
    Action,
    IDENTITY_SEMANTICS,
    Process,
    SemanticMap,
    Status,
    action_key,
    as_rational,
)

SILENT_NAME = "tau"


# --------------------------------------------------------------------------
# Free composition and meet
# --------------------------------------------------------------------------


def free_compose_p(p1: Process, p2: Process) -> Process:
    """Union of actions keeping existing relations and adding none."""
    entries, relations, constraints = union_systems(
        list(p1.actions), list(p2.actions), p1, p2, action_key
    )
    return Process(
        actions=tuple(entries),
        relations=tuple(relations),
        constraints=tuple(constraints),
        status=merge_status(p1.status, p2.status),
    )


def meet_p(p1: Process, p2: Process) -> Process:
    """Actions and relations present in both operands."""
    kept, relations, constraints = meet_systems(
        list(p1.actions), list(p2.actions), p1, p2, action_key
    )
    return Process(
        actions=tuple(kept),
        relations=tuple(relations),
        constraints=tuple(constraints),
        status=merge_status(p1.status, p2.status),
    )


# --------------------------------------------------------------------------
# Temporal compositions
# --------------------------------------------------------------------------


def _shift_all(p: Process, delta: Fraction) -> Process:
    if delta == 0:
        return p
    sft = Translate(delta)
    return form_process(
        [(aid, shift_action(a, sft)) for aid, a in p.actions],
        relations=p.relations,
        constraints=p.constraints,
        status=p.status,
        actualized=p.actualized,
    )


def _occurrence_times(p: Process, what: str) -> list[Fraction]:
    return point_times([e for _, _, e in p.events()], what)


def temporal_compose_p(
    p1: Process, p2: Process, kind: str, gap=Fraction(1)
) -> Process:
    """Sequential, interleaving, or parallel composition of processes."""
    if kind == "seq":
        gap = as_rational(gap)
        if gap <= 0:
            raise InvalidParameterError("gap must be positive")
        t1 = _occurrence_times(p1, "sequential composition")
        t2 = _occurrence_times(p2, "sequential composition")
        delta = seq_delta(t1, t2, gap)
    elif kind == "interleave":
        t1 = _occurrence_times(p1, "interleaving composition")
        t2 = _occurrence_times(p2, "interleaving composition")
        delta = interleave_delta(t1, t2)
    elif kind == "parallel":
        t1 = _occurrence_times(p1, "parallel composition")
        t2 = _occurrence_times(p2, "parallel composition")
        if not t1 or not t2:
            raise InvalidParameterError(
                "parallel composition needs non-empty operands"
            )
        delta = parallel_delta(t1, t2)
    else:
        raise InvalidParameterError(f"unknown composition kind {kind!r}")
    return free_compose_p(p1, _shift_all(p2, delta))


# --------------------------------------------------------------------------
# Projections and transforms
# --------------------------------------------------------------------------


def project_p(
    p: Process,
    kind: str,
    selection,
    semantics: SemanticMap = IDENTITY_SEMANTICS,
) -> Process:
    """Project every action; actions emptied by the projection are dropped."""
    if kind == "values":
        projected = [
            (aid, project_values(a, selection, semantics)) for aid, a in p.actions
        ]
    elif kind == "tags":
        projected = [(aid, project_tags(a, selection)) for aid, a in p.actions]
    else:
        raise InvalidParameterError(f"unknown projection kind {kind!r}")
    keep = [aid for aid, a in projected if len(a) > 0]
    base = subprocess(p, keep)
    by_id = dict(projected)
    return form_process(
        [(aid, by_id[aid]) for aid, _ in base.actions],
        relations=base.relations,
        constraints=base.constraints,
        status=base.status,
        actualized=base.actualized & frozenset(keep),
    )


def transform_p(
    p: Process,
    kind: str,
    arg: Union[TagShift, RenamingMap],
    semantics: SemanticMap = IDENTITY_SEMANTICS,
) -> Process:
    """Uniform shift or renaming applied inside every action."""
    if kind == "shift":
        transformed = [(aid, shift_action(a, arg)) for aid, a in p.actions]
    elif kind == "rename":
        transformed = [
            (aid, rename_action(a, arg, semantics)) for aid, a in p.actions
        ]
    else:
        raise InvalidParameterError(f"unknown transform kind {kind!r}")
    return form_process(
        transformed,
        relations=p.relations,
        constraints=p.constraints,
        status=p.status,
        actualized=p.actualized,
    )


# --------------------------------------------------------------------------
# Strong and mixed sequential composition
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ActionPairing:
    """Action-level pairing with one event pairing per linked action pair."""

    pairs: tuple[tuple[str, str, Pairing], ...]

    def __post_init__(self) -> None:
        pairs = tuple(
            (str(a), str(b), p if isinstance(p, Pairing) else Pairing(tuple(p)))
            for a, b, p in self.pairs
        )
        object.__setattr__(self, "pairs", pairs)
        lefts = [a for a, _, _ in pairs]
        rights = [b for _, b, _ in pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise InvariantError("action pairing repeats an id on one side")


def _linked_compose_p(
    p1: Process,
    p2: Process,
    pairing: ActionPairing,
    gap,
    require_all: bool,
) -> Process:
    gap = as_rational(gap)
    if gap <= 0:
        raise InvalidParameterError("gap must be positive")
    left_ids = set(p1.ids)
    right_ids = set(p2.ids)
    for lid, rid, _ in pairing.pairs:
        if lid not in left_ids:
            raise ResolutionError(f"pairing names unknown left action {lid!r}")
        if rid not in right_ids:
            raise ResolutionError(f"pairing names unknown right action {rid!r}")
    if require_all:
        if {l for l, _, _ in pairing.pairs} != left_ids or {
            r for _, r, _ in pairing.pairs
        } != right_ids:
            raise CoverageError(
                "strong sequential composition must pair every action"
            )

    t1 = _occurrence_times(p1, "sequential composition")
    t2 = _occurrence_times(p2, "sequential composition")
    delta = seq_delta(t1, t2, gap)

    left_map = p1.action_map
    right_map = p2.action_map
    paired_left = {l for l, _, _ in pairing.pairs}
    paired_right = {r for _, r, _ in pairing.pairs}
    compose = strong_seq_actions if require_all else mixed_seq_actions
    composed: list[tuple[str, Action]] = []
    fid_of: dict[tuple[str, str], str] = {}
    for lid, rid, event_pairing in pairing.pairs:
        fid = f"{lid};{rid}"
        fid_of[(lid, rid)] = fid
        composed.append(
            (fid, compose(left_map[lid], right_map[rid], event_pairing, gap))
        )
    shifted_tail = _shift_all(
        subprocess(p2, [aid for aid in p2.ids if aid not in paired_right]), delta
    )

    base = [(aid, a) for aid, a in p1.actions if aid not in paired_left]
    merged, remap_mid = union_entries(base, composed, action_key)
    entries, remap_tail = union_entries(
        merged, list(shifted_tail.actions), action_key
    )

    remap_left = {aid: aid for aid in p1.ids if aid not in paired_left}
    remap_right: dict[str, str] = {}
    for lid, rid, _ in pairing.pairs:
        target = remap_mid[fid_of[(lid, rid)]]
        remap_left[lid] = target
        remap_right[rid] = target
    for aid in shifted_tail.ids:
        remap_right[aid] = remap_tail[aid]

    from .actions import _remap

    lrels, lcons = _remap(p1.relations, p1.constraints, remap_left)
    rrels, rcons = _remap(p2.relations, p2.constraints, remap_right)
    return form_process(
        entries,
        relations=lrels + rrels,
        constraints=lcons + rcons,
        status=merge_status(p1.status, p2.status),
    )


def strong_seq_p(
    p1: Process, p2: Process, pairing: ActionPairing, gap=Fraction(1)
) -> Process:
    """Compose every action of the first process strongly with its pair."""
    return _linked_compose_p(p1, p2, pairing, gap, require_all=True)


def mixed_seq_p(
    p1: Process, p2: Process, pairing: ActionPairing, gap=Fraction(1)
) -> Process:
    """Compose the paired actions strongly; the rest sequence freely."""
    return _linked_compose_p(p1, p2, pairing, gap, require_all=False)


# --------------------------------------------------------------------------
# Whole-process predicates and measures
# --------------------------------------------------------------------------


def process_sequential(p: Process) -> bool:
    """All event occurrences point-like with pairwise distinct times."""
    from .core import _events_sequential

    return _events_sequential([e for _, _, e in p.events()])


def process_coordinated(p: Process) -> bool:
    """All event occurrences carry pairwise distinct tags."""
    from .core import _events_coordinated

    return _events_coordinated([e for _, _, e in p.events()])


def process_without_repetition(
    p: Process, semantics: SemanticMap = IDENTITY_SEMANTICS
) -> bool:
    """All event occurrences carry pairwise distinct values."""
    from .core import _events_without_repetition

    return _events_without_repetition([e for _, _, e in p.events()], semantics)


def mpar_pairs_p(p: Process) -> int:
    """Parallel pairs among all event occurrences of the process."""
    return count_parallel_pairs(_occurrence_times(p, "measure"))


def mpar_cross_p(p1: Process, p2: Process) -> int:
    return count_cross_pairs(
        _occurrence_times(p1, "measure"), _occurrence_times(p2, "measure")
    )


def mpar_seq_p(p: Process) -> int:
    times = _occurrence_times(p, "measure")
    return len(times) - len(set(times))


def mpar_seq_cross_p(p1: Process, p2: Process) -> int:
    return len(
        set(_occurrence_times(p1, "measure")) & set(_occurrence_times(p2, "measure"))
    )


# --------------------------------------------------------------------------
# Observable traces
# --------------------------------------------------------------------------


def observable_trace(p: Process) -> tuple[str, ...]:
    """Names of observable events in time order, silent steps removed."""
    if p.status is not Status.ACTUALIZED:
        raise InvalidParameterError("traces are defined for actualized processes")
    visible = [
        e
        for _, _, e in p.events()
        if e.observable and e.name != SILENT_NAME
    ]
    timed = point_times(visible, "trace extraction")
    if len(set(timed)) != len(timed):
        raise AmbiguousTraceError("two observable events share a time")
    return tuple(e.name for _, e in sorted(zip(timed, visible), key=lambda te: te[0]))
