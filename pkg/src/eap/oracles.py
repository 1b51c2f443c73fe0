"""Brute-force reference implementations.

These are intentionally exponential and bounded: they recompute measures and
realizations straight from the definitions, independently of the closed
forms and the pruned search used on the main paths, and exist to anchor
those paths in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .core import _ConstraintSystem
from .errors import CapacityError, InvariantError
from .model import Action, Point, Process, Status
from .processes import observable_trace

DEFAULT_ORACLE_BOUND = 16
DEFAULT_MEASURE_BOUND = 12


def _point_times(a: Action) -> list:
    times = []
    for _, e in a.events:
        if not isinstance(e.tag.time, Point):
            raise InvariantError("measure oracles require point-like events")
        times.append(e.tag.time.at)
    return times


def oracle_max_seq_subaction(a: Action, bound: int = DEFAULT_ORACLE_BOUND) -> int:
    """Maximum size of a sequential subaction, by full subset enumeration."""
    times = _point_times(a)
    n = len(times)
    if n > bound:
        raise CapacityError(f"{n} events exceed oracle bound {bound}")
    best = 0
    for mask in range(1 << n):
        chosen = [times[i] for i in range(n) if mask >> i & 1]
        if len(set(chosen)) == len(chosen):
            best = max(best, len(chosen))
    return best


def _maximal_sequential_selections(times: list) -> list[tuple]:
    """Every maximal sequential subaction: one event per time class."""
    classes: dict = {}
    for i, t in enumerate(times):
        classes.setdefault(t, []).append(i)
    return list(itertools.product(*classes.values())) if classes else [()]


@dataclass(frozen=True)
class MeasureQuad:
    """The four parallelism measures of a pair of actions."""

    pairs_left: int
    pairs_cross: int
    seq_left: int
    seq_cross: int


def oracle_measures(
    a: Action, b: Action, bound: int = DEFAULT_MEASURE_BOUND
) -> MeasureQuad:
    """Definitional measures, including the Def-of-subactions enumeration.

    The cross sequential measure is evaluated on every pair of maximal
    sequential subactions; a non-constant count across pairs is reported as
    a well-definedness violation.
    """
    ta, tb = _point_times(a), _point_times(b)
    if len(ta) > bound or len(tb) > bound:
        raise CapacityError(f"operand exceeds oracle bound {bound}")

    pairs_left = sum(
        1 for i in range(len(ta)) for j in range(i + 1, len(ta)) if ta[i] == ta[j]
    )
    pairs_cross = sum(1 for x in ta for y in tb if x == y)

    maximal_a = _maximal_sequential_selections(ta)
    lengths = {len(sel) for sel in maximal_a}
    if len(lengths) != 1:
        raise InvariantError("maximal sequential subactions differ in length")
    seq_left = len(ta) - lengths.pop()

    maximal_b = _maximal_sequential_selections(tb)
    counts = set()
    for sel_a in maximal_a:
        for sel_b in maximal_b:
            counts.add(
                sum(1 for i in sel_a for j in sel_b if ta[i] == tb[j])
            )
    if len(counts) != 1:
        raise InvariantError(
            "cross sequential measure is not constant across subaction pairs"
        )
    return MeasureQuad(pairs_left, pairs_cross, seq_left, counts.pop())


# --------------------------------------------------------------------------
# Realization enumeration
# --------------------------------------------------------------------------


def oracle_realization_sets(
    x: Union[Action, Process], bound: Optional[int] = DEFAULT_ORACLE_BOUND
) -> list[frozenset[str]]:
    """All maximal constraint-satisfying id subsets, by candidate extension.

    Walks every subset free of direct exclusions, then keeps the subsets
    that contain the forced part, are implication-closed, and cannot be
    extended.
    """
    ids = list(x.ids)
    n = len(ids)
    if bound is not None and n > bound:
        raise CapacityError(f"{n} elements exceed oracle bound {bound}")
    cs = _ConstraintSystem(ids, x.constraints)
    forced = (
        cs.to_mask(x.actualized) if x.status is Status.EMERGING else 0
    )
    results: list[int] = []

    def satisfying(members: int) -> bool:
        if forced & ~members:
            return False
        return cs.close(members) == members

    def maximal(members: int) -> bool:
        return all(
            members >> m & 1 or not cs.can_add(members, m) for m in range(n)
        )

    def walk(start: int, current: int) -> None:
        if satisfying(current) and maximal(current):
            results.append(current)
        for i in range(start, n):
            if cs.excl[i] & (current | 1 << i):
                continue
            walk(i + 1, current | 1 << i)

    walk(0, 0)
    if ids and results == [0]:
        return []
    return sorted((cs.to_ids(m) for m in results), key=sorted)


def oracle_realization_traces(
    p: Process, bound: Optional[int] = DEFAULT_ORACLE_BOUND
) -> frozenset[tuple[str, ...]]:
    """Observable traces of every realization, via the oracle enumeration."""
    from .core import subprocess

    out = set()
    for chosen in oracle_realization_sets(p, bound):
        sub = subprocess(p, chosen)
        realized = Process(
            actions=sub.actions,
            relations=sub.relations,
            constraints=(),
            status=Status.ACTUALIZED,
        )
        out.add(observable_trace(realized))
    return frozenset(out)
