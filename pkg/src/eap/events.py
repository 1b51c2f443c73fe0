"""First-level algebra: compositions, shifts, renamings, and metrics on events."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

from .core import parallel
from .errors import (
    InvariantError,
    LinkError,
    OrderingError,
    ShiftMismatchError,
    UndefinedCompositionError,
    UndefinedRenamingError,
    UndefinedShiftError,
)
from .model import (
    Event,
    EventKind,
    IDENTITY_SEMANTICS,
    Interval,
    Point,
    Points,
    SemanticMap,
    Tag,
    TemporalCoord,
    as_rational,
)

# --------------------------------------------------------------------------
# Name composition rules
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcatNames:
    """Compose names by concatenation with a separator."""

    separator: str = ""

    def __call__(self, left: str, right: str) -> str:
        return f"{left}{self.separator}{right}"


@dataclass(frozen=True)
class LeftName:
    def __call__(self, left: str, right: str) -> str:
        return left


@dataclass(frozen=True)
class RightName:
    def __call__(self, left: str, right: str) -> str:
        return right


@dataclass(frozen=True)
class NameTable:
    """Compose names through an explicit table; misses are errors."""

    table: tuple[tuple[tuple[str, str], str], ...]

    def __post_init__(self) -> None:
        entries = self.table
        if isinstance(entries, Mapping):
            entries = tuple(sorted(entries.items()))
        object.__setattr__(self, "table", tuple(entries))
        object.__setattr__(self, "_lookup", dict(self.table))

    def __call__(self, left: str, right: str) -> str:
        try:
            return self._lookup[(left, right)]  # type: ignore[attr-defined]
        except KeyError:
            raise UndefinedCompositionError(
                f"no composition defined for ({left!r}, {right!r})"
            ) from None


NameCompositionRule = Callable[[str, str], str]


# --------------------------------------------------------------------------
# Tag shifts and renamings
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Translate:
    """Shift every temporal value by a fixed rational delta."""

    delta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", as_rational(self.delta))

    def apply(self, tag: Tag) -> Tag:
        return Tag(time=_translate_coord(tag.time, self.delta), space=tag.space)


def _translate_coord(
    coord: Optional[TemporalCoord], delta: Fraction
) -> Optional[TemporalCoord]:
    if coord is None:
        return None
    if isinstance(coord, Point):
        return Point(coord.at + delta)
    if isinstance(coord, Interval):
        return Interval(coord.begin + delta, coord.end + delta)
    return Points(tuple(t + delta for t in coord.times))


@dataclass(frozen=True)
class TagTable:
    """Shift tags through an explicit table; it must cover every tag used."""

    table: tuple[tuple[Tag, Tag], ...]

    def __post_init__(self) -> None:
        entries = self.table
        if isinstance(entries, Mapping):
            entries = tuple(entries.items())
        object.__setattr__(self, "table", tuple(entries))
        object.__setattr__(self, "_lookup", dict(self.table))

    def apply(self, tag: Tag) -> Tag:
        try:
            return self._lookup[tag]  # type: ignore[attr-defined]
        except KeyError:
            raise UndefinedShiftError(f"no shift defined for tag {tag!r}") from None


TagShift = Union[Translate, TagTable]


@dataclass(frozen=True)
class RenamingMap:
    """Value-to-value renaming; the injective flag is validated."""

    table: tuple[tuple[str, str], ...]
    injective: bool = False

    def __post_init__(self) -> None:
        entries = self.table
        if isinstance(entries, Mapping):
            entries = tuple(sorted(entries.items()))
        object.__setattr__(self, "table", tuple(entries))
        object.__setattr__(self, "_lookup", dict(self.table))
        if self.injective:
            images = [v for _, v in self.table]
            if len(set(images)) != len(images):
                raise InvariantError("renaming declared injective but is not")

    def apply(self, value: str) -> str:
        try:
            return self._lookup[value]  # type: ignore[attr-defined]
        except KeyError:
            raise UndefinedRenamingError(
                f"no renaming defined for value {value!r}"
            ) from None


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------


def m_compose(e1: Event, e2: Event, rule: NameCompositionRule) -> Event:
    """Direct parallel composition: compose names, keep the shared time.

    Requires the operands to be parallel.  The space coordinate is taken
    from the first operand (the operands share it in the usual case).
    """
    if not parallel(e1, e2):
        raise OrderingError("direct composition requires parallel events")
    return Event(
        name=rule(e1.name, e2.name),
        tag=Tag(time=e1.tag.time, space=e1.tag.space),
        kind=EventKind.GENERIC,
    )


def shift_event(e: Event, sft: TagShift) -> Event:
    """Move an event in space-time; everything but the tag is preserved."""
    return Event(
        name=e.name,
        tag=sft.apply(e.tag),
        kind=e.kind,
        carrier=e.carrier,
        in_state=e.in_state,
        out_state=e.out_state,
        observable=e.observable,
        category=e.category,
    )


def shifted_m_compose(
    e1: Event, e2: Event, rule: NameCompositionRule, sft: TagShift
) -> Event:
    """Shift the first operand onto the second, then compose names.

    The result carries the second operand's tag and is parallel to it.
    """
    if sft.apply(e1.tag) != e2.tag:
        raise ShiftMismatchError(
            "shift does not map the first event's tag onto the second's"
        )
    return Event(
        name=rule(e1.name, e2.name),
        tag=e2.tag,
        kind=EventKind.GENERIC,
    )


def rename_event(
    e: Event, rn: RenamingMap, semantics: SemanticMap = IDENTITY_SEMANTICS
) -> Event:
    """Replace the event's value; with identity semantics this renames it."""
    return Event(
        name=rn.apply(semantics.value_of(e.name)),
        tag=e.tag,
        kind=e.kind,
        carrier=e.carrier,
        in_state=e.in_state,
        out_state=e.out_state,
        observable=e.observable,
        category=e.category,
    )


def fuse_events(e1: Event, e2: Event, require_states: bool = True) -> Event:
    """Strong sequential fusion of two point-like events.

    The output state of the first must equal the input state of the second;
    the fused event runs from the first's input state to the second's
    output state, is named "first;second", and keeps the second's tag so
    that fusion chains stay point-like.
    """
    if require_states and (e1.out_state is None or e2.in_state is None):
        raise LinkError("strong sequential composition requires in/out states")
    if e1.out_state != e2.in_state:
        raise LinkError(
            f"output state {e1.out_state!r} does not match input state "
            f"{e2.in_state!r}"
        )
    if e1.time_point() >= e2.time_point():
        raise OrderingError("first event must happen strictly before second")
    return Event(
        name=f"{e1.name};{e2.name}",
        tag=e2.tag,
        kind=EventKind.GENERIC,
        in_state=e1.in_state,
        out_state=e2.out_state,
        observable=e1.observable and e2.observable,
    )


def strong_seq_events(e1: Event, e2: Event) -> Event:
    return fuse_events(e1, e2, require_states=True)


# --------------------------------------------------------------------------
# Metrics
# --------------------------------------------------------------------------


def discrete_name_metric(n1: str, n2: str) -> Fraction:
    return Fraction(0) if n1 == n2 else Fraction(1)


def default_tag_metric(t1: Tag, t2: Tag) -> Fraction:
    """Absolute time difference of point tags, plus 1 across space nodes."""
    c1, c2 = t1.time, t2.time
    if not isinstance(c1, Point) or not isinstance(c2, Point):
        raise InvariantError("default tag metric is defined on point tags")
    d = abs(c1.at - c2.at)
    if t1.space != t2.space:
        d += 1
    return d


def distance(
    e1: Event,
    e2: Event,
    mode: str = "euclidean",
    name_metric: Callable[[str, str], Fraction] = discrete_name_metric,
    tag_metric: Callable[[Tag, Tag], Fraction] = default_tag_metric,
) -> Union[Fraction, float]:
    """Distance between events under a name metric and a tag metric.

    The euclidean extension is sqrt(dN² + dST²) (a float unless zero); the
    shannon extension is dN + dST and stays exact.
    """
    dn = name_metric(e1.name, e2.name)
    dt = tag_metric(e1.tag, e2.tag)
    if mode == "shannon":
        return dn + dt
    if mode == "euclidean":
        if dn == 0 and dt == 0:
            return Fraction(0)
        return math.sqrt(dn * dn + dt * dt)
    raise InvariantError(f"unknown distance mode {mode!r}")
