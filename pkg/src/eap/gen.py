"""Seeded random generators for events, actions, processes, and documents.

Law suites and tests draw from these; everything is a pure function of the
supplied ``random.Random`` so runs are reproducible from a seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .core import form_action, form_process
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
    event_key,
)

NAME_POOL = tuple("abcdefghijklmnop")
HALF_TIMES = tuple(Fraction(n, 2) for n in range(0, 17))


def random_time(rng: random.Random, times: Sequence[Fraction] = HALF_TIMES) -> Fraction:
    return rng.choice(times)


def random_point_event(
    rng: random.Random,
    names: Sequence[str] = NAME_POOL,
    times: Sequence[Fraction] = HALF_TIMES,
    spaces: Sequence[Optional[str]] = (None,),
    kinds: Sequence[EventKind] = (EventKind.GENERIC,),
) -> Event:
    return Event(
        name=rng.choice(names),
        tag=Tag(time=Point(rng.choice(times)), space=rng.choice(spaces)),
        kind=rng.choice(kinds),
    )


def random_action(
    rng: random.Random,
    size: int,
    names: Sequence[str] = NAME_POOL,
    times: Sequence[Fraction] = HALF_TIMES,
    spaces: Sequence[Optional[str]] = (None,),
    kinds: Sequence[EventKind] = (EventKind.GENERIC,),
    relation_labels: Sequence[str] = (),
    status: Status = Status.ACTUALIZED,
) -> Action:
    """An action of exactly ``size`` structurally distinct point events."""
    pool_size = len(names) * len(times) * len(spaces) * len(kinds)
    if size > pool_size:
        raise ValueError("event pool too small for requested action size")
    combos = rng.sample(range(pool_size), size)
    events = []
    for i, combo in enumerate(combos):
        combo, name_i = divmod(combo, len(names))
        combo, time_i = divmod(combo, len(times))
        combo, space_i = divmod(combo, len(spaces))
        events.append((
            f"e{i}",
            Event(
                name=names[name_i],
                tag=Tag(time=Point(times[time_i]), space=spaces[space_i]),
                kind=kinds[combo],
            ),
        ))
    ids = [eid for eid, _ in events]
    relations = []
    for label in relation_labels:
        pairs = {
            (rng.choice(ids), rng.choice(ids))
            for _ in range(rng.randint(0, max(1, size)))
        }
        relations.append(Relation(label, frozenset(pairs)))
    return form_action(events, relations=relations, status=status)


def sequential_action(
    rng: random.Random,
    size: int,
    names: Sequence[str] = NAME_POOL,
    start: int = 0,
) -> Action:
    """An action whose events all have pairwise distinct integer times."""
    times = rng.sample(range(start, start + 4 * max(size, 1)), size)
    events = [
        (f"e{i}", Event(rng.choice(names), Tag(time=Point(Fraction(t)))))
        for i, t in enumerate(times)
    ]
    return form_action(events)


def random_process(
    rng: random.Random,
    n_actions: int,
    events_per_action: int = 3,
    names: Sequence[str] = NAME_POOL,
    times: Sequence[Fraction] = HALF_TIMES,
    status: Status = Status.ACTUALIZED,
) -> Process:
    actions: dict = {}
    attempts = 0
    while len(actions) < n_actions:
        size = rng.randint(1, events_per_action)
        a = random_action(rng, size, names=names, times=times)
        from .model import action_key

        actions.setdefault(action_key(a), a)
        attempts += 1
        if attempts > 64 * max(n_actions, 1):
            raise ValueError("action pool too small for requested process size")
    return form_process(
        [(f"a{i}", a) for i, a in enumerate(actions.values())], status=status
    )


# --------------------------------------------------------------------------
# Documents (round-trip testing)
# --------------------------------------------------------------------------

_STATE_POOL = ("s0", "s1", "s2")
_CARRIER_POOL = ("c0", "c1")


def _random_rich_event(rng: random.Random, nodes: Sequence[str]) -> Event:
    roll = rng.random()
    if roll < 0.15:
        time = None
    elif roll < 0.70:
        time = Point(random_time(rng))
    elif roll < 0.88:
        lo = random_time(rng)
        time = Interval(lo, lo + rng.choice((Fraction(0), Fraction(1, 2), Fraction(2))))
    else:
        time = Points(
            tuple(random_time(rng) for _ in range(rng.randint(1, 3)))
        )
    kind = rng.choice(tuple(EventKind))
    return Event(
        name=rng.choice(NAME_POOL),
        tag=Tag(time=time, space=rng.choice((None,) + tuple(nodes))),
        kind=kind,
        carrier=rng.choice((None,) + _CARRIER_POOL),
        in_state=rng.choice((None,) + _STATE_POOL),
        out_state=rng.choice((None,) + _STATE_POOL),
        observable=rng.random() < 0.8,
        category=rng.choice((None,) + tuple(Category)),
    )


def _random_doc_action(rng: random.Random, nodes: Sequence[str]) -> Action:
    size = rng.randint(0, 4)
    chosen: dict = {}
    attempts = 0
    while len(chosen) < size and attempts < 64:
        e = _random_rich_event(rng, nodes)
        chosen.setdefault(event_key(e), e)
        attempts += 1
    events = [(f"e{i}", e) for i, e in enumerate(chosen.values())]
    ids = [eid for eid, _ in events]
    relations = []
    if ids and rng.random() < 0.5:
        pairs = {(rng.choice(ids), rng.choice(ids)) for _ in range(rng.randint(1, 3))}
        relations.append(Relation(rng.choice(("causes", "follows")), frozenset(pairs)))
    constraints = []
    if ids and rng.random() < 0.4:
        modes = list(CompatMode)
        for _ in range(rng.randint(1, 2)):
            constraints.append(
                CompatConstraint(
                    (rng.choice(ids), rng.choice(ids)), rng.choice(modes)
                )
            )
    status = Status.POTENTIAL if constraints else rng.choice(
        (Status.ACTUALIZED, Status.POTENTIAL)
    )
    actualized: frozenset = frozenset()
    if status is Status.POTENTIAL and len(events) >= 2 and rng.random() < 0.3:
        done = _emerging_prefix(rng, events)
        if done:
            status = Status.EMERGING
            actualized = done
    shared = frozenset(c for c in _CARRIER_POOL if rng.random() < 0.3)
    return form_action(
        events,
        relations=relations,
        constraints=constraints,
        status=status,
        shared_carriers=shared,
        actualized=actualized,
    )


def _emerging_prefix(rng: random.Random, events) -> frozenset:
    """A nonempty proper prefix in time order, when one exists."""
    timed = [(eid, e.times()) for eid, e in events]
    if any(not ts for _, ts in timed):
        return frozenset()
    timed.sort(key=lambda it: it[1])
    cut = rng.randint(1, len(timed) - 1)
    done, todo = timed[:cut], timed[cut:]
    if max(t for _, ts in done for t in ts) >= min(t for _, ts in todo for t in ts):
        return frozenset()
    return frozenset(eid for eid, _ in done)


def random_document(rng: random.Random) -> Document:
    n_nodes = rng.randint(0, 3)
    nodes = tuple(f"n{i}" for i in range(n_nodes))
    edges = set()
    if len(nodes) >= 2:
        for _ in range(rng.randint(0, 3)):
            a, b = rng.sample(nodes, 2)
            edges.add((a, b))
    graph = SpaceGraph(nodes=frozenset(nodes), edges=frozenset(edges))
    semantics = SemanticMap(
        tuple(
            (n, rng.choice(NAME_POOL))
            for n in rng.sample(NAME_POOL, rng.randint(0, 3))
        )
    )
    actions = {}
    for i in range(rng.randint(0, 3)):
        actions[f"A{i}"] = _random_doc_action(rng, nodes)
    processes = {}
    for i in range(rng.randint(0, 2)):
        inner = {}
        for j in range(rng.randint(0, 3)):
            inner[f"a{j}"] = _random_doc_action(rng, nodes)
        processes[f"P{i}"] = form_process(inner, status=Status.POTENTIAL)
    return Document(
        space_graph=graph,
        semantics=semantics,
        actions=actions,
        processes=processes,
    )
