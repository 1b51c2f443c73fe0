"""Embedding of classic process-algebra operators.

Expressions are compared by their sets of completed traces: an atom performs
its own name, choice unites, sequencing concatenates, the merges interleave,
communication fuses the boundary atoms of its operands, and abstraction
silences and removes hidden names.

``translate`` realizes an expression as a potential process whose actions
are singleton point-like-event actions: compatibility constraints carve the
realizations so that their observable traces are exactly the expression's
traces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import CapacityError, LinkError, ReservedNameError
from .model import (
    Action,
    CompatConstraint,
    CompatMode,
    Event,
    Point,
    Process,
    Relation,
    Status,
    Tag,
)
from .processes import SILENT_NAME

DEFAULT_DEPTH_BOUND = 12


# --------------------------------------------------------------------------
# Expression syntax
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """A primitive step, optionally annotated with input/output states."""

    name: str
    in_state: Optional[str] = None
    out_state: Optional[str] = None

    def __post_init__(self) -> None:
        if self.name == SILENT_NAME:
            raise ReservedNameError(f"{SILENT_NAME!r} is reserved for silent steps")


@dataclass(frozen=True)
class Choice:
    left: "ProcExpr"
    right: "ProcExpr"


@dataclass(frozen=True)
class Seq:
    left: "ProcExpr"
    right: "ProcExpr"


@dataclass(frozen=True)
class Merge:
    left: "ProcExpr"
    right: "ProcExpr"


@dataclass(frozen=True)
class LeftMerge:
    left: "ProcExpr"
    right: "ProcExpr"


@dataclass(frozen=True)
class RightMerge:
    left: "ProcExpr"
    right: "ProcExpr"


@dataclass(frozen=True)
class Comm:
    left: "ProcExpr"
    right: "ProcExpr"


@dataclass(frozen=True)
class Abstract:
    hide: frozenset[str]
    body: "ProcExpr"

    def __post_init__(self) -> None:
        object.__setattr__(self, "hide", frozenset(self.hide))
        if not self.hide:
            raise ReservedNameError("abstraction needs a non-empty hide set")


ProcExpr = Union[Atom, Choice, Seq, Merge, LeftMerge, RightMerge, Comm, Abstract]

_BINARY = (Choice, Seq, Merge, LeftMerge, RightMerge, Comm)

TraceSet = frozenset[tuple[str, ...]]


def expr_depth(x: ProcExpr) -> int:
    if isinstance(x, Atom):
        return 1
    if isinstance(x, Abstract):
        return 1 + expr_depth(x.body)
    return 1 + max(expr_depth(x.left), expr_depth(x.right))


def _check_depth(x: ProcExpr, bound: int) -> None:
    if expr_depth(x) > bound:
        raise CapacityError(f"expression depth exceeds bound {bound}")


# --------------------------------------------------------------------------
# Trace semantics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Sym:
    """One performed step: a name plus the states it runs between."""

    name: str
    in_state: Optional[str] = None
    out_state: Optional[str] = None


_SymTrace = tuple[_Sym, ...]


def _fuse_syms(left: _Sym, right: _Sym) -> _Sym:
    if left.out_state != right.in_state:
        raise LinkError(
            f"communication link: output state {left.out_state!r} does not "
            f"match input state {right.in_state!r}"
        )
    return _Sym(f"{left.name};{right.name}", left.in_state, right.out_state)


def _interleavings(s: _SymTrace, t: _SymTrace) -> set[_SymTrace]:
    if not s:
        return {t}
    if not t:
        return {s}
    out: set[_SymTrace] = set()
    out.update((s[0],) + rest for rest in _interleavings(s[1:], t))
    out.update((t[0],) + rest for rest in _interleavings(s, t[1:]))
    return out


def _sym_traces(x: ProcExpr, memo: dict) -> frozenset[_SymTrace]:
    if x in memo:
        return memo[x]
    result: set[_SymTrace]
    if isinstance(x, Atom):
        result = {(_Sym(x.name, x.in_state, x.out_state),)}
    elif isinstance(x, Choice):
        result = set(_sym_traces(x.left, memo)) | set(_sym_traces(x.right, memo))
    elif isinstance(x, Seq):
        result = {
            s + t
            for s in _sym_traces(x.left, memo)
            for t in _sym_traces(x.right, memo)
        }
    elif isinstance(x, Merge):
        result = set()
        for s in _sym_traces(x.left, memo):
            for t in _sym_traces(x.right, memo):
                result |= _interleavings(s, t)
    elif isinstance(x, LeftMerge):
        result = set()
        for s in _sym_traces(x.left, memo):
            if not s:
                continue  # a first step from the left is mandatory
            for t in _sym_traces(x.right, memo):
                result |= {(s[0],) + rest for rest in _interleavings(s[1:], t)}
    elif isinstance(x, RightMerge):
        result = set()
        for s in _sym_traces(x.left, memo):
            for t in _sym_traces(x.right, memo):
                if not t:
                    continue
                result |= {(t[0],) + rest for rest in _interleavings(s, t[1:])}
    elif isinstance(x, Comm):
        left = _sym_traces(x.left, memo)
        right = _sym_traces(x.right, memo)
        for s in left:
            for t in right:
                if s and t:
                    _fuse_syms(s[-1], t[0])  # any mismatch is an error
        result = {
            s[:-1] + (_fuse_syms(s[-1], t[0]),) + t[1:]
            for s in left
            for t in right
            if s and t
        }
    elif isinstance(x, Abstract):
        result = {
            tuple(sym for sym in trace if sym.name not in x.hide)
            for trace in _sym_traces(x.body, memo)
        }
    else:
        raise TypeError(f"not a process expression: {x!r}")
    memo[x] = frozenset(result)
    return memo[x]


def traces(x: ProcExpr, depth_bound: int = DEFAULT_DEPTH_BOUND) -> TraceSet:
    """The set of completed name sequences the expression may perform."""
    _check_depth(x, depth_bound)
    return frozenset(
        tuple(sym.name for sym in trace) for trace in _sym_traces(x, {})
    )


def equivalent(x: ProcExpr, y: ProcExpr, depth_bound: int = DEFAULT_DEPTH_BOUND) -> bool:
    """Trace-set equality."""
    return traces(x, depth_bound) == traces(y, depth_bound)


# --------------------------------------------------------------------------
# Translation into potential processes
# --------------------------------------------------------------------------


def _prefix_ids(p: Process, prefix: str) -> Process:
    remap = {aid: f"{prefix}{aid}" for aid in p.ids}
    return Process(
        actions=tuple((remap[aid], a) for aid, a in p.actions),
        relations=tuple(
            Relation(r.label, frozenset((remap[a], remap[b]) for a, b in r.pairs))
            for r in p.relations
        ),
        constraints=tuple(
            CompatConstraint((remap[c.pair[0]], remap[c.pair[1]]), c.mode)
            for c in p.constraints
        ),
        status=p.status,
    )


def _shift_process(p: Process, delta: Fraction) -> Process:
    from .processes import _shift_all

    return _shift_all(p, delta)


def _times(p: Process) -> list[Fraction]:
    return [e.tag.time.at for _, _, e in p.events()]


def _singleton(aid: str, ev: Event) -> tuple[str, Action]:
    return aid, Action(events=(("e", ev),))


def _impossible() -> Process:
    """A process with no realization at all: its one element blocks itself."""
    blocked = _singleton(
        "x", Event(SILENT_NAME, Tag(time=Point(Fraction(1))), observable=False)
    )
    return Process(
        actions=(blocked,),
        constraints=(CompatConstraint(("x", "x"), CompatMode.INCOMPATIBLE),),
        status=Status.POTENTIAL,
    )


def _chain_process(branches: list[_SymTrace]) -> Process:
    """Mutually incompatible chains of singleton actions, one per branch.

    Branch k occupies its own block of integer times, so branches never
    collide structurally.  An empty branch is a single silent placeholder,
    whose realization performs the empty trace.
    """
    actions: list[tuple[str, Action]] = []
    constraints: list[CompatConstraint] = []
    groups: list[list[str]] = []
    base = 0
    for k, branch in enumerate(branches):
        ids: list[str] = []
        syms = branch if branch else (
            _Sym(SILENT_NAME, None, None),
        )
        for i, sym in enumerate(syms):
            aid = f"b{k}.{i}"
            ev = Event(
                name=sym.name,
                tag=Tag(time=Point(Fraction(base + i + 1))),
                in_state=sym.in_state,
                out_state=sym.out_state,
                observable=sym.name != SILENT_NAME,
            )
            actions.append(_singleton(aid, ev))
            ids.append(aid)
        base += len(syms)
        groups.append(ids)
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            constraints.extend(
                CompatConstraint((a, b), CompatMode.INCOMPATIBLE)
                for a in groups[i]
                for b in groups[j]
            )
    return Process(
        actions=tuple(actions),
        constraints=tuple(constraints),
        status=Status.POTENTIAL,
    )


def _all_cross_incompatible(left: Process, right: Process) -> list[CompatConstraint]:
    return [
        CompatConstraint((a, b), CompatMode.INCOMPATIBLE)
        for a in left.ids
        for b in right.ids
    ]


def _combine(left: Process, right: Process, extra_constraints) -> Process:
    return Process(
        actions=left.actions + right.actions,
        relations=left.relations + right.relations,
        constraints=left.constraints + right.constraints + tuple(extra_constraints),
        status=Status.POTENTIAL,
    )


def _translate(x: ProcExpr, memo: dict) -> Process:
    from .actions import interleave_delta, seq_delta

    if not _sym_traces(x, memo):
        return _impossible()
    if isinstance(x, Atom):
        ev = Event(
            name=x.name,
            tag=Tag(time=Point(Fraction(1))),
            in_state=x.in_state,
            out_state=x.out_state,
        )
        return Process(actions=(_singleton("a0", ev),), status=Status.POTENTIAL)
    if isinstance(x, Choice):
        left = _prefix_ids(_translate(x.left, memo), "L")
        right = _prefix_ids(_translate(x.right, memo), "R")
        delta = interleave_delta(_times(left), _times(right))
        right = _shift_process(right, delta)
        return _combine(left, right, _all_cross_incompatible(left, right))
    if isinstance(x, Seq):
        left = _prefix_ids(_translate(x.left, memo), "L")
        right = _prefix_ids(_translate(x.right, memo), "R")
        delta = seq_delta(_times(left), _times(right), Fraction(1))
        right = _shift_process(right, delta)
        return _combine(left, right, ())
    if isinstance(x, (Merge, LeftMerge, RightMerge, Comm)):
        node_traces = _sym_traces(x, memo)
        ordered = sorted(
            node_traces,
            key=lambda tr: [(s.name, s.in_state or "", s.out_state or "") for s in tr],
        )
        return _chain_process(ordered)
    if isinstance(x, Abstract):
        body = _translate(x.body, memo)
        hidden_actions = []
        for aid, a in body.actions:
            events = tuple(
                (
                    eid,
                    Event(
                        name=e.name,
                        tag=e.tag,
                        kind=e.kind,
                        carrier=e.carrier,
                        in_state=e.in_state,
                        out_state=e.out_state,
                        observable=e.observable and e.name not in x.hide,
                        category=e.category,
                    ),
                )
                for eid, e in a.events
            )
            hidden_actions.append((aid, Action(events=events, status=a.status)))
        return Process(
            actions=tuple(hidden_actions),
            relations=body.relations,
            constraints=body.constraints,
            status=Status.POTENTIAL,
        )
    raise TypeError(f"not a process expression: {x!r}")


def translate(x: ProcExpr, depth_bound: int = DEFAULT_DEPTH_BOUND) -> Process:
    """Realize an expression as a potential process.

    The observable traces of the process's realizations are exactly
    ``traces(x)``.
    """
    _check_depth(x, depth_bound)
    return _translate(x, {})


# --------------------------------------------------------------------------
# Axiom checking
# --------------------------------------------------------------------------

AXIOMS: tuple[tuple[str, object], ...] = (
    (
        "choice-commutativity",
        lambda x, y, z: (Choice(x, y), Choice(y, x)),
    ),
    (
        "choice-associativity",
        lambda x, y, z: (Choice(Choice(x, y), z), Choice(x, Choice(y, z))),
    ),
    (
        "choice-idempotency",
        lambda x, y, z: (Choice(x, x), x),
    ),
    (
        "right-distributivity",
        lambda x, y, z: (Seq(Choice(x, y), z), Choice(Seq(x, z), Seq(y, z))),
    ),
    (
        "seq-associativity",
        lambda x, y, z: (Seq(Seq(x, y), z), Seq(x, Seq(y, z))),
    ),
)


@dataclass
class AxiomResult:
    name: str
    cases: int
    failures: int
    counterexample: Optional[tuple[str, str]] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class AxiomReport:
    seed: int
    cases: int
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


DEFAULT_ATOMS = ("a", "b", "c", "d")
_TRACE_CAP = 200


def random_expr(
    rng: random.Random,
    max_depth: int = 4,
    atoms: tuple[str, ...] = DEFAULT_ATOMS,
    trace_cap: int = _TRACE_CAP,
) -> ProcExpr:
    """A reproducible random expression with a bounded trace set."""
    for _ in range(64):
        x = _random_expr(rng, max_depth, atoms)
        try:
            if len(traces(x)) <= trace_cap:
                return x
        except LinkError:  # states never mismatch with bare atoms
            continue
    return Atom(rng.choice(atoms))


def _random_expr(rng: random.Random, depth: int, atoms) -> ProcExpr:
    if depth <= 1:
        return Atom(rng.choice(atoms))
    roll = rng.random()
    if roll < 0.30:
        return Atom(rng.choice(atoms))
    left = _random_expr(rng, depth - 1, atoms)
    right = _random_expr(rng, depth - 1, atoms)
    if roll < 0.50:
        return Choice(left, right)
    if roll < 0.70:
        return Seq(left, right)
    if roll < 0.78:
        return Merge(left, right)
    if roll < 0.84:
        return LeftMerge(left, right)
    if roll < 0.90:
        return RightMerge(left, right)
    if roll < 0.95:
        return Comm(left, right)
    return Abstract(frozenset({rng.choice(atoms)}), left)


def check_axioms(seed: int, cases: int) -> AxiomReport:
    """Check the five classic identities on seeded random expression triples."""
    from .dsl import serialize_expr

    rng = random.Random(seed)
    triples = [
        tuple(random_expr(rng, max_depth=4) for _ in range(3)) for _ in range(cases)
    ]
    report = AxiomReport(seed=seed, cases=cases)
    for name, build in AXIOMS:
        result = AxiomResult(name=name, cases=cases, failures=0)
        for x, y, z in triples:
            lhs, rhs = build(x, y, z)
            if traces(lhs) != traces(rhs):
                result.failures += 1
                if result.counterexample is None:
                    result.counterexample = (serialize_expr(lhs), serialize_expr(rhs))
        report.results.append(result)
    return report
