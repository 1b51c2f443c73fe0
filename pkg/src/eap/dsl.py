"""Textual formats: the expression grammar and the JSON document format.

Expression grammar (loosest to tightest): ``+`` choice, ``.`` sequencing,
``||`` / ``|L`` / ``|R`` merges, ``|`` communication; all left-associative.
``tau{names}(body)`` is abstraction and ``name[in->out]`` an atom with
states.  Serializers emit canonical text, and parse of serialize is the
identity on ASTs.

Documents are JSON with rationals as "num/den" strings so that exact times
survive the round trip.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .acp import (
    Abstract,
    Atom,
    Choice,
    Comm,
    LeftMerge,
    Merge,
    ProcExpr,
    RightMerge,
    Seq,
)
from .errors import DomainError, ReservedNameError, SchemaError
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
    TemporalCoord,
)

# --------------------------------------------------------------------------
# Rationals
# --------------------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")


def parse_rational(text: str) -> Fraction:
    """Strict "num" or "num/den" rational syntax."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise DomainError(f"not a rational literal: {text!r}")
    return Fraction(text)


def format_rational(q: Fraction) -> str:
    return str(q)


# --------------------------------------------------------------------------
# Expression lexer
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise DomainError("span start exceeds end")


class ParseError(DomainError):
    """Syntax error with a source span and the expected token set."""

    def __init__(self, span: SourceSpan, message: str, expected=()) -> None:
        detail = f"{span.line}:{span.column}: {message}"
        if expected:
            detail += f" (expected {', '.join(sorted(expected))})"
        super().__init__(detail)
        self.span = span
        self.message = message
        self.expected = frozenset(expected)


_TOKEN_SPEC = [
    ("IDENT", re.compile(r"[A-Za-z_][A-Za-z0-9_]*")),
    ("PAR", re.compile(r"\|\|")),
    ("LMERGE", re.compile(r"\|L")),
    ("RMERGE", re.compile(r"\|R")),
    ("COMM", re.compile(r"\|")),
    ("PLUS", re.compile(r"\+")),
    ("DOT", re.compile(r"\.")),
    ("ARROW", re.compile(r"->")),
    ("LPAREN", re.compile(r"\(")),
    ("RPAREN", re.compile(r"\)")),
    ("LBRACE", re.compile(r"\{")),
    ("RBRACE", re.compile(r"\}")),
    ("LBRACKET", re.compile(r"\[")),
    ("RBRACKET", re.compile(r"\]")),
    ("COMMA", re.compile(r",")),
]


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _span_at(text: str, start: int, end: int) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    column = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(start, end, line, column)


def _lex(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        for kind, pattern in _TOKEN_SPEC:
            m = pattern.match(text, pos)
            if m:
                tokens.append(_Token(kind, m.group(), _span_at(text, pos, m.end())))
                pos = m.end()
                break
        else:
            raise ParseError(
                _span_at(text, pos, pos + 1), f"unexpected character {text[pos]!r}"
            )
    tokens.append(_Token("EOF", "", _span_at(text, len(text), len(text))))
    return tokens


class _ExprParser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _lex(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                tok.span, f"unexpected {tok.text or 'end of input'!r}", {kind}
            )
        return self.advance()

    def parse(self) -> ProcExpr:
        expr = self.choice()
        tok = self.peek()
        if tok.kind != "EOF":
            raise ParseError(tok.span, f"trailing input {tok.text!r}", {"EOF"})
        return expr

    def choice(self) -> ProcExpr:
        node = self.seq()
        while self.peek().kind == "PLUS":
            self.advance()
            node = Choice(node, self.seq())
        return node

    def seq(self) -> ProcExpr:
        node = self.mergeterm()
        while self.peek().kind == "DOT":
            self.advance()
            node = Seq(node, self.mergeterm())
        return node

    def mergeterm(self) -> ProcExpr:
        node = self.commterm()
        while self.peek().kind in ("PAR", "LMERGE", "RMERGE"):
            op = self.advance().kind
            rhs = self.commterm()
            if op == "PAR":
                node = Merge(node, rhs)
            elif op == "LMERGE":
                node = LeftMerge(node, rhs)
            else:
                node = RightMerge(node, rhs)
        return node

    def commterm(self) -> ProcExpr:
        node = self.primary()
        while self.peek().kind == "COMM":
            self.advance()
            node = Comm(node, self.primary())
        return node

    def primary(self) -> ProcExpr:
        tok = self.peek()
        if tok.kind == "LPAREN":
            self.advance()
            node = self.choice()
            self.expect("RPAREN")
            return node
        if tok.kind == "IDENT" and tok.text == "tau":
            self.advance()
            if self.peek().kind != "LBRACE":
                raise ReservedNameError(
                    f"{tok.span.line}:{tok.span.column}: "
                    "'tau' is reserved and not usable as an atom"
                )
            self.advance()
            names = [self.expect("IDENT").text]
            while self.peek().kind == "COMMA":
                self.advance()
                names.append(self.expect("IDENT").text)
            self.expect("RBRACE")
            self.expect("LPAREN")
            body = self.choice()
            self.expect("RPAREN")
            return Abstract(frozenset(names), body)
        if tok.kind == "IDENT":
            self.advance()
            if self.peek().kind == "LBRACKET":
                self.advance()
                in_state = self.expect("IDENT").text
                self.expect("ARROW")
                out_state = self.expect("IDENT").text
                self.expect("RBRACKET")
                return Atom(tok.text, in_state, out_state)
            return Atom(tok.text)
        raise ParseError(
            tok.span,
            f"unexpected {tok.text or 'end of input'!r}",
            {"IDENT", "LPAREN", "tau"},
        )


def parse_expr(text: str) -> ProcExpr:
    """Parse an expression; errors carry source spans."""
    return _ExprParser(text).parse()


_LEVEL = {Choice: 0, Seq: 1, Merge: 2, LeftMerge: 2, RightMerge: 2, Comm: 3}
_OPS = {Choice: " + ", Seq: " . ", Merge: " || ", LeftMerge: " |L ", RightMerge: " |R ", Comm: " | "}


def serialize_expr(x: ProcExpr) -> str:
    """Canonical text: minimal parentheses under the grammar's precedence."""
    return _serialize(x, 0)


def _serialize(x: ProcExpr, context: int) -> str:
    if isinstance(x, Atom):
        if (x.in_state is None) != (x.out_state is None):
            raise DomainError(
                f"atom {x.name!r} has only one of its two states; "
                "the grammar requires both or neither"
            )
        if x.in_state is not None:
            return f"{x.name}[{x.in_state}->{x.out_state}]"
        return x.name
    if isinstance(x, Abstract):
        names = ",".join(sorted(x.hide))
        return f"tau{{{names}}}({_serialize(x.body, 0)})"
    level = _LEVEL[type(x)]
    left = _serialize(x.left, level)
    right = _serialize(x.right, level + 1)  # left-assoc: parenthesize right peers
    text = f"{left}{_OPS[type(x)]}{right}"
    if level < context:
        return f"({text})"
    return text


# --------------------------------------------------------------------------
# Document parsing
# --------------------------------------------------------------------------


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def _as_obj(value, path: str) -> dict:
    _require(isinstance(value, dict), path, "expected an object")
    return value


def _as_str(value, path: str) -> str:
    _require(isinstance(value, str), path, "expected a string")
    return value


def _parse_time(value, path: str) -> TemporalCoord:
    if isinstance(value, str):
        try:
            return Point(parse_rational(value))
        except DomainError:
            raise SchemaError(path, f"bad rational {value!r}") from None
    if isinstance(value, list):
        _require(len(value) == 2, path, "an interval needs exactly two endpoints")
        try:
            lo = parse_rational(_as_str(value[0], path))
            hi = parse_rational(_as_str(value[1], path))
            return Interval(lo, hi)
        except DomainError as exc:
            raise SchemaError(path, str(exc)) from None
    if isinstance(value, dict):
        pts = value.get("points")
        _require(isinstance(pts, list) and pts, path, "pointed time needs a non-empty points list")
        try:
            return Points(tuple(parse_rational(_as_str(p, path)) for p in pts))
        except DomainError as exc:
            raise SchemaError(path, str(exc)) from None
    raise SchemaError(path, "time must be a rational string, [lo, hi], or {points: [...]}")


_EVENT_KEYS = {
    "name", "time", "space", "kind", "carrier", "in", "out", "observable", "category",
}


def _parse_event(obj, path: str, nodes: frozenset[str]) -> Event:
    obj = _as_obj(obj, path)
    unknown = set(obj) - _EVENT_KEYS
    _require(not unknown, path, f"unknown keys {sorted(unknown)}")
    _require("name" in obj, path, "event needs a name")
    time: Optional[TemporalCoord] = None
    if "time" in obj:
        time = _parse_time(obj["time"], f"{path}.time")
    space = None
    if "space" in obj:
        space = _as_str(obj["space"], f"{path}.space")
        _require(space in nodes, f"{path}.space", f"undeclared node {space!r}")
    kind = EventKind.GENERIC
    if "kind" in obj:
        try:
            kind = EventKind(_as_str(obj["kind"], f"{path}.kind"))
        except ValueError:
            raise SchemaError(f"{path}.kind", f"unknown kind {obj['kind']!r}") from None
    category = None
    if "category" in obj:
        try:
            category = Category(_as_str(obj["category"], f"{path}.category"))
        except ValueError:
            raise SchemaError(
                f"{path}.category", f"unknown category {obj['category']!r}"
            ) from None
    observable = obj.get("observable", True)
    _require(isinstance(observable, bool), f"{path}.observable", "expected a boolean")
    return Event(
        name=_as_str(obj["name"], f"{path}.name"),
        tag=Tag(time=time, space=space),
        kind=kind,
        carrier=_as_str(obj["carrier"], f"{path}.carrier") if "carrier" in obj else None,
        in_state=_as_str(obj["in"], f"{path}.in") if "in" in obj else None,
        out_state=_as_str(obj["out"], f"{path}.out") if "out" in obj else None,
        observable=observable,
        category=category,
    )


def _parse_relations(value, path: str) -> tuple[Relation, ...]:
    _require(isinstance(value, list), path, "expected a list of relations")
    out = []
    for i, robj in enumerate(value):
        rp = f"{path}[{i}]"
        robj = _as_obj(robj, rp)
        _require("label" in robj and "pairs" in robj, rp, "relation needs label and pairs")
        pairs = robj["pairs"]
        _require(isinstance(pairs, list), f"{rp}.pairs", "expected a list of pairs")
        parsed = set()
        for j, pair in enumerate(pairs):
            _require(
                isinstance(pair, list) and len(pair) == 2,
                f"{rp}.pairs[{j}]",
                "expected [from, to]",
            )
            parsed.add((_as_str(pair[0], rp), _as_str(pair[1], rp)))
        out.append(Relation(_as_str(robj["label"], f"{rp}.label"), frozenset(parsed)))
    return tuple(out)


def _parse_constraints(value, path: str) -> tuple[CompatConstraint, ...]:
    _require(isinstance(value, list), path, "expected a list of constraints")
    out = []
    for i, cobj in enumerate(value):
        cp = f"{path}[{i}]"
        cobj = _as_obj(cobj, cp)
        _require("pair" in cobj and "mode" in cobj, cp, "constraint needs pair and mode")
        pair = cobj["pair"]
        _require(
            isinstance(pair, list) and len(pair) == 2, f"{cp}.pair", "expected [a, b]"
        )
        try:
            mode = CompatMode(_as_str(cobj["mode"], f"{cp}.mode"))
        except ValueError:
            raise SchemaError(f"{cp}.mode", f"unknown mode {cobj['mode']!r}") from None
        out.append(
            CompatConstraint((_as_str(pair[0], cp), _as_str(pair[1], cp)), mode)
        )
    return tuple(out)


def _parse_status(obj, path: str) -> Status:
    if "status" not in obj:
        return Status.ACTUALIZED
    try:
        return Status(_as_str(obj["status"], f"{path}.status"))
    except ValueError:
        raise SchemaError(f"{path}.status", f"unknown status {obj['status']!r}") from None


def _parse_action(obj, path: str, nodes: frozenset[str]) -> Action:
    obj = _as_obj(obj, path)
    events_obj = _as_obj(obj.get("events", {}), f"{path}.events")
    events = tuple(
        (eid, _parse_event(ev, f"{path}.events.{eid}", nodes))
        for eid, ev in sorted(events_obj.items())
    )
    actualized = obj.get("actualized", [])
    _require(isinstance(actualized, list), f"{path}.actualized", "expected a list")
    shared = obj.get("shared_carriers", [])
    _require(isinstance(shared, list), f"{path}.shared_carriers", "expected a list")
    try:
        return Action(
            events=events,
            relations=_parse_relations(obj.get("relations", []), f"{path}.relations"),
            constraints=_parse_constraints(
                obj.get("constraints", []), f"{path}.constraints"
            ),
            status=_parse_status(obj, path),
            shared_carriers=frozenset(_as_str(c, f"{path}.shared_carriers") for c in shared),
            actualized=frozenset(_as_str(a, f"{path}.actualized") for a in actualized),
        )
    except DomainError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(path, str(exc)) from None


def _parse_process(obj, path: str, nodes: frozenset[str]) -> Process:
    obj = _as_obj(obj, path)
    actions_obj = _as_obj(obj.get("actions", {}), f"{path}.actions")
    actions = tuple(
        (aid, _parse_action(a, f"{path}.actions.{aid}", nodes))
        for aid, a in sorted(actions_obj.items())
    )
    actualized = obj.get("actualized", [])
    _require(isinstance(actualized, list), f"{path}.actualized", "expected a list")
    try:
        return Process(
            actions=actions,
            relations=_parse_relations(obj.get("relations", []), f"{path}.relations"),
            constraints=_parse_constraints(
                obj.get("constraints", []), f"{path}.constraints"
            ),
            status=_parse_status(obj, path),
            actualized=frozenset(_as_str(a, f"{path}.actualized") for a in actualized),
        )
    except DomainError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(path, str(exc)) from None


def parse_document(text: str) -> Document:
    """Parse a JSON document; schema violations name the offending path."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    data = _as_obj(data, "$")
    unknown = set(data) - {"space_graph", "semantics", "actions", "processes"}
    _require(not unknown, "$", f"unknown keys {sorted(unknown)}")

    graph_obj = _as_obj(data.get("space_graph", {}), "space_graph")
    nodes_val = graph_obj.get("nodes", [])
    _require(isinstance(nodes_val, list), "space_graph.nodes", "expected a list")
    nodes = frozenset(_as_str(n, "space_graph.nodes") for n in nodes_val)
    edges_val = graph_obj.get("edges", [])
    _require(isinstance(edges_val, list), "space_graph.edges", "expected a list")
    edges = set()
    for i, edge in enumerate(edges_val):
        _require(
            isinstance(edge, list) and len(edge) == 2,
            f"space_graph.edges[{i}]",
            "expected [a, b]",
        )
        edges.add((_as_str(edge[0], "space_graph.edges"), _as_str(edge[1], "space_graph.edges")))
    try:
        graph = SpaceGraph(nodes=nodes, edges=frozenset(edges))
    except DomainError as exc:
        raise SchemaError("space_graph", str(exc)) from None

    sem_obj = _as_obj(data.get("semantics", {}), "semantics")
    semantics = SemanticMap(
        tuple(
            (k, _as_str(v, f"semantics.{k}")) for k, v in sorted(sem_obj.items())
        )
    )

    actions_obj = _as_obj(data.get("actions", {}), "actions")
    actions = tuple(
        (name, _parse_action(a, f"actions.{name}", nodes))
        for name, a in sorted(actions_obj.items())
    )
    processes_obj = _as_obj(data.get("processes", {}), "processes")
    processes = tuple(
        (name, _parse_process(p, f"processes.{name}", nodes))
        for name, p in sorted(processes_obj.items())
    )
    try:
        return Document(
            space_graph=graph, semantics=semantics, actions=actions, processes=processes
        )
    except DomainError as exc:
        raise SchemaError("$", str(exc)) from None


# --------------------------------------------------------------------------
# Document serialization
# --------------------------------------------------------------------------


def _time_json(coord: Optional[TemporalCoord]):
    if coord is None:
        return None
    if isinstance(coord, Point):
        return format_rational(coord.at)
    if isinstance(coord, Interval):
        return [format_rational(coord.begin), format_rational(coord.end)]
    return {"points": [format_rational(t) for t in coord.times]}


def _event_json(e: Event) -> dict[str, Any]:
    out: dict[str, Any] = {"name": e.name}
    if e.tag.time is not None:
        out["time"] = _time_json(e.tag.time)
    if e.tag.space is not None:
        out["space"] = e.tag.space
    if e.kind is not EventKind.GENERIC:
        out["kind"] = e.kind.value
    if e.carrier is not None:
        out["carrier"] = e.carrier
    if e.in_state is not None:
        out["in"] = e.in_state
    if e.out_state is not None:
        out["out"] = e.out_state
    if not e.observable:
        out["observable"] = False
    if e.category is not None:
        out["category"] = e.category.value
    return out


def _relations_json(relations) -> list[dict[str, Any]]:
    return [
        {"label": r.label, "pairs": sorted([a, b] for a, b in r.pairs)}
        for r in relations
    ]


def _constraints_json(constraints) -> list[dict[str, Any]]:
    return [
        {"pair": [c.pair[0], c.pair[1]], "mode": c.mode.value} for c in constraints
    ]


def _action_json(a: Action) -> dict[str, Any]:
    out: dict[str, Any] = {"events": {eid: _event_json(e) for eid, e in a.events}}
    if a.relations:
        out["relations"] = _relations_json(a.relations)
    if a.constraints:
        out["constraints"] = _constraints_json(a.constraints)
    if a.status is not Status.ACTUALIZED:
        out["status"] = a.status.value
    if a.shared_carriers:
        out["shared_carriers"] = sorted(a.shared_carriers)
    if a.actualized:
        out["actualized"] = sorted(a.actualized)
    return out


def _process_json(p: Process) -> dict[str, Any]:
    out: dict[str, Any] = {"actions": {aid: _action_json(a) for aid, a in p.actions}}
    if p.relations:
        out["relations"] = _relations_json(p.relations)
    if p.constraints:
        out["constraints"] = _constraints_json(p.constraints)
    if p.status is not Status.ACTUALIZED:
        out["status"] = p.status.value
    if p.actualized:
        out["actualized"] = sorted(p.actualized)
    return out


def document_json(d: Document) -> dict[str, Any]:
    return {
        "space_graph": {
            "nodes": sorted(d.space_graph.nodes),
            "edges": sorted([a, b] for a, b in d.space_graph.edges),
        },
        "semantics": {k: v for k, v in d.semantics.entries},
        "actions": {name: _action_json(a) for name, a in d.actions},
        "processes": {name: _process_json(p) for name, p in d.processes},
    }


def serialize_document(d: Document) -> str:
    """Canonical form: sorted keys, two-space indent, LF, trailing newline."""
    return json.dumps(document_json(d), indent=2, sort_keys=True) + "\n"
