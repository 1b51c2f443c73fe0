"""Command-line interface.

Subcommands: ``parse`` (validate a document), ``compose`` (apply a binary
composition to two named objects), ``measure`` (parallelism measures),
``traces`` (trace enumeration for an expression or a stored process),
``check-laws`` (law suites), and ``dot`` (graph export).

Exit status: 0 success, 1 domain error, 2 usage error, 3 capacity error.
Diagnostics go to stderr; output is deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from . import acp
from .actions import (
    Pairing,
    free_compose,
    free_interleave,
    free_parallel,
    free_seq,
    meet,
    mixed_seq_actions,
    mpar_cross,
    mpar_pairs,
    mpar_seq,
    mpar_seq_cross,
    strong_seq_actions,
)
from .core import realizations
from .dsl import (
    parse_document,
    parse_expr,
    parse_rational,
    serialize_document,
)
from .errors import CapacityError, DomainError
from .laws import run_acp_suite, run_lattice_suite, run_measures_suite
from .model import (
    Action,
    Document,
    EXCLUSION_MODES,
    Event,
    Interval,
    Point,
    SemanticMap,
    SpaceGraph,
    Status,
)
from .processes import (
    ActionPairing,
    free_compose_p,
    meet_p,
    mixed_seq_p,
    observable_trace,
    strong_seq_p,
    temporal_compose_p,
)

USAGE_ERROR = 2


class UsageError(Exception):
    pass


def _load_document(path: str) -> Document:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return parse_document(handle.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_ref(ref: str, level: str):
    if "#" not in ref:
        raise UsageError(f"reference {ref!r} must look like file#name")
    path, name = ref.rsplit("#", 1)
    doc = _load_document(path)
    table = doc.action_map if level == "action" else doc.process_map
    if name not in table:
        raise DomainError(f"{path} has no {level} named {name!r}")
    return doc, table[name]


def _merge_documents(d1: Document, d2: Document) -> tuple[SpaceGraph, SemanticMap]:
    nodes = d1.space_graph.nodes | d2.space_graph.nodes
    edges = d1.space_graph.edges | d2.space_graph.edges
    sem = dict(d1.semantics.entries)
    for name, value in d2.semantics.entries:
        if sem.get(name, value) != value:
            raise DomainError(f"conflicting semantics for name {name!r}")
        sem[name] = value
    return SpaceGraph(nodes, edges), SemanticMap(tuple(sorted(sem.items())))


def _load_action_pairing(path: str) -> Pairing:
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    return Pairing(tuple((a, b) for a, b in data))


def _load_process_pairing(path: str) -> ActionPairing:
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    return ActionPairing(
        tuple(
            (
                entry["left"],
                entry["right"],
                Pairing(tuple((a, b) for a, b in entry.get("events", []))),
            )
            for entry in data
        )
    )


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_parse(args) -> int:
    doc = _load_document(args.path)
    n_events = sum(len(a) for _, a in doc.actions) + sum(
        len(a) for _, p in doc.processes for _, a in p.actions
    )
    print(f"ok: {len(doc.actions)} actions, {len(doc.processes)} processes, "
          f"{n_events} events")
    return 0


_ACTION_OPS = {
    "free": lambda a, b, gap, pairing: free_compose(a, b),
    "meet": lambda a, b, gap, pairing: meet(a, b),
    "seq": lambda a, b, gap, pairing: free_seq(a, b, gap),
    "interleave": lambda a, b, gap, pairing: free_interleave(a, b),
    "parallel": lambda a, b, gap, pairing: free_parallel(a, b),
    "strong": lambda a, b, gap, pairing: strong_seq_actions(a, b, pairing, gap),
    "mixed": lambda a, b, gap, pairing: mixed_seq_actions(a, b, pairing, gap),
}

_PROCESS_OPS = {
    "free": lambda a, b, gap, pairing: free_compose_p(a, b),
    "meet": lambda a, b, gap, pairing: meet_p(a, b),
    "seq": lambda a, b, gap, pairing: temporal_compose_p(a, b, "seq", gap),
    "interleave": lambda a, b, gap, pairing: temporal_compose_p(a, b, "interleave", gap),
    "parallel": lambda a, b, gap, pairing: temporal_compose_p(a, b, "parallel", gap),
    "strong": lambda a, b, gap, pairing: strong_seq_p(a, b, pairing, gap),
    "mixed": lambda a, b, gap, pairing: mixed_seq_p(a, b, pairing, gap),
}


def cmd_compose(args) -> int:
    gap = parse_rational(args.gap)
    doc_a, left = _load_ref(args.left, args.level)
    doc_b, right = _load_ref(args.right, args.level)
    pairing = None
    if args.op in ("strong", "mixed"):
        if args.pairing is None:
            pairing = (
                Pairing(()) if args.level == "action" else ActionPairing(())
            )
        elif args.level == "action":
            pairing = _load_action_pairing(args.pairing)
        else:
            pairing = _load_process_pairing(args.pairing)
    ops = _ACTION_OPS if args.level == "action" else _PROCESS_OPS
    result = ops[args.op](left, right, gap, pairing)
    graph, semantics = _merge_documents(doc_a, doc_b)
    if args.level == "action":
        out = Document(space_graph=graph, semantics=semantics,
                       actions={"result": result})
    else:
        out = Document(space_graph=graph, semantics=semantics,
                       processes={"result": result})
    sys.stdout.write(serialize_document(out))
    return 0


def cmd_measure(args) -> int:
    _, a = _load_ref(args.left, "action")
    rows: list[tuple[str, str]]
    if args.right is None:
        seq = mpar_seq(a)
        rows = [
            ("|A|", str(len(a))),
            ("m^par(A)", str(mpar_pairs(a))),
            ("m_par(A)", str(seq)),
            ("k-max(A)", str(Fraction(seq, len(a))) if len(a) else "undefined"),
        ]
    else:
        _, b = _load_ref(args.right, "action")
        seq_cross = mpar_seq_cross(a, b)
        low = min(len(a), len(b))
        rows = [
            ("|A|", str(len(a))),
            ("|B|", str(len(b))),
            ("m^par(A,B)", str(mpar_cross(a, b))),
            ("m_par(A,B)", str(seq_cross)),
            ("k-max(A,B)", str(Fraction(seq_cross, low)) if low else "undefined"),
        ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name.ljust(width)}  {value}")
    return 0


def _trace_lines(trace_set) -> list[str]:
    return sorted("".join(trace) for trace in trace_set)


def cmd_traces(args) -> int:
    target = args.target
    if "#" in target:
        _, process = _load_ref(target, "process")
        if process.status is Status.ACTUALIZED:
            found = {observable_trace(process)}
        else:
            found = {
                observable_trace(r) for r in realizations(process, bound=args.bound)
            }
        lines = _trace_lines(found)
    else:
        text = target
        if target.endswith(".acp"):
            try:
                with open(target, "r", encoding="utf-8") as handle:
                    text = handle.read()
            except OSError as exc:
                raise UsageError(f"cannot read {target}: {exc}") from None
        lines = _trace_lines(acp.traces(parse_expr(text)))
    for line in lines:
        print(line)
    return 0


def cmd_check_laws(args) -> int:
    reports = []
    if args.suite in ("acp", "all"):
        reports.append(run_acp_suite(args.seed, args.cases))
    if args.suite in ("lattice", "all"):
        reports.append(
            run_lattice_suite(
                args.seed, args.cases, sampled_pairs=args.cases, sampled_triples=args.cases
            )
        )
    if args.suite in ("measures", "all"):
        reports.append(run_measures_suite(args.seed, args.cases))
    failed = False
    for report in reports:
        for check in report.checks:
            if check.passed:
                print(f"ok   {report.suite}/{check.name} cases={check.cases}")
            else:
                failed = True
                detail = f" first={check.counterexample}" if check.counterexample else ""
                print(
                    f"FAIL {report.suite}/{check.name} "
                    f"failures={check.failures}/{check.cases}{detail}"
                )
    return 1 if failed else 0


def _dot_label(e: Event) -> str:
    coord = e.tag.time
    if isinstance(coord, Point):
        return f"{e.name}@{coord.at}"
    if isinstance(coord, Interval):
        return f"{e.name}@[{coord.begin},{coord.end}]"
    if coord is None:
        return e.name
    return f"{e.name}@({','.join(str(t) for t in coord.times)})"


def _emit_action_dot(lines: list[str], a: Action, node_id, indent: str) -> None:
    for eid, e in a.events:
        lines.append(f'{indent}{node_id(eid)} [label="{_dot_label(e)}"];')
    for r in a.relations:
        for x, y in sorted(r.pairs):
            lines.append(
                f'{indent}{node_id(x)} -> {node_id(y)} [label="{r.label}"];'
            )
    for c in a.constraints:
        if c.mode in EXCLUSION_MODES:
            lines.append(
                f"{indent}{node_id(c.pair[0])} -> {node_id(c.pair[1])} "
                f'[style=dashed, label="{c.mode.value}"];'
            )


def cmd_dot(args) -> int:
    ref = args.ref
    path, name = (ref.rsplit("#", 1) + [""])[:2] if "#" in ref else (ref, "")
    doc = _load_document(path)
    lines = ["digraph {"]
    if name in doc.action_map:
        a = doc.action_map[name]
        _emit_action_dot(lines, a, lambda eid: f'"{eid}"', "  ")
    elif name in doc.process_map:
        p = doc.process_map[name]
        lines[0] = "digraph {"
        lines.append("  compound=true;")
        first_node: dict[str, str] = {}
        for aid, a in p.actions:
            lines.append(f'  subgraph "cluster_{aid}" {{')
            lines.append(f'    label="{aid}";')
            _emit_action_dot(lines, a, lambda eid, aid=aid: f'"{aid}.{eid}"', "    ")
            if a.events:
                first_node[aid] = f"{aid}.{a.events[0][0]}"
            lines.append("  }")
        def anchor(aid: str) -> str:
            return f'"{first_node[aid]}"' if aid in first_node else f'"{aid}"'
        for r in p.relations:
            for x, y in sorted(r.pairs):
                lines.append(
                    f"  {anchor(x)} -> {anchor(y)} "
                    f'[label="{r.label}", ltail="cluster_{x}", lhead="cluster_{y}"];'
                )
        for c in p.constraints:
            if c.mode in EXCLUSION_MODES:
                lines.append(
                    f"  {anchor(c.pair[0])} -> {anchor(c.pair[1])} "
                    f'[style=dashed, label="{c.mode.value}", '
                    f'ltail="cluster_{c.pair[0]}", lhead="cluster_{c.pair[1]}"];'
                )
    else:
        raise DomainError(f"{path} has no action or process named {name!r}")
    lines.append("}")
    print("\n".join(lines))
    return 0


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eap",
        description="Compose and measure events, actions, and processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate a document")
    p.add_argument("path")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compose", help="compose two named objects")
    p.add_argument("--op", required=True, choices=sorted(_ACTION_OPS))
    p.add_argument("--level", required=True, choices=["action", "process"])
    p.add_argument("--gap", default="1")
    p.add_argument("--pairing", help="JSON pairing file for strong/mixed")
    p.add_argument("left", metavar="A-ref")
    p.add_argument("right", metavar="B-ref")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("measure", help="parallelism measures")
    p.add_argument("left", metavar="A-ref")
    p.add_argument("right", metavar="B-ref", nargs="?")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("traces", help="enumerate traces")
    p.add_argument("target", metavar="expr-or-ref")
    p.add_argument("--bound", type=int, default=64,
                   help="realization bound for stored processes")
    p.set_defaults(func=cmd_traces)

    p = sub.add_parser("check-laws", help="run law suites")
    p.add_argument("--suite", required=True,
                   choices=["acp", "lattice", "measures", "all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.set_defaults(func=cmd_check_laws)

    p = sub.add_parser("dot", help="export a DOT digraph")
    p.add_argument("ref")
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
