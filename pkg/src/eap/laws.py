"""Law suites behind the check-laws command.

Three suites: the five classic operator identities under trace equivalence,
the union/meet lattice and complement laws (exhaustively over a small fixed
universe plus random sampling), and the measure closed forms against their
brute-force oracles.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .acp import check_axioms
from .actions import complement, free_compose, meet, mpar_cross, mpar_pairs, mpar_seq, mpar_seq_cross
from .core import form_action, subaction
from .errors import InvariantError
from .gen import random_action
from .model import Action, Event, Point, Tag
from .oracles import oracle_measures


@dataclass
class LawCheck:
    name: str
    cases: int
    failures: int
    counterexample: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class SuiteReport:
    suite: str
    checks: list[LawCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def run_acp_suite(seed: int, cases: int) -> SuiteReport:
    report = check_axioms(seed, cases)
    checks = [
        LawCheck(
            name=r.name,
            cases=r.cases,
            failures=r.failures,
            counterexample=None if r.counterexample is None else " vs ".join(r.counterexample),
        )
        for r in report.results
    ]
    return SuiteReport(suite="acp", checks=checks)


# --------------------------------------------------------------------------
# Lattice laws
# --------------------------------------------------------------------------


def _five_event_universe() -> Action:
    events = [
        (f"e{i}", Event(name, Tag(time=Point(Fraction(t)))))
        for i, (name, t) in enumerate(
            [("a", 1), ("b", 1), ("c", 2), ("d", 3), ("e", 3)]
        )
    ]
    return form_action(events)


def _all_subactions(universe: Action) -> list[Action]:
    ids = list(universe.ids)
    out = []
    for mask in range(1 << len(ids)):
        keep = [ids[i] for i in range(len(ids)) if mask >> i & 1]
        out.append(subaction(universe, keep))
    return out


def run_lattice_suite(
    seed: int,
    cases: int,
    sampled_pairs: int = 0,
    sampled_triples: int = 0,
) -> SuiteReport:
    """Exhaustive checks over the subsets of a five-event universe, plus
    random pairs/triples of larger relation-free actions."""
    rng = random.Random(seed)
    universe = _five_event_universe()
    subs = _all_subactions(universe)
    empty = subs[0]
    report = SuiteReport(suite="lattice")

    def check(name: str, count: int, fails: int, ce: Optional[str] = None) -> None:
        report.checks.append(LawCheck(name, count, fails, ce))

    def count_pair_failures(law: Callable[[Action, Action], bool]) -> tuple[int, int, Optional[str]]:
        total = fails = 0
        ce = None
        for a in subs:
            for b in subs:
                total += 1
                if not law(a, b):
                    fails += 1
                    ce = ce or f"|A|={len(a)}, |B|={len(b)}"
        return total, fails, ce

    total, fails, ce = count_pair_failures(
        lambda a, b: free_compose(a, b) == free_compose(b, a)
    )
    check("union-commutativity", total, fails, ce)
    total, fails, ce = count_pair_failures(lambda a, b: meet(a, b) == meet(b, a))
    check("meet-commutativity", total, fails, ce)
    total, fails, ce = count_pair_failures(
        lambda a, b: meet(a, free_compose(a, b)) == a
    )
    check("absorption-meet-union", total, fails, ce)
    total, fails, ce = count_pair_failures(
        lambda a, b: free_compose(a, meet(a, b)) == a
    )
    check("absorption-union-meet", total, fails, ce)

    idem_fails = sum(1 for a in subs if free_compose(a, a) != a or meet(a, a) != a)
    check("idempotency", len(subs), idem_fails)
    ident_fails = sum(
        1 for a in subs if free_compose(a, empty) != a or free_compose(empty, a) != a
    )
    check("union-identity", len(subs), ident_fails)

    assoc_fails = distrib_fails = 0
    triple_count = 0
    for a in subs:
        for b in subs:
            for c in subs:
                triple_count += 1
                if free_compose(free_compose(a, b), c) != free_compose(
                    a, free_compose(b, c)
                ):
                    assoc_fails += 1
                if meet(a, free_compose(b, c)) != free_compose(
                    meet(a, b), meet(a, c)
                ):
                    distrib_fails += 1
    check("union-associativity", triple_count, assoc_fails)
    check("meet-distributivity", triple_count, distrib_fails)

    comp_fails = 0
    for a in subs:
        ca = complement(a, universe)
        if free_compose(a, ca) != universe or meet(a, ca) != empty:
            comp_fails += 1
        if complement(ca, universe) != a:
            comp_fails += 1
        for b in subs:
            if complement(free_compose(a, b), universe) != meet(
                complement(a, universe), complement(b, universe)
            ):
                comp_fails += 1
    check("complement-laws", len(subs) * (len(subs) + 1), comp_fails)

    # id labels are bookkeeping, so the sampled laws compare extensionally
    from .model import action_key as key

    if sampled_pairs:
        fails = 0
        ce = None
        for _ in range(sampled_pairs):
            a = random_action(rng, rng.randint(0, 12))
            b = random_action(rng, rng.randint(0, 12))
            ok = (
                key(free_compose(a, b)) == key(free_compose(b, a))
                and key(meet(a, b)) == key(meet(b, a))
                and meet(a, free_compose(a, b)) == a
                and free_compose(a, meet(a, b)) == a
            )
            if not ok:
                fails += 1
                ce = ce or f"|A|={len(a)}, |B|={len(b)}"
        check("sampled-pair-laws", sampled_pairs, fails, ce)
    if sampled_triples:
        fails = 0
        for _ in range(sampled_triples):
            a = random_action(rng, rng.randint(0, 10))
            b = random_action(rng, rng.randint(0, 10))
            c = random_action(rng, rng.randint(0, 10))
            ok = key(free_compose(free_compose(a, b), c)) == key(
                free_compose(a, free_compose(b, c))
            ) and key(meet(a, free_compose(b, c))) == key(
                free_compose(meet(a, b), meet(a, c))
            )
            if not ok:
                fails += 1
        check("sampled-triple-laws", sampled_triples, fails)
    return report


# --------------------------------------------------------------------------
# Measures against the oracle
# --------------------------------------------------------------------------


def run_measures_suite(seed: int, cases: int) -> SuiteReport:
    rng = random.Random(seed)
    report = SuiteReport(suite="measures")
    mismatch = lemma_fails = welldef_fails = 0
    ce = None
    for i in range(cases):
        a = random_action(rng, rng.randint(1, 12), times=[Fraction(t) for t in range(6)])
        b = random_action(rng, rng.randint(1, 12), times=[Fraction(t) for t in range(6)])
        try:
            quad = oracle_measures(a, b)
        except InvariantError:
            welldef_fails += 1
            continue
        if (
            quad.pairs_left != mpar_pairs(a)
            or quad.pairs_cross != mpar_cross(a, b)
            or quad.seq_left != mpar_seq(a)
            or quad.seq_cross != mpar_seq_cross(a, b)
        ):
            mismatch += 1
            ce = ce or f"case {i}"
        if mpar_seq(a) > mpar_pairs(a) or mpar_seq_cross(a, b) > mpar_cross(a, b):
            lemma_fails += 1
    report.checks.append(LawCheck("oracle-agreement", cases, mismatch, ce))
    report.checks.append(LawCheck("measure-inequalities", cases, lemma_fails))
    report.checks.append(LawCheck("cross-measure-well-defined", cases, welldef_fails))
    return report
