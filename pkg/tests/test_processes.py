"""Process compositions, projections, transforms, and observable traces."""

from __future__ import annotations

from fractions import Fraction

import pytest

from eap.actions import Pairing, free_seq
from eap.core import classify_process, form_action, form_process, subprocess
from eap.errors import (
    AmbiguousTraceError,
    CoverageError,
    InvalidParameterError,
    LinkError,
)
from eap.events import RenamingMap, Translate
from eap.gen import random_action, random_process
from eap.model import EMPTY_PROCESS, Status, process_key
from eap.processes import (
    ActionPairing,
    free_compose_p,
    meet_p,
    mixed_seq_p,
    mpar_pairs_p,
    mpar_seq_p,
    observable_trace,
    process_coordinated,
    process_sequential,
    process_without_repetition,
    project_p,
    strong_seq_p,
    temporal_compose_p,
    transform_p,
)

from conftest import ev


def seq_process(rng, n_actions=2, per=3, start=0):
    """Process whose event occurrences all have distinct times."""
    actions = []
    t = start
    for i in range(n_actions):
        size = rng.randint(1, per)
        actions.append(
            form_action([ev(f"x{t + k}", t + k) for k in range(size)])
        )
        t += size
    return form_process(actions)


class TestFreeComposeMeet:
    def test_idempotent(self, rng):
        for _ in range(50):
            p = random_process(rng, rng.randint(0, 3))
            assert process_key(free_compose_p(p, p)) == process_key(p)
            assert meet_p(p, p) == p

    def test_identity(self, rng):
        p = random_process(rng, 2)
        assert free_compose_p(p, EMPTY_PROCESS) == p
        assert free_compose_p(EMPTY_PROCESS, p) == p

    def test_absorption(self, rng):
        for _ in range(100):
            p = random_process(rng, rng.randint(0, 3))
            q = random_process(rng, rng.randint(0, 3))
            assert meet_p(p, free_compose_p(p, q)) == p
            assert process_key(free_compose_p(p, meet_p(p, q))) == process_key(p)

    def test_union_of_distinct(self):
        p = form_process([form_action([ev("a", 1)])])
        q = form_process([form_action([ev("b", 2)])])
        out = free_compose_p(p, q)
        assert len(out) == 2


class TestTemporalCompose:
    def test_seq_delta_policy(self):
        p1 = form_process([form_action([ev("a", 1), ev("b", 2)])])
        p2 = form_process([form_action([ev("c", 1)])])
        out = temporal_compose_p(p1, p2, "seq")
        assert sorted(out.times()) == [Fraction(1), Fraction(2), Fraction(3)]

    def test_seq_preserves_sequential(self, rng):
        for _ in range(100):
            p = seq_process(rng)
            q = seq_process(rng)
            assert process_sequential(temporal_compose_p(p, q, "seq"))

    def test_interleave_preserves_sequential(self, rng):
        for _ in range(100):
            p = seq_process(rng)
            q = seq_process(rng, start=rng.randint(0, 3))
            assert process_sequential(temporal_compose_p(p, q, "interleave"))

    def test_parallel_needs_non_empty(self):
        with pytest.raises(InvalidParameterError):
            temporal_compose_p(EMPTY_PROCESS, EMPTY_PROCESS, "parallel")

    def test_parallel_measure_inequalities(self, rng):
        for _ in range(200):
            p = form_process(
                [random_action(rng, rng.randint(1, 4), names="abcdefg")]
            )
            q = form_process(
                [random_action(rng, rng.randint(1, 4), names="hijklmn")]
            )
            out = temporal_compose_p(p, q, "parallel")
            assert mpar_pairs_p(out) > max(mpar_pairs_p(p), mpar_pairs_p(q))
            assert mpar_seq_p(out) >= mpar_seq_p(p) + mpar_seq_p(q)

    def test_level_consistency_with_action_seq(self, rng):
        for _ in range(100):
            a = random_action(rng, rng.randint(1, 5))
            b = random_action(rng, rng.randint(1, 5))
            p_out = temporal_compose_p(
                form_process([a]), form_process([b]), "seq"
            )
            a_out = free_seq(a, b)
            got = sorted((e.name, e.times()) for _, _, e in p_out.events())
            want = sorted((e.name, e.times()) for _, e in a_out.events)
            assert got == want

    def test_unknown_kind(self):
        with pytest.raises(InvalidParameterError):
            temporal_compose_p(EMPTY_PROCESS, EMPTY_PROCESS, "sideways")


class TestProjectTransform:
    def test_project_all_values_identity(self, rng):
        p = random_process(rng, 2)
        names = {e.name for _, _, e in p.events()}
        assert project_p(p, "values", names) == p

    def test_projection_drops_emptied_actions(self):
        p = form_process(
            [form_action([ev("a", 1)]), form_action([ev("b", 2)])]
        )
        out = project_p(p, "values", {"a"})
        assert len(out) == 1

    def test_projection_is_subprocess_when_actions_survive(self, rng):
        for _ in range(100):
            p = seq_process(rng)
            names = {e.name for _, _, e in p.events()}
            keep = {n for n in names if rng.random() < 0.7}
            out = project_p(p, "values", keep)
            surviving = [aid for aid, a in out.actions]
            base = subprocess(p, surviving)
            # every projected action is a subaction of the original
            for aid, a in out.actions:
                orig = base.action_map[aid]
                assert {e.name for _, e in a.events} <= {
                    e.name for _, e in orig.events
                }

    def test_strictly_sequential_preserved_by_projection(self, rng):
        for _ in range(100):
            p = seq_process(rng)
            if "strictly-sequential" not in classify_process(p):
                continue
            names = {e.name for _, _, e in p.events()}
            keep = {n for n in names if rng.random() < 0.7}
            out = project_p(p, "values", keep)
            assert "strictly-sequential" in classify_process(out)

    def test_shift_identity(self, rng):
        p = random_process(rng, 2)
        assert transform_p(p, "shift", Translate(0)) == p

    def test_uniform_shift_preserves_predicates(self, rng):
        for _ in range(100):
            p = seq_process(rng)
            out = transform_p(p, "shift", Translate(Fraction(rng.randint(-4, 9), 2)))
            assert process_sequential(out)
            assert process_coordinated(out) == process_coordinated(p)

    def test_rename_preserves_sequential(self, rng):
        rn = RenamingMap(
            {f"x{i}": f"y{i % 3}" for i in range(40)}
        )
        for _ in range(100):
            p = seq_process(rng)
            assert process_sequential(transform_p(p, "rename", rn))

    def test_injective_rename_preserves_without_repetition(self, rng):
        rn = RenamingMap({f"x{i}": f"z{i}" for i in range(40)}, injective=True)
        for _ in range(100):
            p = seq_process(rng)
            if not process_without_repetition(p):
                continue
            assert process_without_repetition(transform_p(p, "rename", rn))


class TestLinkedProcesses:
    def one_action(self, name, t, s_in, s_out, aid="a0"):
        return form_process(
            [(aid, form_action([("e", ev(name, t, in_state=s_in, out_state=s_out))]))]
        )

    def test_single_action_delegates(self):
        p1 = self.one_action("a", 1, "s0", "s1")
        p2 = self.one_action("b", 1, "s1", "s2")
        out = strong_seq_p(p1, p2, ActionPairing((("a0", "a0", Pairing((("e", "e"),))),)))
        assert len(out) == 1
        ((_, action),) = out.actions
        ((_, fused),) = action.events
        assert fused.name == "a;b" and fused.in_state == "s0" and fused.out_state == "s2"

    def test_mixed_empty_pairing_is_temporal_seq(self, rng):
        for _ in range(50):
            p = random_process(rng, rng.randint(0, 3))
            q = random_process(rng, rng.randint(0, 3))
            assert mixed_seq_p(p, q, ActionPairing(())) == temporal_compose_p(
                p, q, "seq"
            )

    def test_state_mismatch_propagates(self):
        p1 = self.one_action("a", 1, "s0", "s1")
        p2 = self.one_action("b", 1, "s9", "s2")
        with pytest.raises(LinkError):
            strong_seq_p(p1, p2, ActionPairing((("a0", "a0", Pairing((("e", "e"),))),)))

    def test_strong_requires_cover(self):
        p1 = free_compose_p(
            self.one_action("a", 1, "s0", "s1"),
            self.one_action("c", 2, "s0", "s1", aid="a1"),
        )
        p2 = self.one_action("b", 1, "s1", "s2")
        with pytest.raises(CoverageError):
            strong_seq_p(p1, p2, ActionPairing((("a0", "a0", Pairing((("e", "e"),))),)))


class TestObservableTrace:
    def test_hidden_events_removed(self):
        p = form_process(
            [
                form_action([ev("a", 1)]),
                form_action([ev("h", 2, observable=False)]),
                form_action([ev("b", 3)]),
            ]
        )
        assert observable_trace(p) == ("a", "b")

    def test_all_hidden(self):
        p = form_process([form_action([ev("h", 1, observable=False)])])
        assert observable_trace(p) == ()

    def test_collision_is_ambiguous(self):
        p = form_process([form_action([ev("a", 1)]), form_action([ev("b", 1)])])
        with pytest.raises(AmbiguousTraceError):
            observable_trace(p)

    def test_silent_name_removed(self):
        p = form_process([form_action([ev("tau", 1)]), form_action([ev("b", 2)])])
        assert observable_trace(p) == ("b",)

    def test_requires_actualized(self):
        p = form_process([form_action([ev("a", 1)])], status=Status.POTENTIAL)
        with pytest.raises(InvalidParameterError):
            observable_trace(p)
