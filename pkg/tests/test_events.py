"""Event-level compositions, shifts, renamings, and metrics."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eap.core import parallel
from eap.errors import (
    InvariantError,
    LinkError,
    OrderingError,
    ShiftMismatchError,
    UndefinedCompositionError,
    UndefinedRenamingError,
    UndefinedShiftError,
)
from eap.events import (
    ConcatNames,
    LeftName,
    NameTable,
    RenamingMap,
    RightName,
    TagTable,
    Translate,
    default_tag_metric,
    discrete_name_metric,
    distance,
    m_compose,
    rename_event,
    shift_event,
    shifted_m_compose,
    strong_seq_events,
)
from eap.model import Event, Point, Tag

from conftest import ev

times = st.fractions(min_value=-8, max_value=8, max_denominator=4)
names = st.sampled_from("abcdefgh")


def point_events(shared_time=None):
    time = st.just(shared_time) if shared_time is not None else times
    return st.builds(lambda n, t: ev(n, t), names, time)


class TestMCompose:
    def test_concat(self):
        out = m_compose(ev("a", 5), ev("b", 5), ConcatNames())
        assert out.name == "ab" and out.time_point() == 5

    def test_left_projection(self):
        assert m_compose(ev("a", 5), ev("b", 5), LeftName()).name == "a"

    def test_right_projection(self):
        assert m_compose(ev("a", 5), ev("b", 5), RightName()).name == "b"

    def test_requires_parallel(self):
        with pytest.raises(OrderingError):
            m_compose(ev("a", 1), ev("b", 2), ConcatNames())

    def test_table_miss(self):
        rule = NameTable({("a", "b"): "ab"})
        assert m_compose(ev("a", 1), ev("b", 1), rule).name == "ab"
        with pytest.raises(UndefinedCompositionError):
            m_compose(ev("b", 1), ev("a", 1), rule)

    @given(times, names, names)
    def test_result_parallel_to_both(self, t, n1, n2):
        e1, e2 = ev(n1, t), ev(n2, t)
        out = m_compose(e1, e2, ConcatNames("-"))
        assert parallel(out, e1) and parallel(out, e2)

    @given(times, times, names, names, names, names)
    def test_compositions_of_parallel_quadruple_parallel(self, t, _t2, a, b, c, d):
        e1, e2, e3, e4 = (ev(n, t) for n in (a, b, c, d))
        assert parallel(
            m_compose(e1, e2, ConcatNames()), m_compose(e3, e4, ConcatNames())
        )


class TestShift:
    def test_translate(self):
        assert shift_event(ev("a", 2), Translate(3)).time_point() == 5

    def test_identity_translate(self):
        e = ev("a", 2, space="n1", kind="emission")
        assert shift_event(e, Translate(0)) == e

    def test_only_tag_changes(self):
        e = Event("a", Tag(time=Point(Fraction(1))), in_state="s", observable=False)
        out = shift_event(e, Translate(1))
        assert out.in_state == "s" and not out.observable

    def test_table_shift(self):
        table = TagTable({Tag(time=Point(Fraction(1))): Tag(time=Point(Fraction(9)))})
        assert shift_event(ev("a", 1), table).time_point() == 9
        with pytest.raises(UndefinedShiftError):
            shift_event(ev("a", 2), table)

    @given(times, times, names, names)
    def test_translate_preserves_parallelism(self, t, delta, n1, n2):
        e1, e2 = ev(n1, t), ev(n2, t)
        sft = Translate(delta)
        assert parallel(shift_event(e1, sft), shift_event(e2, sft))


class TestShiftedCompose:
    def test_formula(self):
        out = shifted_m_compose(ev("a", 1), ev("b", 4), ConcatNames(), Translate(3))
        assert out.name == "ab" and out.time_point() == 4

    def test_mismatched_shift(self):
        with pytest.raises(ShiftMismatchError):
            shifted_m_compose(ev("a", 1), ev("b", 4), ConcatNames(), Translate(1))

    @given(times, times, names, names)
    def test_result_parallel_to_second(self, t1, t2, n1, n2):
        e1, e2 = ev(n1, t1), ev(n2, t2)
        out = shifted_m_compose(e1, e2, ConcatNames(), Translate(t2 - t1))
        assert parallel(out, e2)

    @given(times, times, times, names, names, names, names)
    def test_respects_parallel_seconds(self, t1, t3, t2, a, b, c, d):
        e1, e2, e3, e4 = ev(a, t1), ev(b, t2), ev(c, t3), ev(d, t2)
        out1 = shifted_m_compose(e1, e2, ConcatNames(), Translate(t2 - t1))
        out2 = shifted_m_compose(e3, e4, ConcatNames(), Translate(t2 - t3))
        assert parallel(out1, out2)


class TestRename:
    def test_basic(self):
        assert rename_event(ev("a", 1), RenamingMap({"a": "x"})).name == "x"

    def test_identity_map(self):
        e = ev("a", 1)
        assert rename_event(e, RenamingMap({"a": "a"})) == e

    def test_missing_key(self):
        with pytest.raises(UndefinedRenamingError):
            rename_event(ev("z", 1), RenamingMap({"a": "x"}))

    def test_injective_flag_validated(self):
        with pytest.raises(InvariantError):
            RenamingMap({"a": "x", "b": "x"}, injective=True)
        RenamingMap({"a": "x", "b": "y"}, injective=True)

    @given(times, names, names)
    def test_preserves_parallelism(self, t, n1, n2):
        rn = RenamingMap({c: c.upper() for c in "abcdefgh"})
        e1, e2 = ev(n1, t), ev(n2, t)
        assert parallel(rename_event(e1, rn), rename_event(e2, rn))


class TestStrongSeq:
    def test_link(self):
        e1 = ev("a", 1, in_state="s0", out_state="s1")
        e2 = ev("b", 2, in_state="s1", out_state="s2")
        out = strong_seq_events(e1, e2)
        assert out.name == "a;b"
        assert out.in_state == "s0" and out.out_state == "s2"
        assert out.time_point() == 2

    def test_state_mismatch(self):
        e1 = ev("a", 1, in_state="s0", out_state="s1")
        e2 = ev("b", 2, in_state="s9", out_state="s2")
        with pytest.raises(LinkError):
            strong_seq_events(e1, e2)

    def test_time_order_violated(self):
        e1 = ev("a", 3, in_state="s0", out_state="s1")
        e2 = ev("b", 2, in_state="s1", out_state="s2")
        with pytest.raises(OrderingError):
            strong_seq_events(e1, e2)

    def test_states_required(self):
        with pytest.raises(LinkError):
            strong_seq_events(ev("a", 1), ev("b", 2))


class TestDistance:
    def test_three_four_five(self):
        dn = lambda a, b: Fraction(3)
        dt = lambda t1, t2: Fraction(4)
        assert distance(ev("a", 0), ev("b", 1), "euclidean", dn, dt) == 5
        assert distance(ev("a", 0), ev("b", 1), "shannon", dn, dt) == 7

    def test_identity(self):
        e = ev("a", 1)
        assert distance(e, e, "euclidean") == 0
        assert distance(e, e, "shannon") == 0

    def test_default_metrics(self):
        assert discrete_name_metric("a", "a") == 0
        assert discrete_name_metric("a", "b") == 1
        d = default_tag_metric(Tag(time=Point(Fraction(1)), space="n0"),
                               Tag(time=Point(Fraction(3)), space="n1"))
        assert d == 3

    @given(point_events(), point_events(), point_events())
    @settings(max_examples=300)
    def test_metric_laws(self, e1, e2, e3):
        for mode in ("euclidean", "shannon"):
            d12 = distance(e1, e2, mode)
            d21 = distance(e2, e1, mode)
            assert math.isclose(float(d12), float(d21), abs_tol=1e-12)
            d13 = distance(e1, e3, mode)
            d23 = distance(e2, e3, mode)
            assert float(d13) <= float(d12) + float(d23) + 1e-9
        if e1.name == e2.name and e1.tag == e2.tag:
            assert distance(e1, e2, "euclidean") == 0
        else:
            assert float(distance(e1, e2, "euclidean")) > 0
