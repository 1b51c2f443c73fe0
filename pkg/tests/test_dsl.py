"""Expression grammar, document schema, and round-trip guarantees."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest

from eap.acp import (
    Abstract,
    Atom,
    Choice,
    Comm,
    LeftMerge,
    Merge,
    RightMerge,
    Seq,
    random_expr,
)
from eap.dsl import (
    ParseError,
    SourceSpan,
    format_rational,
    parse_document,
    parse_expr,
    parse_rational,
    serialize_document,
    serialize_expr,
)
from eap.errors import DomainError, ReservedNameError, SchemaError
from eap.gen import random_document


class TestRational:
    def test_parse(self):
        assert parse_rational("3/2") == Fraction(3, 2)
        assert parse_rational("2") == Fraction(2)
        assert parse_rational("-7/4") == Fraction(-7, 4)

    def test_format(self):
        assert format_rational(Fraction(3, 2)) == "3/2"
        assert format_rational(Fraction(2)) == "2"

    def test_rejects_floats_and_junk(self):
        for bad in ("1.5", "1e3", "3/0", "3/-2", "", "a"):
            with pytest.raises(DomainError):
                parse_rational(bad)


class TestExprGrammar:
    def test_merge_of_seqs(self):
        assert parse_expr("(P.Q) || (R.V)") == Merge(
            Seq(Atom("P"), Atom("Q")), Seq(Atom("R"), Atom("V"))
        )

    def test_dot_binds_tighter_than_plus(self):
        assert parse_expr("a + b . c") == Choice(Atom("a"), Seq(Atom("b"), Atom("c")))

    def test_abstraction(self):
        assert parse_expr("tau{c}((a+b).c)") == Abstract(
            frozenset({"c"}), Seq(Choice(Atom("a"), Atom("b")), Atom("c"))
        )

    def test_comm_binds_tighter_than_merge(self):
        assert parse_expr("a | b || c") == Merge(Comm(Atom("a"), Atom("b")), Atom("c"))

    def test_left_assoc(self):
        assert parse_expr("a + b + c") == Choice(Choice(Atom("a"), Atom("b")), Atom("c"))
        assert parse_expr("a . b . c") == Seq(Seq(Atom("a"), Atom("b")), Atom("c"))

    def test_merge_variants(self):
        assert parse_expr("a |L b") == LeftMerge(Atom("a"), Atom("b"))
        assert parse_expr("a |R b") == RightMerge(Atom("a"), Atom("b"))
        assert parse_expr("a || b") == Merge(Atom("a"), Atom("b"))

    def test_atom_states(self):
        assert parse_expr("a[s0->s1]") == Atom("a", "s0", "s1")

    def test_multi_name_hide(self):
        assert parse_expr("tau{a,b}(a.b.c)") == Abstract(
            frozenset({"a", "b"}), Seq(Seq(Atom("a"), Atom("b")), Atom("c"))
        )

    def test_reserved_tau_atom(self):
        with pytest.raises(ReservedNameError):
            parse_expr("tau + a")

    def test_error_span_within_input(self):
        text = "a + + b"
        with pytest.raises(ParseError) as err:
            parse_expr(text)
        span = err.value.span
        assert 0 <= span.start <= span.end <= len(text)
        assert span.line == 1 and span.column == 5

    def test_error_reports_expected(self):
        with pytest.raises(ParseError) as err:
            parse_expr("(a + b")
        assert "RPAREN" in err.value.expected

    def test_unexpected_character(self):
        with pytest.raises(ParseError):
            parse_expr("a ? b")

    def test_error_spans_within_input_fuzz(self, rng):
        alphabet = "ab+.|()[]{}->, \nxyz?"
        for _ in range(500):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 14)))
            try:
                parse_expr(text)
            except ParseError as err:
                span = err.span
                assert 0 <= span.start <= span.end <= len(text)
            except Exception:
                pass  # reserved-name errors carry no span

    def test_span_invariant(self):
        with pytest.raises(DomainError):
            SourceSpan(5, 3, 1, 1)


class TestExprRoundTrip:
    def test_canonical_examples(self):
        for text, canon in [
            ("(P.Q)||(R.V)", "(P . Q) || (R . V)"),
            ("a+b.c", "a + b . c"),
            ("tau{c}((a+b).c)", "tau{c}((a + b) . c)"),
            ("(a+b)+c", "a + b + c"),
            ("a+(b+c)", "a + (b + c)"),
        ]:
            assert serialize_expr(parse_expr(text)) == canon

    def test_parse_of_serialize_is_identity(self, rng):
        for _ in range(1000):
            x = random_expr(rng, 4)
            assert parse_expr(serialize_expr(x)) == x

    def test_serializer_idempotent_on_canonical_text(self, rng):
        for _ in range(300):
            x = random_expr(rng, 4)
            text = serialize_expr(x)
            assert serialize_expr(parse_expr(text)) == text

    def test_atoms_with_states_round_trip(self):
        x = Comm(Atom("a", "s0", "s1"), Atom("b", "s1", "s2"))
        assert parse_expr(serialize_expr(x)) == x


class TestDocumentFormat:
    def test_round_trip_random(self, rng):
        for _ in range(400):
            doc = random_document(rng)
            assert parse_document(serialize_document(doc)) == doc

    def test_canonical_rationals(self, rng):
        doc = random_document(rng)
        text = serialize_document(doc)
        data = json.loads(text)

        def no_floats(node):
            assert not isinstance(node, float)
            if isinstance(node, dict):
                for v in node.values():
                    no_floats(v)
            if isinstance(node, list):
                for v in node:
                    no_floats(v)

        no_floats(data)

    def test_time_forms(self):
        text = json.dumps(
            {
                "actions": {
                    "A": {
                        "events": {
                            "p": {"name": "a", "time": "3/2"},
                            "q": {"name": "b", "time": ["0", "2"]},
                            "r": {"name": "c", "time": {"points": ["1", "2"]}},
                        }
                    }
                }
            }
        )
        doc = parse_document(text)
        out = serialize_document(doc)
        assert '"3/2"' in out and '["0", "2"]' not in out  # canonical json spacing
        assert parse_document(out) == doc

    def test_bad_interval_names_path(self):
        text = json.dumps(
            {"actions": {"A": {"events": {"e1": {"name": "a", "time": ["2", "1"]}}}}}
        )
        with pytest.raises(SchemaError) as err:
            parse_document(text)
        assert "actions.A" in err.value.path

    def test_undeclared_space_node(self):
        text = json.dumps(
            {"actions": {"A": {"events": {"e1": {"name": "a", "space": "n9"}}}}}
        )
        with pytest.raises(SchemaError) as err:
            parse_document(text)
        assert err.value.path.endswith("space")

    def test_unknown_kind_mode_status(self):
        for obj, fragment in [
            ({"actions": {"A": {"events": {"e": {"name": "a", "kind": "zap"}}}}}, "kind"),
            ({"actions": {"A": {"events": {}, "status": "zap"}}}, "status"),
            (
                {
                    "actions": {
                        "A": {
                            "events": {"e": {"name": "a"}},
                            "constraints": [{"pair": ["e", "e"], "mode": "zap"}],
                        }
                    }
                },
                "mode",
            ),
        ]:
            with pytest.raises(SchemaError) as err:
                parse_document(json.dumps(obj))
            assert fragment in err.value.path

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            parse_document("{not json")

    def test_crlf_accepted_lf_emitted(self, rng):
        doc = random_document(rng)
        text = serialize_document(doc)
        assert "\r" not in text and text.endswith("\n")
        assert parse_document(text.replace("\n", "\r\n")) == doc

    def test_emerging_partition_round_trips(self):
        text = json.dumps(
            {
                "actions": {
                    "A": {
                        "events": {
                            "e1": {"name": "a", "time": "1"},
                            "e2": {"name": "b", "time": "5"},
                        },
                        "status": "emerging",
                        "actualized": ["e1"],
                    }
                }
            }
        )
        doc = parse_document(text)
        assert parse_document(serialize_document(doc)) == doc

    def test_emerging_precedence_schema_error(self):
        text = json.dumps(
            {
                "actions": {
                    "A": {
                        "events": {
                            "e1": {"name": "a", "time": "5"},
                            "e2": {"name": "b", "time": "1"},
                        },
                        "status": "emerging",
                        "actualized": ["e1"],
                    }
                }
            }
        )
        with pytest.raises(SchemaError):
            parse_document(text)
