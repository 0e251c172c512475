"""Unit tests for the property-path and NautiLOD surface syntaxes."""

from __future__ import annotations

import pytest

from ldql.algebra import Bgp
from ldql.algebra import TriplePattern
from ldql.algebra import Var
from ldql.errors import ParseError
from ldql.formalisms import AnyFwd
from ldql.formalisms import AskTest
from ldql.formalisms import Bwd
from ldql.formalisms import Fwd
from ldql.formalisms import NegSet
from ldql.formalisms import NlAlt
from ldql.formalisms import NlSeq
from ldql.formalisms import NlStar
from ldql.formalisms import PpAlt
from ldql.formalisms import PpPattern
from ldql.formalisms import PpSeq
from ldql.formalisms import PpStar
from ldql.formalisms import Pred
from ldql.formalisms import ReachCriterion
from ldql.formalisms import ask_patterns
from ldql.formalisms import parse_nautilod
from ldql.formalisms import parse_pp
from ldql.formalisms import parse_pp_pattern
from ldql.formalisms import serialize_nautilod
from ldql.formalisms import serialize_pp
from ldql.formalisms import serialize_pp_pattern
from ldql.rdf import Literal
from tests.webs import P1
from tests.webs import P2
from tests.webs import UA

X, Y = Var("x"), Var("y")


class TestPropertyPaths:
    def test_pattern(self):
        p = parse_pp_pattern("?x <http://example.org/p1> / <http://example.org/p2>* ?y")
        assert p == PpPattern(X, PpSeq(Pred(P1), PpStar(Pred(P2))), Y)

    def test_constant_and_literal_endpoints(self):
        p = parse_pp_pattern('<http://example.org/uA> <http://example.org/p1> "v"')
        assert p == PpPattern(UA, Pred(P1), Literal("v"))

    def test_negated_sets(self):
        assert parse_pp("!<http://example.org/p1>") == NegSet((P1,))
        assert parse_pp("!(<http://example.org/p1> | <http://example.org/p2>)") == NegSet(
            (P1, P2)
        )

    def test_alternative_binds_loosest(self):
        pp = parse_pp("<http://example.org/p1> | <http://example.org/p1> / <http://example.org/p2>")
        assert pp == PpAlt(Pred(P1), PpSeq(Pred(P1), Pred(P2)))

    def test_empty_negated_set_rejected(self):
        with pytest.raises(ValueError):
            NegSet(())

    def test_missing_endpoint(self):
        with pytest.raises(ParseError) as info:
            parse_pp_pattern("?x <http://example.org/p1>")
        assert info.value.source == "pp"

    @pytest.mark.parametrize(
        "text",
        [
            "?x (<http://example.org/p1> | <http://example.org/p2>)* ?y",
            "?x !(<http://example.org/p1> | <http://example.org/p2>) / <http://example.org/p1> ?x",
            "<http://example.org/uA> (<http://example.org/p1> / <http://example.org/p2>)* ?y",
        ],
    )
    def test_serialization_reads_back(self, text):
        p = parse_pp_pattern(text)
        assert parse_pp_pattern(serialize_pp_pattern(p)) == p

    def test_minimal_parentheses(self):
        assert serialize_pp(PpStar(PpAlt(Pred(P1), Pred(P2)))) == (
            "(<http://example.org/p1> | <http://example.org/p2>)*"
        )


class TestNautilod:
    def test_steps(self):
        n = parse_nautilod("<http://example.org/p1> / <http://example.org/p2>^ | <>")
        assert n == NlAlt(NlSeq(Fwd(P1), Bwd(P2)), AnyFwd())

    def test_ask(self):
        n = parse_nautilod("<http://example.org/p1>*[ASK { ?s <http://example.org/p2> ?o }]")
        pattern = Bgp((TriplePattern(Var("s"), P2, Var("o")),))
        assert n == AskTest(NlStar(Fwd(P1)), pattern)

    def test_ask_patterns_outermost_first(self):
        n = parse_nautilod(
            "(<>[ASK { ?a ?b ?c }])[ASK { ?s <http://example.org/p2> ?o }]"
        )
        outer, inner = ask_patterns(n)
        assert outer == Bgp((TriplePattern(Var("s"), P2, Var("o")),))
        assert inner == Bgp((TriplePattern(Var("a"), Var("b"), Var("c")),))

    def test_bad_ask(self):
        with pytest.raises(ParseError, match="ASK"):
            parse_nautilod("<http://example.org/p1>[{ }]")

    @pytest.mark.parametrize(
        "text",
        [
            "(<http://example.org/p1> | <>)* / <http://example.org/p2>^",
            "<http://example.org/p1>[ASK ({ ?s ?p ?o } FILTER ?s != <http://example.org/uA>)]",
            "<> / (<> / <>)",
        ],
    )
    def test_serialization_reads_back(self, text):
        n = parse_nautilod(text)
        assert parse_nautilod(serialize_nautilod(n)) == n


class TestCriterion:
    def test_values(self):
        assert ReachCriterion("match") is ReachCriterion.MATCH
        assert [c.value for c in ReachCriterion] == ["all", "none", "match"]
