"""Unit tests for the reference evaluators of the compared formalisms."""

from __future__ import annotations

import pytest

from ldql.algebra import Solution
from ldql.algebra import Var
from ldql.fixtures import parse_web
from ldql.formalisms import ReachCriterion
from ldql.formalisms import parse_nautilod
from ldql.formalisms import parse_pp_pattern
from ldql.oracles import ContextSelector
from ldql.oracles import criterion_holds
from ldql.oracles import eval_nautilod
from ldql.oracles import eval_pp_ctxt
from ldql.oracles import eval_reach
from ldql.oracles import reachable_docs
from ldql.rdf import Literal
from ldql.rdf import Triple
from ldql.syntax import parse_pattern
from tests.webs import P1
from tests.webs import P2
from tests.webs import SEPARATION
from tests.webs import UA
from tests.webs import UB
from tests.webs import UC
from tests.webs import W1
from tests.webs import W2
from tests.webs import ex

X, Y = Var("x"), Var("y")


class TestContextSelector:
    def test_authoritative_triples_only(self, wex):
        selector = ContextSelector(wex)
        assert selector(UA) == {Triple(UA, P1, UB)}
        assert selector(UB) == {Triple(UB, P1, UC)}
        assert selector(UC) == frozenset()

    def test_non_uri_and_outside_dom(self, wex):
        selector = ContextSelector(wex)
        assert selector(P2) == frozenset()
        assert selector(Literal("x")) == frozenset()


class TestPropertyPaths:
    def test_single_step(self, wex):
        result = eval_pp_ctxt(parse_pp_pattern("?x <http://example.org/p1> ?y"), wex)
        assert result == {Solution({X: UA, Y: UB}), Solution({X: UB, Y: UC})}

    def test_non_authoritative_triples_are_invisible(self, wex):
        assert eval_pp_ctxt(parse_pp_pattern("?x <http://example.org/p2> ?y"), wex) == frozenset()

    def test_star_from_constant(self, wex):
        p = parse_pp_pattern("<http://example.org/uA> <http://example.org/p1>* ?y")
        result = eval_pp_ctxt(p, wex)
        assert {m[Y] for m in result} == {UA, UB, UC}

    def test_sequence(self, wex):
        result = eval_pp_ctxt(
            parse_pp_pattern("?x <http://example.org/p1> / <http://example.org/p1> ?y"), wex
        )
        assert result == {Solution({X: UA, Y: UC})}

    def test_negated_set(self, wex):
        p = parse_pp_pattern("<http://example.org/uA> !<http://example.org/p2> ?y")
        result = eval_pp_ctxt(p, wex)
        assert result == {Solution({Y: UB})}

    def test_star_identity_covers_every_term(self, wex):
        result = eval_pp_ctxt(parse_pp_pattern("?x <http://example.org/p2>* ?x"), wex)
        assert {m[X] for m in result} == wex.terms()

    def test_repeated_variable(self, wex):
        assert eval_pp_ctxt(parse_pp_pattern("?x <http://example.org/p1> ?x"), wex) == frozenset()

    def test_pair_webs_differ_only_on_star_identity(self):
        w1, w2 = parse_web(W1), parse_web(W2)
        step = parse_pp_pattern("?x <http://example.org/p> ?y")
        assert eval_pp_ctxt(step, w1) == eval_pp_ctxt(step, w2) == {
            Solution({X: ex("u"), Y: ex("v")})
        }
        star = parse_pp_pattern("?x <http://example.org/p>* ?y")
        assert Solution({X: ex("a"), Y: ex("a")}) in eval_pp_ctxt(star, w1)
        assert Solution({X: ex("a"), Y: ex("a")}) not in eval_pp_ctxt(star, w2)
        anchored = parse_pp_pattern("<http://example.org/u> <http://example.org/p>* ?y")
        assert eval_pp_ctxt(anchored, w1) == eval_pp_ctxt(anchored, w2)

    def test_separation_web_hides_self_loop(self):
        web = parse_web(SEPARATION)
        result = eval_pp_ctxt(parse_pp_pattern("?x <http://example.org/u> ?y"), web)
        assert result == frozenset()


class TestNautilod:
    def test_forward(self, wex):
        assert eval_nautilod(parse_nautilod("<http://example.org/p1>"), wex, UA) == {UB}

    def test_backward(self, wex):
        assert eval_nautilod(parse_nautilod("<http://example.org/p2>^"), wex, UC) == {UA}

    def test_any_forward(self, wex):
        assert eval_nautilod(parse_nautilod("<>"), wex, UB) == {UC}

    def test_sequence(self, wex):
        n = parse_nautilod("<http://example.org/p1> / <http://example.org/p1>")
        assert eval_nautilod(n, wex, UA) == {UC}

    def test_star(self, wex):
        assert eval_nautilod(parse_nautilod("<http://example.org/p1>*"), wex, UA) == {UA, UB, UC}

    def test_ask(self, wex):
        holds = parse_nautilod("<http://example.org/p1>[ASK { ?s <http://example.org/p1> ?o }]")
        fails = parse_nautilod("<http://example.org/p1>[ASK { ?s <http://example.org/p2> ?o }]")
        assert eval_nautilod(holds, wex, UA) == {UB}
        assert eval_nautilod(fails, wex, UA) == frozenset()

    def test_start_outside_dom(self, wex):
        with pytest.raises(ValueError):
            eval_nautilod(parse_nautilod("<>"), wex, P2)

    @pytest.mark.parametrize(
        "text",
        [
            "<http://example.org/p>",
            "<http://example.org/p>*",
            "<> / <>",
            "(<> | <http://example.org/p>^)*",
            "<>[ASK { ?s ?s ?s }]",
            "<>*[ASK { ?s ?p ?o }] / <>",
        ],
    )
    def test_pair_webs_agree(self, text):
        n = parse_nautilod(text)
        u = ex("u")
        assert eval_nautilod(n, parse_web(W1), u) == eval_nautilod(n, parse_web(W2), u)


class TestReachability:
    def test_criteria_on_a_triple(self):
        t = Triple(UA, P1, UB)
        p = parse_pattern("{ ?x <http://example.org/p1> ?y }")
        assert criterion_holds(ReachCriterion.ALL, t, UB, p)
        assert not criterion_holds(ReachCriterion.NONE, t, UB, p)
        assert criterion_holds(ReachCriterion.MATCH, t, UB, p)
        assert not criterion_holds(ReachCriterion.MATCH, Triple(UA, P2, UB), UB, p)

    def test_match_respects_repeated_variables(self):
        p = parse_pattern("{ ?x <http://example.org/p1> ?x }")
        assert not criterion_holds(ReachCriterion.MATCH, Triple(UA, P1, UB), UB, p)
        assert criterion_holds(ReachCriterion.MATCH, Triple(UA, P1, UA), UA, p)

    @pytest.mark.parametrize(
        "criterion,docs",
        [
            (ReachCriterion.NONE, {"dB"}),
            (ReachCriterion.MATCH, {"dB"}),
            (ReachCriterion.ALL, {"dA", "dB", "dC"}),
        ],
    )
    def test_reachable_documents(self, wex, criterion, docs):
        p = parse_pattern("{ ?x <http://example.org/p2> ?y }")
        assert reachable_docs(criterion, {UB}, p, wex).docs == docs

    def test_match_follows_matching_links(self, wex):
        p = parse_pattern("{ ?x <http://example.org/p1> ?y }")
        assert reachable_docs(ReachCriterion.MATCH, {UA}, p, wex).docs == {"dA", "dB", "dC"}

    def test_seeds_outside_dom_reach_nothing(self, wex):
        p = parse_pattern("{ }")
        assert reachable_docs(ReachCriterion.ALL, {P2}, p, wex).docs == frozenset()

    def test_eval_reach(self, wex):
        p = parse_pattern("{ ?x <http://example.org/p2> ?y }")
        assert eval_reach(p, ReachCriterion.MATCH, {UB}, wex) == frozenset()
        assert eval_reach(p, ReachCriterion.ALL, {UB}, wex) == {
            Solution({X: UB, Y: UC}),
            Solution({X: UA, Y: UC}),
        }
