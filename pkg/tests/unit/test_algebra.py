"""Unit tests for solution mappings and SPARQL graph-pattern evaluation."""

from __future__ import annotations

import pytest

from ldql.algebra import UNIT
from ldql.algebra import AndExpr
from ldql.algebra import Bgp
from ldql.algebra import Bind
from ldql.algebra import Const
from ldql.algebra import Eq
from ldql.algebra import Filter
from ldql.algebra import Graph
from ldql.algebra import Join
from ldql.algebra import LeftJoin
from ldql.algebra import Neq
from ldql.algebra import NotExpr
from ldql.algebra import OrExpr
from ldql.algebra import PatternUnion
from ldql.algebra import Solution
from ldql.algebra import TriplePattern
from ldql.algebra import Var
from ldql.algebra import eval_expr
from ldql.algebra import eval_pattern
from ldql.algebra import join
from ldql.algebra import pattern_vars
from ldql.algebra import rename_pattern
from ldql.algebra import sbvars_pattern
from ldql.rdf import Literal
from ldql.rdf import build_dataset
from tests.webs import P1
from tests.webs import P2
from tests.webs import UA
from tests.webs import UB
from tests.webs import UC

X, Y, Z, W = Var("x"), Var("y"), Var("z"), Var("w")


def _eval(p, ds):
    return eval_pattern(p, ds.default, ds)


# ---------------------------------------------------------------------------
# Mappings
# ---------------------------------------------------------------------------


class TestSolution:
    def test_compatible_when_agreeing(self):
        assert Solution({X: UA}).compatible(Solution({X: UA, W: UC}))

    def test_incompatible_on_conflict(self):
        assert not Solution({X: UA}).compatible(Solution({X: UB}))

    def test_disjoint_domains_compatible(self):
        assert Solution({X: UA}).compatible(Solution({Y: UB}))

    def test_render_sorts_variables(self):
        rendered = Solution({Y: UB, X: UA}).render()
        assert rendered == "?x=<http://example.org/uA> ?y=<http://example.org/uB>"

    def test_equal_to_plain_dict(self):
        assert Solution({X: UA}) == {X: UA}
        assert hash(Solution({X: UA})) == hash(Solution({X: UA}))

    def test_project(self):
        assert Solution({X: UA, Y: UB}).project({X}) == Solution({X: UA})


class TestJoin:
    def test_running_example_join(self):
        left = {Solution({X: UA, W: UB}), Solution({X: UB, W: UC})}
        right = {Solution({X: UA, Y: UB, Z: UC})}
        assert join(left, right) == {Solution({X: UA, W: UB, Y: UB, Z: UC})}

    def test_unit_is_neutral(self):
        omega = frozenset({Solution({X: UA})})
        assert join(UNIT, omega) == omega

    def test_empty_annihilates(self):
        assert join({Solution({X: UA})}, set()) == frozenset()


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class TestExpressions:
    def test_equality(self):
        assert eval_expr(Eq(X, Const(UA)), {X: UA}) is True

    def test_unbound_variable_errors(self):
        assert eval_expr(Eq(X, Const(UA)), {}) is None

    def test_and_with_false_side_is_false(self):
        assert eval_expr(AndExpr(Eq(X, Const(UA)), Eq(Const(UA), Const(UB))), {}) is False

    def test_or_with_true_side_is_true(self):
        assert eval_expr(OrExpr(Eq(X, Const(UA)), Eq(Const(UA), Const(UA))), {}) is True

    def test_not_of_error_is_error(self):
        assert eval_expr(NotExpr(Eq(X, Const(UA))), {}) is None

    def test_literal_inequality(self):
        assert eval_expr(Neq(Const(Literal("a")), Const(Literal("b"))), {}) is True


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------


class TestEvalPattern:
    def test_running_example_bgp(self, wex):
        ds = build_dataset(wex, {UA, UC})
        bgp = Bgp((TriplePattern(X, P1, Y), TriplePattern(X, P2, Z)))
        assert _eval(bgp, ds) == {Solution({X: UA, Y: UB, Z: UC})}

    def test_empty_bgp_is_unit(self, wex):
        assert _eval(Bgp(), build_dataset(wex, set())) == UNIT

    def test_repeated_variable(self, wex):
        ds = build_dataset(wex, {UA})
        assert _eval(Bgp((TriplePattern(X, P1, X),)), ds) == frozenset()

    def test_optional_keeps_unmatched(self, wex):
        ds = build_dataset(wex, {UA})
        p = LeftJoin(Bgp((TriplePattern(X, P1, Y),)), Bgp((TriplePattern(Y, P1, Z),)))
        assert _eval(p, ds) == {Solution({X: UA, Y: UB})}

    def test_union(self, wex):
        ds = build_dataset(wex, {UA})
        p = PatternUnion(Bgp((TriplePattern(X, P1, Y),)), Bgp((TriplePattern(X, P2, Y),)))
        assert _eval(p, ds) == {Solution({X: UA, Y: UB}), Solution({X: UB, Y: UC})}

    def test_filter_drops_errors(self, wex):
        ds = build_dataset(wex, {UA})
        p = Filter(Bgp((TriplePattern(X, P1, Y),)), Eq(Z, Const(UA)))
        assert _eval(p, ds) == frozenset()

    def test_bind_constant(self, wex):
        p = Bind(Bgp(), Const(Literal("v")), X)
        assert _eval(p, build_dataset(wex, set())) == {Solution({X: Literal("v")})}

    def test_bind_error_leaves_unbound(self, wex):
        p = Bind(Bgp(), Y, X)
        assert _eval(p, build_dataset(wex, set())) == UNIT

    def test_bind_comparison_leaves_unbound(self, wex):
        p = Bind(Bgp(), Eq(Const(UA), Const(UA)), X)
        assert _eval(p, build_dataset(wex, set())) == UNIT

    def test_bind_target_must_be_fresh(self):
        with pytest.raises(ValueError, match="already occurs"):
            Bind(Bgp((TriplePattern(X, P1, Y),)), Const(UA), X)
        with pytest.raises(ValueError):
            Bind(Filter(Bgp(), Eq(X, Const(UA))), Const(UA), X)

    def test_graph_variable_ranges_over_named_graphs(self, wex):
        ds = build_dataset(wex, {UA, UB})
        p = Graph(W, Bgp((TriplePattern(X, P1, Y),)))
        assert _eval(p, ds) == {
            Solution({W: UA, X: UA, Y: UB}),
            Solution({W: UB, X: UB, Y: UC}),
        }

    def test_graph_unknown_uri_is_empty(self, wex):
        ds = build_dataset(wex, {UA})
        assert _eval(Graph(UC, Bgp()), ds) == frozenset()

    def test_graph_bgp_empty_binds_name(self, wex):
        ds = build_dataset(wex, {UA, UC})
        assert _eval(Graph(W, Bgp()), ds) == {Solution({W: UA}), Solution({W: UC})}

    def test_join(self, wex):
        ds = build_dataset(wex, {UA, UC})
        p = Join(Bgp((TriplePattern(X, P1, Y),)), Bgp((TriplePattern(X, P2, Z),)))
        assert _eval(p, ds) == {Solution({X: UA, Y: UB, Z: UC})}


# ---------------------------------------------------------------------------
# Static properties
# ---------------------------------------------------------------------------


class TestStatic:
    def test_sbvars_bgp(self):
        bgp = Bgp((TriplePattern(X, P1, Y), TriplePattern(X, P2, Z)))
        assert sbvars_pattern(bgp) == {X, Y, Z}

    def test_sbvars_union_intersects(self):
        p = PatternUnion(Bgp((TriplePattern(X, P1, Y),)), Bgp((TriplePattern(X, P2, Z),)))
        assert sbvars_pattern(p) == {X}

    def test_sbvars_optional_keeps_left(self):
        p = LeftJoin(Bgp((TriplePattern(X, P1, Y),)), Bgp((TriplePattern(Y, P1, Z),)))
        assert sbvars_pattern(p) == {X, Y}

    def test_sbvars_graph_variable(self):
        assert sbvars_pattern(Graph(W, Bgp())) == {W}

    def test_sbvars_bind_does_not_count(self):
        assert sbvars_pattern(Bind(Bgp(), Const(UA), X)) == frozenset()

    def test_rename(self):
        p = Filter(Graph(W, Bgp((TriplePattern(X, P1, Y),))), Eq(X, Const(UA)))
        renamed = rename_pattern(p, {X: Z, W: Y})
        assert pattern_vars(renamed) == {Z, Y}
